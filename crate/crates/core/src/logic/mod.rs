//! Propositional data model shared by every module.

mod assignment;
mod circuit;
pub mod format;
mod instance;
mod normal;
mod var;

pub use assignment::{assignment_weight, Assignment};
pub use circuit::{Builder, Circuit, Compiled, Gate, NodeId};
pub use instance::{binomial, Quant, WeightSpec, WqbfInstance};
pub use normal::{Clause, Cnf, Dnf, Literal, Term};
pub use var::{Fresh, VarId, FRESH_PREFIX};

pub fn eval_circuit(c: &Circuit, a: &Assignment) -> crate::Result<bool> {
    c.eval(a)
}

pub fn substitute(c: &Circuit, gamma: &Assignment) -> Circuit {
    c.substitute(gamma)
}

pub fn circuit_metrics(c: &Circuit) -> (usize, usize) {
    c.metrics()
}

pub fn negate_nnf(c: &Circuit) -> Circuit {
    c.negate_nnf()
}
