//! Solvers for weighted two-block quantified Boolean formulas, disjunctive
//! answer set programs and related problems, by compilation to SAT.

pub mod apps;
pub mod asp;
pub mod error;
pub mod logic;
pub mod reductions;
pub mod sat;
pub mod wqbf;

pub use error::{Error, Result};
pub use sat::Engine;
