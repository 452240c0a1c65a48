//! Collapse of a circuit matrix under a free universal block to 3DNF.

use std::collections::HashMap;

use super::{fresh_for, precondition};
use crate::error::Result;
use crate::logic::{Circuit, Dnf, Fresh, Gate, Literal, Quant, Term, VarId, WqbfInstance};

/// Circuit over binary `and` and `not` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BinGate {
    Input(VarId),
    Const(bool),
    Not(usize),
    And(usize, usize),
}

#[derive(Default)]
struct BinCircuit {
    gates: Vec<BinGate>,
    index: HashMap<BinGate, usize>,
}

impl BinCircuit {
    fn add(&mut self, g: BinGate) -> usize {
        if let Some(&i) = self.index.get(&g) {
            return i;
        }
        self.gates.push(g.clone());
        self.index.insert(g, self.gates.len() - 1);
        self.gates.len() - 1
    }

    fn not(&mut self, a: usize) -> usize {
        self.add(BinGate::Not(a))
    }

    fn and(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            a
        } else {
            self.add(BinGate::And(a, b))
        }
    }

    fn and_all(&mut self, xs: &[usize]) -> usize {
        match xs.split_first() {
            None => self.add(BinGate::Const(true)),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| self.and(acc, x)),
        }
    }

    fn or_all(&mut self, xs: &[usize]) -> usize {
        match xs.split_first() {
            None => self.add(BinGate::Const(false)),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| {
                let na = self.not(acc);
                let nx = self.not(x);
                let both = self.and(na, nx);
                self.not(both)
            }),
        }
    }
}

/// Rewrites the output cone of `c` into binary `and`/`not` gates: `or` via
/// De Morgan, n-ary gates chained left to right. Returns the gates in
/// topological order and the output index.
pub fn binarize(c: &Circuit) -> (Vec<BinGate>, usize) {
    let live = c.cone();
    let mut bc = BinCircuit::default();
    let mut map = vec![usize::MAX; c.len()];
    for (i, g) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        map[i] = match g {
            Gate::Input(v) => bc.add(BinGate::Input(v.clone())),
            Gate::Const(b) => bc.add(BinGate::Const(*b)),
            Gate::Not(a) => bc.not(map[*a]),
            Gate::And(cs) => bc.and_all(&cs.iter().map(|&x| map[x]).collect::<Vec<_>>()),
            Gate::Or(cs) => bc.or_all(&cs.iter().map(|&x| map[x]).collect::<Vec<_>>()),
        };
    }
    (bc.gates, map[c.output()])
}

fn term(lits: Vec<Literal>) -> Term {
    Term::new(lits).expect("collapse terms mention distinct variables")
}

/// `∃X ∀Y. C` to `∃X ∀(Y ∪ Z). ψ` with `ψ` in 3DNF: one `z_r` per gate of
/// the binarized matrix, `ψ = ⋁_r χ_r ∨ z_o` where `χ_r` detects a gate whose
/// `z_r` disagrees with its inputs. The leading block and its weight are
/// kept.
pub fn collapse_to_3dnf(inst: &WqbfInstance) -> Result<WqbfInstance> {
    if inst.outer_kind != Quant::Exists || !inst.inner_weight.is_free() {
        return Err(precondition("collapse needs a leading ∃ block and a free ∀ block"));
    }
    let (gates, out) = binarize(&inst.matrix);
    let mut fresh: Fresh = fresh_for(inst);
    let z: Vec<VarId> = (0..gates.len()).map(|_| fresh.var("z")).collect();
    let pos = |i: usize| Literal::pos(z[i].clone());
    let neg = |i: usize| Literal::neg(z[i].clone());
    let mut terms = Vec::new();
    for (r, g) in gates.iter().enumerate() {
        match g {
            BinGate::And(a, b) => {
                terms.push(term(vec![pos(r), neg(*a)]));
                terms.push(term(vec![pos(r), neg(*b)]));
                terms.push(term(vec![pos(*a), pos(*b), neg(r)]));
            }
            BinGate::Not(a) => {
                terms.push(term(vec![pos(r), pos(*a)]));
                terms.push(term(vec![neg(r), neg(*a)]));
            }
            BinGate::Input(w) => {
                terms.push(term(vec![pos(r), Literal::neg(w.clone())]));
                terms.push(term(vec![neg(r), Literal::pos(w.clone())]));
            }
            BinGate::Const(true) => terms.push(term(vec![neg(r)])),
            BinGate::Const(false) => terms.push(term(vec![pos(r)])),
        }
    }
    terms.push(term(vec![pos(out)]));
    let mut inner_vars = inst.inner_vars.clone();
    inner_vars.extend(z);
    Ok(WqbfInstance {
        inner_vars,
        matrix: Circuit::from_dnf(&Dnf::new(terms)),
        ..inst.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Assignment, Builder, WeightSpec};

    #[test]
    fn binarize_preserves_semantics() {
        let vs: Vec<VarId> = ["a", "b", "c"].iter().map(|s| VarId::new(s)).collect();
        let mut b = Builder::new();
        let ins: Vec<_> = vs.iter().map(|v| b.input(v)).collect();
        let o1 = b.or(ins.clone());
        let n = b.not(ins[1]);
        let a = b.and(vec![o1, n, ins[2]]);
        let e = b.and(vec![]);
        let out = b.or(vec![a, e]);
        let c = b.finish(out);
        let (gates, o) = binarize(&c);
        for bits in 0..8u32 {
            let asg = Assignment::from_pairs(vs.iter().enumerate().map(|(i, v)| (v.clone(), bits >> i & 1 == 1)));
            let mut val = vec![false; gates.len()];
            for (i, g) in gates.iter().enumerate() {
                val[i] = match g {
                    BinGate::Input(v) => asg.get(v).unwrap(),
                    BinGate::Const(b) => *b,
                    BinGate::Not(a) => !val[*a],
                    BinGate::And(a, b) => val[*a] && val[*b],
                };
            }
            assert_eq!(val[o], c.eval(&asg).unwrap());
        }
    }

    #[test]
    fn single_input() {
        let x = VarId::new("x");
        let inst = WqbfInstance::exists_forall(vec![x.clone()], WeightSpec::Exact(1), vec![], WeightSpec::Free, Circuit::var(&x));
        let out = collapse_to_3dnf(&inst).unwrap();
        assert_eq!(out.inner_vars.len(), 1);
        let d = out.matrix.to_dnf().unwrap();
        assert_eq!(d.terms.len(), 3);
        assert_eq!(out.outer_weight, WeightSpec::Exact(1));
    }
}
