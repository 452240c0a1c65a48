//! Random first-order structures and sentences.

use beyondnp_core::reductions::{FoFormula, FoSentence, FoStructure};
use rand::Rng;

pub fn random_formula(r: &mut impl Rng, vars: &[String], rels: &[(String, usize)], depth: usize) -> FoFormula {
    let pick = |r: &mut dyn rand::RngCore| vars[r.gen_range(0..vars.len())].clone();
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..6) {
            0 if vars.len() > 1 => FoFormula::Eq(pick(r), pick(r)),
            5 => FoFormula::Const(r.gen()),
            _ => {
                let (name, arity) = &rels[r.gen_range(0..rels.len())];
                FoFormula::Atom(name.clone(), (0..*arity).map(|_| pick(r)).collect())
            }
        };
    }
    match r.gen_range(0..4) {
        0 => FoFormula::Not(Box::new(random_formula(r, vars, rels, depth - 1))),
        1 => FoFormula::And((0..r.gen_range(2..=3)).map(|_| random_formula(r, vars, rels, depth - 1)).collect()),
        2 => FoFormula::Or((0..r.gen_range(2..=3)).map(|_| random_formula(r, vars, rels, depth - 1)).collect()),
        _ => FoFormula::Implies(
            Box::new(random_formula(r, vars, rels, depth - 1)),
            Box::new(random_formula(r, vars, rels, depth - 1)),
        ),
    }
}

/// Structure with |domain| ≤ 4 and an ∃^{≤2}∀^{≤2} sentence over `P/1`, `E/2`.
pub fn random_fo(r: &mut impl Rng) -> (FoStructure, FoSentence) {
    let d: usize = r.gen_range(1..=4);
    let mut s = FoStructure::new((0..d).map(|i| format!("e{i}")).collect());
    let rels = vec![("P".to_string(), 1), ("E".to_string(), 2)];
    for (name, arity) in &rels {
        let total = d.pow(*arity as u32);
        let tuples: Vec<Vec<usize>> = (0..total)
            .filter(|_| r.gen_bool(0.4))
            .map(|mut c| {
                (0..*arity)
                    .map(|_| {
                        let e = c % d;
                        c /= d;
                        e
                    })
                    .collect()
            })
            .collect();
        s.add_relation(name, *arity, tuples).unwrap();
    }
    let k = r.gen_range(0..=2);
    let n = r.gen_range(0..=2);
    let exist_vars: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let forall_vars: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let all: Vec<String> = exist_vars.iter().chain(&forall_vars).cloned().collect();
    let matrix = if all.is_empty() { FoFormula::Const(r.gen()) } else { random_formula(r, &all, &rels, 3) };
    (s, FoSentence { exist_vars, forall_vars, matrix })
}
