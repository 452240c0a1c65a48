use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::program::{Program, Rule};
use crate::error::Result;
use crate::logic::{Clause, Cnf, Literal, VarId};
use crate::sat::{Engine, SatResult};

pub type AtomSet = BTreeSet<VarId>;

/// Gelfond-Lifschitz reduct: rules whose negative body meets `m` are
/// dropped, the negative bodies of the others are cleared.
pub fn gl_reduct(p: &Program, m: &AtomSet) -> Program {
    Program::new(
        p.rules
            .iter()
            .filter(|r| r.neg.iter().all(|a| !m.contains(a)))
            .map(|r| Rule::new(r.head.clone(), r.pos.clone(), vec![]))
            .collect(),
    )
}

/// Classical satisfaction of every rule of `p` by `s`.
pub fn is_model(p: &Program, s: &AtomSet) -> bool {
    p.rules.iter().all(|r| {
        r.neg.iter().any(|a| s.contains(a)) || !r.pos.iter().all(|a| s.contains(a)) || r.head.iter().any(|a| s.contains(a))
    })
}

/// `s ⊨ P^m` without building the reduct.
pub fn models_reduct(p: &Program, m: &AtomSet, s: &AtomSet) -> bool {
    p.rules.iter().all(|r| {
        r.neg.iter().any(|a| m.contains(a)) || !r.pos.iter().all(|a| s.contains(a)) || r.head.iter().any(|a| s.contains(a))
    })
}

/// Parameters of a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamReport {
    pub comp: AtomSet,
    pub cont: AtomSet,
    /// Indices of rules with a contingent atom in the head.
    pub contingent_rules: Vec<usize>,
    /// Indices of rules with more than one head atom.
    pub disjunctive_rules: Vec<usize>,
    pub max_atom_occurrence: usize,
}

/// Least set closed under `w ← not w` seeds and normal positive rules with
/// compulsory bodies.
pub fn compulsory_atoms(p: &Program) -> AtomSet {
    let mut comp: AtomSet = p
        .rules
        .iter()
        .filter(|r| r.head.len() == 1 && r.pos.is_empty() && r.neg.len() == 1 && r.neg[0] == r.head[0])
        .map(|r| r.head[0].clone())
        .collect();
    loop {
        let before = comp.len();
        for r in &p.rules {
            if r.head.len() == 1 && r.neg.is_empty() && r.pos.iter().all(|a| comp.contains(a)) {
                comp.insert(r.head[0].clone());
            }
        }
        if comp.len() == before {
            return comp;
        }
    }
}

/// Occurrences of each atom, counted over heads and both bodies.
pub fn atom_occurrences(p: &Program) -> BTreeMap<VarId, usize> {
    let mut occ = BTreeMap::new();
    for a in p.rules.iter().flat_map(Rule::atoms) {
        *occ.entry(a.clone()).or_insert(0) += 1;
    }
    occ
}

pub fn comp_and_cont(p: &Program) -> ParamReport {
    let comp = compulsory_atoms(p);
    let cont: AtomSet = p.atom_set().difference(&comp).cloned().collect();
    let contingent_rules = (0..p.rules.len()).filter(|&i| p.rules[i].head.iter().any(|a| cont.contains(a))).collect();
    let disjunctive_rules = (0..p.rules.len()).filter(|&i| p.rules[i].is_disjunctive()).collect();
    let max_atom_occurrence = atom_occurrences(p).into_values().max().unwrap_or(0);
    ParamReport { comp, cont, contingent_rules, disjunctive_rules, max_atom_occurrence }
}

/// CNF satisfiable iff some `M′ ⊊ m` models `P^m`. Atoms of `m` are renamed
/// through `name`; atoms outside `m` are fixed false and do not appear.
pub fn minimality_cnf(p: &Program, m: &AtomSet, mut name: impl FnMut(&VarId) -> VarId) -> Cnf {
    let names: HashMap<&VarId, VarId> = m.iter().map(|a| (a, name(a))).collect();
    let mut clauses = Vec::new();
    for r in gl_reduct(p, m).rules {
        if r.pos.iter().any(|a| !m.contains(a)) || r.head.iter().any(|a| r.pos.contains(a)) {
            continue;
        }
        let lits = r
            .head
            .iter()
            .filter(|a| m.contains(*a))
            .map(|a| Literal::pos(names[a].clone()))
            .chain(r.pos.iter().map(|a| Literal::neg(names[a].clone())))
            .collect();
        clauses.push(Clause::new(lits).expect("head and body are disjoint here"));
    }
    clauses.push(Clause::new(m.iter().map(|a| Literal::neg(names[a].clone())).collect()).expect("single polarity"));
    Cnf::new(clauses)
}

/// `m` is a subset-minimal model of `P^m`; minimality by one SAT query.
pub fn is_answer_set_with(engine: &Engine, p: &Program, m: &AtomSet) -> Result<bool> {
    if !models_reduct(p, m, m) {
        return Ok(false);
    }
    let f = minimality_cnf(p, m, VarId::clone);
    Ok(matches!(engine.solve(&f)?, SatResult::Unsat))
}

pub fn is_answer_set(p: &Program, m: &AtomSet) -> bool {
    is_answer_set_with(&Engine::new(), p, m).expect("built-in solver")
}

/// Rule in bitmask form over at most 32 atoms.
struct MaskRule {
    head: u32,
    pos: u32,
    neg: u32,
}

/// Every answer set, by enumerating candidate sets and all their proper
/// subsets. Independent of the SAT engine.
pub fn brute_force_answer_sets_with(engine: &Engine, p: &Program) -> Result<Vec<AtomSet>> {
    let atoms = p.atoms();
    engine.check_oracle_bound("answer set enumeration", atoms.len())?;
    if atoms.len() > 31 {
        return Err(crate::Error::OracleBound { what: "answer set enumeration".into(), size: atoms.len(), bound: 31 });
    }
    let index: HashMap<&VarId, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mask = |xs: &[VarId]| xs.iter().fold(0u32, |acc, a| acc | 1 << index[a]);
    let rules: Vec<MaskRule> =
        p.rules.iter().map(|r| MaskRule { head: mask(&r.head), pos: mask(&r.pos), neg: mask(&r.neg) }).collect();
    let models = |m: u32, s: u32| rules.iter().all(|r| r.neg & m != 0 || r.pos & s != r.pos || r.head & s != 0);
    let mut out = Vec::new();
    for m in 0..1u32 << atoms.len() {
        if !models(m, m) {
            continue;
        }
        // proper submasks of m, largest first
        let mut minimal = true;
        let mut s = m;
        while s != 0 {
            s = (s - 1) & m;
            if models(m, s) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push((0..atoms.len()).filter(|&i| m >> i & 1 == 1).map(|i| atoms[i].clone()).collect());
        }
    }
    out.sort();
    Ok(out)
}

pub fn brute_force_answer_sets(p: &Program) -> Result<Vec<AtomSet>> {
    brute_force_answer_sets_with(&Engine::new(), p)
}

/// Writes `m` as `Comp(P) ∪ Rng(μ)` with `μ` defined on contingent rules.
/// Returns the pairs `(rule index, μ(rule))` or `None` if no such `μ` covers
/// `m`.
pub fn contingent_representation(p: &Program, m: &AtomSet) -> Option<Vec<(usize, VarId)>> {
    let params = comp_and_cont(p);
    if !params.comp.is_subset(m) {
        return None;
    }
    let targets: Vec<&VarId> = m.difference(&params.comp).collect();
    // rules applicable under m, matched to the atoms they can cover
    let options: Vec<(usize, Vec<usize>)> = params
        .contingent_rules
        .iter()
        .filter(|&&i| {
            let r = &p.rules[i];
            r.neg.iter().all(|a| !m.contains(a)) && r.pos.iter().all(|a| m.contains(a))
        })
        .map(|&i| (i, (0..targets.len()).filter(|&t| p.rules[i].head.contains(targets[t])).collect()))
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; targets.len()];
    fn augment(r: usize, options: &[(usize, Vec<usize>)], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &t in &options[r].1 {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            if owner[t].is_none_or(|o| augment(o, options, owner, seen)) {
                owner[t] = Some(r);
                return true;
            }
        }
        false
    }
    for r in 0..options.len() {
        augment(r, &options, &mut owner, &mut vec![false; targets.len()]);
    }
    owner
        .iter()
        .enumerate()
        .map(|(t, o)| o.map(|r| (options[r].0, targets[t].clone())))
        .collect::<Option<Vec<_>>>()
        .map(|mut mu| {
            mu.sort();
            mu
        })
}
