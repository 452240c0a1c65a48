mod common;

use std::collections::{BTreeSet, HashSet};

use beyondnp_core::asp::*;
use beyondnp_core::logic::{Builder, Circuit, NodeId, VarId, WeightSpec, WqbfInstance};
use beyondnp_core::reductions::monotonize_universal;
use beyondnp_core::sat::Engine;
use beyondnp_core::wqbf::brute_force_wqbf;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn all_subsets(atoms: &[VarId]) -> Vec<AtomSet> {
    (0..1u32 << atoms.len())
        .map(|bits| atoms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

/// Closure of `s` under the two compulsory-atom rules, written against the
/// rule list directly.
fn closed(p: &Program, s: &AtomSet) -> bool {
    p.rules.iter().all(|r| {
        let seed = r.head.len() == 1 && r.pos.is_empty() && r.neg == r.head;
        let prop = r.head.len() == 1 && r.neg.is_empty() && r.pos.iter().all(|a| s.contains(a));
        !(seed || prop) || s.contains(&r.head[0])
    })
}

#[test]
fn four_way_agreement() {
    let mut r = common::rng(40);
    let engine = Engine::new();
    let mut consistent = 0;
    for _ in 0..300 {
        let n = r.gen_range(1..=7);
        let atoms = common::vars("a", n);
        let p = common::program(&mut r, &atoms, 7, 2);
        let oracle = brute_force_answer_sets(&p).unwrap();
        let expected = !oracle.is_empty();
        consistent += usize::from(expected);

        let found = [
            solve_cont_atoms_with(&engine, &p).unwrap(),
            solve_cont_rules_with(&engine, &p).unwrap(),
            solve_disj_rules_with(&engine, &p, CandidateSearch::Enumerate).unwrap(),
            solve_disj_rules_with(&engine, &p, CandidateSearch::Sat).unwrap(),
        ];
        for (i, f) in found.iter().enumerate() {
            assert_eq!(f.is_some(), expected, "solver {i} on\n{p}");
            if let Some(m) = f {
                assert!(oracle.contains(m), "solver {i} returned a non-answer-set {m:?} on\n{p}");
            }
        }
        let formula = cont_atoms_formula(&engine, &p).unwrap();
        assert_eq!(engine.solve(&formula).unwrap().is_sat(), !expected, "{p}");

        let params = comp_and_cont(&p);
        for m in &oracle {
            assert!(params.comp.is_subset(m));
            let mu = contingent_representation(&p, m).expect("representation exists");
            let mut rebuilt = params.comp.clone();
            for (i, a) in &mu {
                assert!(params.contingent_rules.contains(i) && p.rules[*i].head.contains(a) && params.cont.contains(a));
                rebuilt.insert(a.clone());
            }
            assert_eq!(&rebuilt, m);
        }
        let present = p.atoms();
        let oracle_set: HashSet<&AtomSet> = oracle.iter().collect();
        for m in all_subsets(&present) {
            assert_eq!(is_answer_set(&p, &m), oracle_set.contains(&m));
        }
    }
    assert!(consistent > 60 && consistent < 280, "degenerate sample: {consistent} consistent");
}

#[test]
fn comp_is_least_closed_set() {
    let mut r = common::rng(41);
    let mut nonempty = 0;
    for _ in 0..300 {
        let atoms = common::vars("a", r.gen_range(1..=6));
        let p = common::program(&mut r, &atoms, 8, 2);
        let params = comp_and_cont(&p);
        assert!(closed(&p, &params.comp));
        for c in &params.comp {
            let mut smaller = params.comp.clone();
            smaller.remove(c);
            assert!(!closed(&p, &smaller));
        }
        assert!(params.comp.is_disjoint(&params.cont));
        let union: AtomSet = params.comp.union(&params.cont).cloned().collect();
        assert_eq!(union, p.atom_set());
        nonempty += usize::from(!params.comp.is_empty());
    }
    assert!(nonempty > 20);
}

#[test]
fn cont_atoms_call_budget() {
    let mut r = common::rng(42);
    for _ in 0..200 {
        let atoms = common::vars("a", r.gen_range(1..=7));
        let p = common::program(&mut r, &atoms, 7, 2);
        let engine = Engine::new();
        solve_cont_atoms_with(&engine, &p).unwrap();
        assert!(engine.sat_calls() <= 1 << comp_and_cont(&p).cont.len());
    }
}

#[test]
fn ceilings_are_enforced() {
    let atoms = common::vars("a", 12);
    let p = Program::new(atoms.chunks(2).map(|c| Rule::new(c.to_vec(), vec![], vec![])).collect());
    let engine = Engine::new().with_ceiling(100);
    assert!(matches!(solve_cont_atoms_with(&engine, &p), Err(beyondnp_core::Error::Ceiling { .. })));
    let engine = Engine::new().with_ceiling(500);
    assert!(matches!(
        solve_disj_rules_with(&engine, &p, CandidateSearch::Sat),
        Err(beyondnp_core::Error::Ceiling { .. })
    ));
    let big = common::vars("b", 17);
    let q = Program::new(big.iter().map(Rule::fact).collect());
    assert!(matches!(brute_force_answer_sets(&q), Err(beyondnp_core::Error::OracleBound { .. })));
}

fn dnf_instance(r: &mut impl Rng, n: usize, m: usize, k: usize) -> WqbfInstance {
    let xs = common::vars("x", n);
    let ys = common::vars("y", m);
    let all: Vec<VarId> = xs.iter().chain(&ys).cloned().collect();
    let terms = r.gen_range(1..=5);
    let d = common::dnf(r, &all, terms, 3);
    WqbfInstance::exists_forall(xs, WeightSpec::Exact(k), ys, WeightSpec::Free, Circuit::from_dnf(&d))
}

#[test]
fn contrules_generator() {
    let mut r = common::rng(43);
    let engine = Engine::new();
    let mut yes = 0;
    for _ in 0..100 {
        let n = r.gen_range(1..=3);
        let m = r.gen_range(1..=6 - n);
        let k = r.gen_range(0..=n.min(2));
        let inst = dnf_instance(&mut r, n, m, k);
        let p = gen_contrules_hard(&inst).unwrap();
        let params = comp_and_cont(&p);
        // with a single existential variable each guessing rule is a fact
        let guessing = if n >= 2 { k } else { 0 };
        assert_eq!(params.contingent_rules, (0..guessing).collect::<Vec<_>>());
        for v in inst.outer_vars.iter().chain(&inst.inner_vars) {
            assert!(params.comp.contains(v));
        }
        let w: Vec<&VarId> = params.comp.iter().filter(|a| a.name().starts_with("_w")).collect();
        assert_eq!(w.len(), 1);
        // v_i and z_i are compulsory as well
        assert_eq!(params.comp.len(), 1 + 2 * n + 2 * m + if n >= 2 { 0 } else { k });

        let expected = brute_force_wqbf(&inst).unwrap().is_yes();
        yes += usize::from(expected);
        assert_eq!(solve_cont_rules_with(&engine, &p).unwrap().is_some(), expected, "{inst:?}\n{p}");
        assert_eq!(solve_cont_atoms_with(&engine, &p).unwrap().is_some(), expected);
        if p.atoms().len() <= 16 {
            assert_eq!(!brute_force_answer_sets(&p).unwrap().is_empty(), expected);
        }
    }
    assert!(yes > 10 && yes < 90, "{yes}");
}

/// Random NNF circuit, monotone in `ys`.
fn monotone_nnf(r: &mut impl Rng, xs: &[VarId], ys: &[VarId], gates: usize) -> Circuit {
    let mut b = Builder::new();
    let mut nodes: Vec<NodeId> = Vec::new();
    for x in xs {
        let n = b.input(x);
        nodes.push(n);
        nodes.push(b.not(n));
    }
    for y in ys {
        nodes.push(b.input(y));
    }
    if nodes.is_empty() || r.gen_bool(0.1) {
        nodes.push(b.constant(r.gen()));
    }
    for _ in 0..gates {
        let fan = r.gen_range(1..=3);
        let kids: Vec<NodeId> = (0..fan).map(|_| *nodes.choose(r).unwrap()).collect();
        let g = if r.gen() { b.and(kids) } else { b.or(kids) };
        nodes.push(g);
    }
    b.finish(*nodes.last().unwrap())
}

fn disj_consistent(p: &Program) -> bool {
    let engine = Engine::new();
    let sat = solve_disj_rules_with(&engine, p, CandidateSearch::Sat).unwrap();
    if let Some(m) = &sat {
        assert!(is_answer_set(p, m));
    }
    sat.is_some()
}

#[test]
fn disjrules_generator() {
    let mut r = common::rng(44);
    let mut yes = 0;
    for round in 0..100 {
        let n = r.gen_range(0..=3);
        let m = r.gen_range(1..=6 - n);
        let k = if round < 10 { 0 } else { r.gen_range(0..=m.min(2)) };
        let xs = common::vars("x", n);
        let ys = common::vars("y", m);
        let gates = r.gen_range(1..=6);
        let c = monotone_nnf(&mut r, &xs, &ys, gates);
        let inst = WqbfInstance::exists_forall(xs, WeightSpec::Free, ys, WeightSpec::Exact(k), c);
        let p = gen_disjrules_hard(&inst).unwrap();
        let params = comp_and_cont(&p);
        // with a single universal variable the guessing rules are facts
        assert_eq!(params.disjunctive_rules.len(), if m >= 2 { k } else { 0 });
        for &i in &params.disjunctive_rules {
            assert_eq!(p.rules[i].head.len(), m);
        }
        let expected = brute_force_wqbf(&inst).unwrap().is_yes();
        yes += usize::from(expected);
        assert_eq!(disj_consistent(&p), expected, "{inst:?}\n{p}");
        if params.cont.len() <= 8 {
            assert_eq!(solve_cont_atoms(&p).unwrap(), expected);
        }
    }
    assert!(yes > 10 && yes < 90, "{yes}");
}

#[test]
fn disjrules_generator_after_monotonization() {
    let mut r = common::rng(45);
    for _ in 0..20 {
        let n = r.gen_range(1..=2);
        let m = r.gen_range(1..=2);
        let k = r.gen_range(1..=m);
        let xs = common::vars("x", n);
        let ys = common::vars("y", m);
        let all: Vec<VarId> = xs.iter().chain(&ys).cloned().collect();
        let c = common::circuit(&mut r, &all, 4);
        let inst = WqbfInstance::exists_forall(xs, WeightSpec::Free, ys, WeightSpec::Exact(k), c);
        let mono = monotonize_universal(&inst).unwrap();
        let p = gen_disjrules_hard(&mono).unwrap();
        assert_eq!(comp_and_cont(&p).disjunctive_rules.len(), if k * m >= 2 { k } else { 0 });
        assert_eq!(disj_consistent(&p), brute_force_wqbf(&inst).unwrap().is_yes());
    }
}

#[test]
fn disjrules_generator_rejects_negated_universal() {
    let x = VarId::new("x");
    let y = VarId::new("y");
    let mut b = Builder::new();
    let xn = b.input(&x);
    let yn = b.input(&y);
    let ny = b.not(yn);
    let out = b.or2(xn, ny);
    let inst = WqbfInstance::exists_forall(vec![x], WeightSpec::Free, vec![y], WeightSpec::Exact(1), b.finish(out));
    let err = gen_disjrules_hard(&inst).unwrap_err();
    assert!(err.to_string().contains("monotonize_universal"));
}

#[test]
fn contrules_generator_rejects_wide_terms() {
    let mut r = common::rng(46);
    let xs = common::vars("x", 2);
    let ys = common::vars("y", 2);
    let all: Vec<VarId> = xs.iter().chain(&ys).cloned().collect();
    let d = beyondnp_core::logic::Dnf::new(vec![beyondnp_core::logic::Term::new(
        all.iter().map(|v| beyondnp_core::logic::Literal::new(v.clone(), r.gen())).collect(),
    )
    .unwrap()]);
    let inst = WqbfInstance::exists_forall(xs, WeightSpec::Exact(1), ys, WeightSpec::Free, Circuit::from_dnf(&d));
    assert!(gen_contrules_hard(&inst).is_err());
}

#[test]
fn occurrence_limit_examples() {
    let p = parse_program("a :- b.\nb :- not c.").unwrap();
    assert_eq!(limit_atom_occurrences(&p, 3).unwrap(), p);
    let p = parse_program("x | y.\nz :- x.\n:- x, z.\nw :- not x.").unwrap();
    let q = limit_atom_occurrences(&p, 3).unwrap();
    assert!(!q.atom_set().contains(&VarId::new("x")));
    assert_eq!(q.rules.len(), p.rules.len() + 4);
    let occ = atom_occurrences(&q);
    assert!(occ.values().all(|&c| c <= 3));
    let copies: Vec<&VarId> = occ.keys().filter(|a| a.is_fresh()).collect();
    assert_eq!(copies.len(), 4);
    assert!(limit_atom_occurrences(&p, 2).is_err());
}

#[test]
fn occurrence_limit_preserves_consistency() {
    let mut r = common::rng(47);
    let engine = Engine::new();
    for _ in 0..200 {
        let atoms = common::vars("a", r.gen_range(1..=5));
        let p = common::program(&mut r, &atoms, 7, 2);
        let bound = r.gen_range(3..=4);
        let q = limit_atom_occurrences(&p, bound).unwrap();
        assert!(atom_occurrences(&q).values().all(|&c| c <= bound));
        let expected = !brute_force_answer_sets(&p).unwrap().is_empty();
        let got = solve_disj_rules_with(&engine, &q, CandidateSearch::Sat).unwrap();
        assert_eq!(got.is_some(), expected, "{p}\n{q}");
        // answer sets correspond once the copies are folded back
        if q.atoms().len() <= 16 {
            let fold = |m: &AtomSet| -> BTreeSet<String> {
                m.iter()
                    .map(|a| match a.name().strip_prefix('_') {
                        Some(rest) => rest.rsplit_once('_').map_or(rest, |(base, _)| base).to_string(),
                        None => a.name().to_string(),
                    })
                    .collect()
            };
            let before: BTreeSet<BTreeSet<String>> = brute_force_answer_sets(&p).unwrap().iter().map(fold).collect();
            let after: BTreeSet<BTreeSet<String>> = brute_force_answer_sets(&q).unwrap().iter().map(fold).collect();
            assert_eq!(before, after);
        }
    }
}

#[test]
fn gl_reduct_is_negation_free() {
    let mut r = common::rng(48);
    for _ in 0..200 {
        let atoms = common::vars("a", r.gen_range(1..=6));
        let p = common::program(&mut r, &atoms, 7, 2);
        for m in all_subsets(&p.atoms()) {
            let red = gl_reduct(&p, &m);
            assert!(red.rules.iter().all(|r| r.neg.is_empty()));
            assert_eq!(is_model(&red, &m), models_reduct(&p, &m, &m));
        }
    }
}

proptest! {
    #[test]
    fn program_text_roundtrip(seed in any::<u64>(), n in 1usize..6) {
        let mut r = common::rng(seed);
        let atoms = common::vars("a", n);
        let p = common::program(&mut r, &atoms, 8, 3);
        prop_assert_eq!(parse_program(&write_program(&p)).unwrap(), p);
    }

    #[test]
    fn auto_strategy_matches_oracle(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let atoms = common::vars("a", 5);
        let p = common::program(&mut r, &atoms, 6, 2);
        let (found, used) = solve_asp(&Engine::new(), &p, AspStrategy::Auto).unwrap();
        prop_assert_ne!(used, AspStrategy::Auto);
        prop_assert_eq!(found.is_some(), !brute_force_answer_sets(&p).unwrap().is_empty());
    }
}
