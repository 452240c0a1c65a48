#![allow(dead_code)]

pub mod apps;
pub mod fo;

use beyondnp_core::logic::{Builder, Circuit, Clause, Cnf, Dnf, Literal, NodeId, Quant, Term, VarId, WeightSpec, WqbfInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vars(prefix: &str, n: usize) -> Vec<VarId> {
    (1..=n).map(|i| VarId::new(&format!("{prefix}{i}"))).collect()
}

/// Random circuit over `inputs` with `gates` internal gates of fan-in 1..=4.
pub fn circuit(r: &mut impl Rng, inputs: &[VarId], gates: usize) -> Circuit {
    let mut b = Builder::new();
    let mut nodes: Vec<NodeId> = inputs.iter().map(|v| b.input(v)).collect();
    if nodes.is_empty() || r.gen_bool(0.05) {
        nodes.push(b.constant(r.gen()));
    }
    for _ in 0..gates {
        let kind = r.gen_range(0..5);
        let n = if kind == 0 { 1 } else { r.gen_range(1..=4usize.min(nodes.len()).max(1)) };
        let kids: Vec<NodeId> = (0..n).map(|_| nodes[r.gen_range(0..nodes.len())]).collect();
        let g = match kind {
            0 => b.not(kids[0]),
            1 | 2 => b.and(kids),
            _ => b.or(kids),
        };
        nodes.push(g);
    }
    b.finish(*nodes.last().unwrap())
}

pub fn weight(r: &mut impl Rng, n: usize, kmax: usize) -> WeightSpec {
    let k = r.gen_range(0..=kmax.min(n));
    match r.gen_range(0..5) {
        0 => WeightSpec::Exact(k),
        1 => WeightSpec::AtMost(k),
        2 => WeightSpec::AtLeast(k),
        3 => WeightSpec::ExactComplement(k),
        _ => WeightSpec::Free,
    }
}

/// Random instance with the given quantifier order and weights drawn by `w1`/`w2`.
pub fn instance(
    r: &mut impl Rng,
    outer: Quant,
    n: usize,
    w1: WeightSpec,
    m: usize,
    w2: WeightSpec,
    gates: usize,
) -> WqbfInstance {
    let xs = vars("x", n);
    let ys = vars("y", m);
    let all: Vec<VarId> = xs.iter().chain(&ys).cloned().collect();
    let matrix = circuit(r, &all, gates);
    let mut inst = WqbfInstance::exists_forall(xs, w1, ys, w2, matrix);
    if outer == Quant::Forall {
        inst.outer_kind = Quant::Forall;
        inst.inner_kind = Quant::Exists;
    }
    inst
}

/// Instance with ≤ `max_vars` variables and weight bounds ≤ `kmax`.
pub fn any_instance(r: &mut impl Rng, outer: Quant, max_vars: usize, kmax: usize) -> WqbfInstance {
    let n = r.gen_range(0..=max_vars.min(6));
    let m = r.gen_range(0..=max_vars - n);
    let w1 = weight(r, n, kmax);
    let w2 = weight(r, m, kmax);
    let gates = r.gen_range(1..=12);
    instance(r, outer, n, w1, m, w2, gates)
}

pub fn literal(r: &mut impl Rng, vs: &[VarId]) -> Literal {
    Literal::new(vs.choose(r).unwrap().clone(), r.gen())
}

fn distinct_literals(r: &mut impl Rng, vs: &[VarId], width: usize) -> Vec<Literal> {
    let mut picked: Vec<VarId> = vs.to_vec();
    picked.shuffle(r);
    picked.truncate(width.min(vs.len()));
    picked.into_iter().map(|v| Literal::new(v, r.gen())).collect()
}

pub fn dnf(r: &mut impl Rng, vs: &[VarId], terms: usize, max_width: usize) -> Dnf {
    Dnf::new(
        (0..terms)
            .map(|_| {
                let w = r.gen_range(1..=max_width);
                Term::new(distinct_literals(r, vs, w)).unwrap()
            })
            .collect(),
    )
}

pub fn cnf(r: &mut impl Rng, vs: &[VarId], clauses: usize, max_width: usize) -> Cnf {
    Cnf::new(
        (0..clauses)
            .map(|_| {
                let w = r.gen_range(1..=max_width);
                Clause::new(distinct_literals(r, vs, w)).unwrap()
            })
            .collect(),
    )
}

/// Random program over `atoms` with up to `max_rules` rules and heads of at
/// most `max_head` atoms. Seeds `w ← not w` now and then.
pub fn program(r: &mut impl Rng, atoms: &[VarId], max_rules: usize, max_head: usize) -> beyondnp_core::asp::Program {
    use beyondnp_core::asp::{Program, Rule};
    let pick = |r: &mut ChaCha8Rng, n: usize| -> Vec<VarId> { (0..n).map(|_| atoms.choose(r).unwrap().clone()).collect() };
    let mut local = ChaCha8Rng::seed_from_u64(r.gen());
    let n_rules = r.gen_range(1..=max_rules);
    let mut rules = Vec::new();
    for _ in 0..n_rules {
        if local.gen_bool(0.12) {
            let w = atoms.choose(&mut local).unwrap().clone();
            rules.push(Rule::new(vec![w.clone()], vec![], vec![w]));
            continue;
        }
        let h = local.gen_range(0..=max_head);
        let h = if h == 0 && local.gen_bool(0.5) { 1 } else { h };
        let p = local.gen_range(0..=2);
        let n = if local.gen_bool(0.5) { 0 } else { local.gen_range(0..=2) };
        let head = pick(&mut local, h);
        let pos = pick(&mut local, p);
        let neg = pick(&mut local, n);
        rules.push(Rule::new(head, pos, neg));
    }
    Program::new(rules)
}
