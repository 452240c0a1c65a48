//! Random instances and exhaustive oracles for the application problems.

use std::collections::BTreeSet;

use beyondnp_core::apps::{Constraint, CspInstance, Graph, PrenexQbf};
use beyondnp_core::logic::{Assignment, Circuit, Dnf, Literal, Quant, Term, VarId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn csp(r: &mut impl Rng, max_vars: usize, max_dom: usize, max_cons: usize) -> CspInstance {
    let n = r.gen_range(1..=max_vars);
    let d = r.gen_range(1..=max_dom);
    let variables = (1..=n).map(|i| format!("v{i}")).collect();
    let domain = (0..d).map(|i| i.to_string()).collect();
    let mut constraints = Vec::new();
    for _ in 0..r.gen_range(0..=max_cons) {
        let arity = r.gen_range(1..=2usize.min(n));
        let mut scope: Vec<usize> = (0..n).collect();
        scope.shuffle(r);
        scope.truncate(arity);
        let total = d.pow(arity as u32);
        let allowed = (0..total)
            .filter(|_| r.gen_bool(0.55))
            .map(|code| (0..arity).map(|i| code / d.pow((arity - 1 - i) as u32) % d).collect())
            .collect();
        constraints.push(Constraint { scope, allowed });
    }
    CspInstance::new(variables, domain, constraints).unwrap()
}

fn consistent(c: &Constraint, vals: &[Option<usize>]) -> bool {
    c.allowed.iter().any(|t| c.scope.iter().zip(t).all(|(&v, &d)| vals[v].map_or(true, |x| x == d)))
}

fn extends(csp: &CspInstance, vals: &mut Vec<Option<usize>>, next: usize) -> bool {
    if csp.constraints.iter().any(|c| c.scope.iter().all(|&v| vals[v].is_some()) && !consistent(c, vals)) {
        return false;
    }
    if next == vals.len() {
        return true;
    }
    if vals[next].is_some() {
        return extends(csp, vals, next + 1);
    }
    for d in 0..csp.domain.len() {
        vals[next] = Some(d);
        if extends(csp, vals, next + 1) {
            vals[next] = None;
            return true;
        }
    }
    vals[next] = None;
    false
}

pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Every size-`k` partial instantiation that violates no constraint extends
/// to a solution.
pub fn robust_oracle(csp: &CspInstance, k: usize) -> bool {
    let n = csp.variables.len();
    let d = csp.domain.len();
    for vars in k_subsets(n, k) {
        for code in 0..d.pow(k as u32) {
            let mut vals = vec![None; n];
            for (i, &v) in vars.iter().enumerate() {
                vals[v] = Some(code / d.pow((k - 1 - i) as u32) % d);
            }
            if csp.constraints.iter().any(|c| !consistent(c, &vals)) {
                continue;
            }
            if !extends(csp, &mut vals, 0) {
                return false;
            }
        }
    }
    true
}

pub fn graph(r: &mut impl Rng, max_vertices: usize, density: f64) -> Graph {
    let n = r.gen_range(1..=max_vertices);
    let mut g = Graph::new((0..n).map(|i| format!("n{i}")).collect()).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(density) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

/// Graph with pendant vertices hung off a random core, so leaves exist.
pub fn graph_with_leaves(r: &mut impl Rng, core: usize, pendants: usize, density: f64) -> Graph {
    let mut g = Graph::new((0..core + pendants).map(|i| format!("n{i}")).collect()).unwrap();
    for a in 0..core {
        for b in a + 1..core {
            if r.gen_bool(density) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    for p in core..core + pendants {
        g.add_edge(p, r.gen_range(0..core)).unwrap();
    }
    g
}

fn is_clique(g: &Graph, s: &[usize]) -> bool {
    s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

pub fn clique_oracle(g: &Graph, vprime: &[usize], k: usize) -> bool {
    let n = g.vertices.len();
    for mask in 0u32..1 << vprime.len() {
        let c: Vec<usize> = (0..vprime.len()).filter(|i| mask >> i & 1 == 1).map(|i| vprime[i]).collect();
        if !is_clique(g, &c) {
            continue;
        }
        let ok = k_subsets(n, k).into_iter().any(|d| {
            if d.iter().any(|v| c.contains(v)) {
                return false;
            }
            let mut all = c.clone();
            all.extend(d);
            is_clique(g, &all)
        });
        if !ok {
            return false;
        }
    }
    true
}

pub fn coloring_oracle(g: &Graph, m: usize) -> bool {
    let n = g.vertices.len();
    let leaves: Vec<usize> = (0..n).filter(|&v| g.degree(v) == 1).collect();
    let proper: Vec<Vec<u8>> = (0..3usize.pow(n as u32))
        .map(|code| (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as u8).collect::<Vec<u8>>())
        .filter(|c| g.edges.iter().all(|&(a, b)| c[a] != c[b]))
        .collect();
    for subset in k_subsets(leaves.len(), m) {
        for code in 0..3usize.pow(m as u32) {
            let pre: Vec<(usize, u8)> =
                subset.iter().enumerate().map(|(i, &j)| (leaves[j], (code / 3usize.pow(i as u32) % 3) as u8)).collect();
            if !proper.iter().any(|c| pre.iter().all(|&(v, col)| c[v] == col)) {
                return false;
            }
        }
    }
    true
}

/// Truth table of `f` over `vars` (bit `i` of the row index is `vars[i]`).
pub fn truth_table(vars: &[VarId], f: impl Fn(&Assignment) -> bool) -> Vec<bool> {
    (0u32..1 << vars.len())
        .map(|row| f(&Assignment::from_pairs(vars.iter().enumerate().map(|(i, v)| (v.clone(), row >> i & 1 == 1)))))
        .collect()
}

fn term_holds(t: &[Literal], a: &Assignment) -> bool {
    t.iter().all(|l| a.get(&l.var) == Some(l.positive))
}

fn dnf_holds(terms: &[Vec<Literal>], a: &Assignment) -> bool {
    terms.iter().any(|t| term_holds(t, a))
}

fn lits(phi: &Dnf) -> Vec<Vec<Literal>> {
    phi.terms.iter().map(|t| t.literals().to_vec()).collect()
}

/// Removal of exactly `k` occurrences (emptied terms dropped) keeping `φ`.
pub fn dnf_reduction_oracle(phi: &Dnf, k: usize) -> bool {
    let vars = phi.vars();
    let original = lits(phi);
    let target = truth_table(&vars, |a| dnf_holds(&original, a));
    let occ: Vec<(usize, usize)> =
        original.iter().enumerate().flat_map(|(t, ls)| (0..ls.len()).map(move |l| (t, l))).collect();
    if k > occ.len() {
        return false;
    }
    k_subsets(occ.len(), k).into_iter().any(|del| {
        let del: BTreeSet<(usize, usize)> = del.into_iter().map(|i| occ[i]).collect();
        let reduced: Vec<Vec<Literal>> = original
            .iter()
            .enumerate()
            .map(|(t, ls)| ls.iter().enumerate().filter(|(l, _)| !del.contains(&(t, *l))).map(|(_, x)| x.clone()).collect())
            .filter(|ls: &Vec<Literal>| !ls.is_empty())
            .collect();
        truth_table(&vars, |a| dnf_holds(&reduced, a)) == target
    })
}

/// Some set of distinct nonempty terms over `Var(φ)` of total size `k` with
/// the truth table of `φ`.
pub fn dnf_core_oracle(phi: &Dnf, k: usize) -> bool {
    let vars = phi.vars();
    let target = truth_table(&vars, |a| dnf_holds(&lits(phi), a));
    let n = vars.len();
    let mut terms: Vec<Vec<Literal>> = Vec::new();
    for code in 1..3usize.pow(n as u32) {
        let t: Vec<Literal> = (0..n)
            .filter_map(|i| match code / 3usize.pow(i as u32) % 3 {
                1 => Some(Literal::pos(vars[i].clone())),
                2 => Some(Literal::neg(vars[i].clone())),
                _ => None,
            })
            .collect();
        if t.len() <= k {
            terms.push(t);
        }
    }
    fn go(terms: &[Vec<Literal>], start: usize, left: usize, cur: &mut Vec<Vec<Literal>>, vars: &[VarId], target: &[bool]) -> bool {
        if left == 0 {
            return truth_table(vars, |a| dnf_holds(cur, a)) == target;
        }
        for i in start..terms.len() {
            if terms[i].len() <= left {
                cur.push(terms[i].clone());
                let hit = go(terms, i + 1, left - terms[i].len(), cur, vars, target);
                cur.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }
    go(&terms, 0, k, &mut Vec::new(), &vars, &target)
}

pub fn implicant_oracle(phi: &Dnf, c: &Term, m: usize) -> bool {
    let mut vars = phi.vars();
    for l in c.literals() {
        if !vars.contains(&l.var) {
            vars.push(l.var.clone());
        }
    }
    let phi_l = lits(phi);
    k_subsets(c.len(), m).into_iter().any(|s| {
        let sub: Vec<Literal> = s.into_iter().map(|i| c.literals()[i].clone()).collect();
        truth_table(&vars, |a| !term_holds(&sub, a) || dnf_holds(&phi_l, a)).into_iter().all(|b| b)
    })
}

/// Recursive evaluation of a prenex QBF, one variable at a time.
pub fn qbf_oracle(phi: &PrenexQbf) -> bool {
    let order: Vec<(Quant, VarId)> =
        phi.blocks.iter().flat_map(|(q, vs)| vs.iter().map(move |v| (*q, v.clone()))).collect();
    fn go(c: &Circuit, order: &[(Quant, VarId)], a: &mut Assignment) -> bool {
        let Some(((q, v), rest)) = order.split_first() else {
            return c.eval(a).unwrap();
        };
        let branch = |b: bool, a: &mut Assignment| {
            a.set(v.clone(), b);
            go(c, rest, a)
        };
        match q {
            Quant::Exists => branch(false, a) || branch(true, a),
            Quant::Forall => branch(false, a) && branch(true, a),
        }
    }
    go(&phi.matrix, &order, &mut Assignment::new())
}

/// Random prenex QBF over `n` variables with at most `kmax` universals.
pub fn prenex(r: &mut impl Rng, n: usize, kmax: usize, gates: usize) -> PrenexQbf {
    let vars = super::vars("q", n);
    let k = r.gen_range(0..=kmax.min(n));
    let mut kinds: Vec<Quant> = (0..n).map(|i| if i < k { Quant::Forall } else { Quant::Exists }).collect();
    kinds.shuffle(r);
    let mut blocks: Vec<(Quant, Vec<VarId>)> = Vec::new();
    for (v, q) in vars.iter().zip(kinds) {
        match blocks.last_mut() {
            Some((last, vs)) if *last == q => vs.push(v.clone()),
            _ => blocks.push((q, vec![v.clone()])),
        }
    }
    PrenexQbf::new(blocks, super::circuit(r, &vars, gates)).unwrap()
}
