//! DNF minimization and shortest implicant cores.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::logic::{Builder, Circuit, Dnf, Fresh, Literal, NodeId, Term, VarId, WeightSpec, WqbfInstance};
use crate::wqbf::solve_wqbf_with;
use crate::Engine;

/// Decides `a ≡ b` with two unsatisfiability queries.
pub fn equivalent(engine: &Engine, a: &Circuit, b: &Circuit) -> Result<bool> {
    for (p, q) in [(a, b), (b, a)] {
        let mut bl = Builder::new();
        let pn = bl.embed(p);
        let qn = bl.embed(q);
        let nq = bl.not(qn);
        let out = bl.and2(pn, nq);
        if engine.solve_circuit(&bl.finish(out))?.is_sat() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the conjunction `t` entails `phi`.
pub fn is_implicant(engine: &Engine, phi: &Dnf, t: &Term) -> Result<bool> {
    let mut b = Builder::new();
    let lits: Vec<NodeId> = t.literals().iter().map(|l| b.literal(l)).collect();
    let tn = b.and_simpl(lits);
    let pn = b.embed(&Circuit::from_dnf(phi));
    let np = b.not(pn);
    let out = b.and2(tn, np);
    Ok(!engine.solve_circuit(&b.finish(out))?.is_sat())
}

/// Occurrence `(term, position)` behind each selector variable.
pub type Occurrences = Vec<(usize, usize)>;

/// `∃^k S ∀X. φ_S ↔ φ`: selector `s_{t,ℓ}` deletes the `ℓ`-th literal of
/// term `t`; a term that loses every literal is dropped.
pub fn dnf_min_reduction_instance(phi: &Dnf, k: usize) -> (WqbfInstance, Occurrences) {
    let xs = phi.vars();
    let mut fresh = Fresh::avoiding(xs.iter());
    let mut occ = Vec::new();
    let mut sel = Vec::new();
    for (t, term) in phi.terms.iter().enumerate() {
        for l in 0..term.len() {
            occ.push((t, l));
            sel.push(fresh.var(&format!("s{}_{}", t + 1, l + 1)));
        }
    }
    let mut b = Builder::new();
    let mut next = 0;
    let mut terms = Vec::new();
    for term in &phi.terms {
        let mut kept = Vec::new();
        let mut deleted = Vec::new();
        for l in term.literals() {
            let s = b.input(&sel[next]);
            next += 1;
            let lit = b.literal(l);
            kept.push(b.or2(s, lit));
            deleted.push(s);
        }
        let all_gone = b.and_simpl(deleted);
        let survives = b.not_simpl(all_gone);
        kept.push(survives);
        terms.push(b.and_simpl(kept));
    }
    let reduced = b.or_simpl(terms);
    let original = b.embed(&Circuit::from_dnf(phi));
    let out = b.iff(reduced, original);
    let inst = WqbfInstance::exists_forall(sel, WeightSpec::Exact(k), xs, WeightSpec::Free, b.finish(out));
    (inst, occ)
}

/// Deletes the given occurrences, drops emptied terms and merges duplicates.
pub fn delete_occurrences(phi: &Dnf, deleted: &BTreeSet<(usize, usize)>) -> Dnf {
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for (t, term) in phi.terms.iter().enumerate() {
        let lits: Vec<Literal> = term
            .literals()
            .iter()
            .enumerate()
            .filter(|(l, _)| !deleted.contains(&(t, *l)))
            .map(|(_, lit)| lit.clone())
            .collect();
        if lits.is_empty() {
            continue;
        }
        let key: BTreeSet<Literal> = lits.iter().cloned().collect();
        if seen.insert(key) {
            terms.push(Term::new(lits).expect("subterm of a consistent term"));
        }
    }
    Dnf::new(terms)
}

/// Some removal of exactly `k` literal occurrences keeping `φ` equivalent;
/// returns the reduced formula.
pub fn dnf_min_reduction_with(engine: &Engine, phi: &Dnf, k: usize) -> Result<Option<Dnf>> {
    if k > phi.size() {
        return Ok(None);
    }
    let (inst, occ) = dnf_min_reduction_instance(phi, k);
    let report = solve_wqbf_with(engine, &inst)?;
    if !report.answer.is_yes() {
        return Ok(None);
    }
    let a = report.answer.witness().expect("existential yes carries a witness");
    let deleted = inst
        .outer_vars
        .iter()
        .zip(&occ)
        .filter(|(s, _)| a.get(s) == Some(true))
        .map(|(_, &o)| o)
        .collect();
    Ok(Some(delete_occurrences(phi, &deleted)))
}

pub fn dnf_min_reduction(phi: &Dnf, k: usize) -> Result<bool> {
    Ok(dnf_min_reduction_with(&Engine::default(), phi, k)?.is_some())
}

/// Consistent terms over `vars` with 1..=`max` literals, in canonical order:
/// by width, then by variable positions, then by polarity pattern.
fn candidate_terms(vars: &[VarId], max: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for w in 1..=max.min(vars.len()) {
        let mut pick = Vec::new();
        fn go(vars: &[VarId], start: usize, w: usize, pick: &mut Vec<usize>, out: &mut Vec<Term>) {
            if pick.len() == w {
                for signs in 0u32..1 << w {
                    let lits = pick
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| Literal::new(vars[v].clone(), signs >> (w - 1 - i) & 1 == 0))
                        .collect();
                    out.push(Term::new(lits).expect("distinct variables"));
                }
                return;
            }
            for v in start..vars.len() {
                pick.push(v);
                go(vars, v + 1, w, pick, out);
                pick.pop();
            }
        }
        go(vars, 0, w, &mut pick, &mut out);
    }
    out
}

/// Number of sets of distinct terms (from `sizes`) with sizes summing to `k`.
fn count_selections(sizes: &[usize], k: usize) -> u128 {
    let mut ways = vec![0u128; k + 1];
    ways[0] = 1;
    for &s in sizes {
        for total in (s..=k).rev() {
            ways[total] = ways[total].saturating_add(ways[total - s]);
        }
    }
    ways[k]
}

/// Some DNF over `Var(φ)` of size exactly `k` (distinct nonempty terms)
/// equivalent to `φ`. Candidate terms are restricted to implicants of `φ`;
/// each candidate formula costs two unsatisfiability queries.
pub fn dnf_min_core_with(engine: &Engine, phi: &Dnf, k: usize) -> Result<Option<Dnf>> {
    let vars = phi.vars();
    let target = Circuit::from_dnf(phi);
    let mut pool = Vec::new();
    for t in candidate_terms(&vars, k) {
        if is_implicant(engine, phi, &t)? {
            pool.push(t);
        }
    }
    let sizes: Vec<usize> = pool.iter().map(Term::len).collect();
    engine.check_ceiling("size-k DNF candidates", count_selections(&sizes, k))?;
    let mut chosen = Vec::new();
    search(engine, &pool, &target, 0, k, &mut chosen)
}

fn search(
    engine: &Engine,
    pool: &[Term],
    target: &Circuit,
    start: usize,
    left: usize,
    chosen: &mut Vec<usize>,
) -> Result<Option<Dnf>> {
    if left == 0 {
        let cand = Dnf::new(chosen.iter().map(|&i| pool[i].clone()).collect());
        return Ok(if equivalent(engine, &Circuit::from_dnf(&cand), target)? { Some(cand) } else { None });
    }
    for i in start..pool.len() {
        if pool[i].len() > left {
            continue;
        }
        chosen.push(i);
        let found = search(engine, pool, target, i + 1, left - pool[i].len(), chosen)?;
        chosen.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

pub fn dnf_min_core(phi: &Dnf, k: usize) -> Result<bool> {
    Ok(dnf_min_core_with(&Engine::default(), phi, k)?.is_some())
}

/// `∃^m S ∀X. (⋀_ℓ s_ℓ → ℓ) → φ` over the literals of `C`.
pub fn implicant_core_instance(phi: &Dnf, c: &Term, m: usize) -> WqbfInstance {
    let mut xs = phi.vars();
    for l in c.literals() {
        if !xs.contains(&l.var) {
            xs.push(l.var.clone());
        }
    }
    let mut fresh = Fresh::avoiding(xs.iter());
    let sel: Vec<VarId> = (1..=c.len()).map(|i| fresh.var(&format!("s{i}"))).collect();
    let mut b = Builder::new();
    let mut guards = Vec::new();
    for (s, l) in sel.iter().zip(c.literals()) {
        let sn = b.input(s);
        let ln = b.literal(l);
        guards.push(b.implies(sn, ln));
    }
    let chosen = b.and_simpl(guards);
    let target = b.embed(&Circuit::from_dnf(phi));
    let out = b.implies(chosen, target);
    WqbfInstance::exists_forall(sel, WeightSpec::Exact(m), xs, WeightSpec::Free, b.finish(out))
}

/// Some `C′ ⊆ C` with `|C′| = m` entailing `φ`. `C` must itself entail `φ`.
pub fn implicant_core_with(engine: &Engine, phi: &Dnf, c: &Term, m: usize) -> Result<Option<Term>> {
    if m > c.len() {
        return Err(Error::Precondition(format!("m = {m} exceeds |C| = {}", c.len())));
    }
    if !is_implicant(engine, phi, c)? {
        return Err(Error::Precondition("C is not an implicant of φ".into()));
    }
    let inst = implicant_core_instance(phi, c, m);
    let report = solve_wqbf_with(engine, &inst)?;
    if !report.answer.is_yes() {
        return Ok(None);
    }
    let a = report.answer.witness().expect("existential yes carries a witness");
    let lits = inst
        .outer_vars
        .iter()
        .zip(c.literals())
        .filter(|(s, _)| a.get(s) == Some(true))
        .map(|(_, l)| l.clone())
        .collect();
    Ok(Some(Term::new(lits).expect("subterm of a consistent term")))
}

pub fn implicant_core(phi: &Dnf, c: &Term, m: usize) -> Result<bool> {
    Ok(implicant_core_with(&Engine::default(), phi, c, m)?.is_some())
}
