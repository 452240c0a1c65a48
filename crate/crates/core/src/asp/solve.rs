use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::program::{Program, Rule};
use super::semantics::{
    brute_force_answer_sets_with, comp_and_cont, is_answer_set_with, minimality_cnf, models_reduct, AtomSet, ParamReport,
};
use crate::error::{Error, Result};
use crate::logic::{Builder, Cnf, Fresh, NodeId, VarId, WeightSpec, WqbfInstance};
use crate::sat::{Engine, SatResult};
use crate::wqbf::solve_wqbf_with;

fn candidates_over(k: usize) -> u128 {
    if k >= 127 {
        u128::MAX
    } else {
        1u128 << k
    }
}

fn subset(atoms: &[VarId], bits: u128) -> impl Iterator<Item = &VarId> {
    atoms.iter().enumerate().filter(move |(i, _)| bits >> i & 1 == 1).map(|(_, a)| a)
}

/// Tries `Comp(P) ∪ N` for every `N ⊆ Cont(P)`, one SAT query per candidate
/// that models its reduct. Returns the first answer set found.
pub fn solve_cont_atoms_with(engine: &Engine, p: &Program) -> Result<Option<AtomSet>> {
    let params = comp_and_cont(p);
    let cont: Vec<VarId> = params.cont.iter().cloned().collect();
    engine.check_ceiling("contingent atom candidates", candidates_over(cont.len()))?;
    for bits in 0..candidates_over(cont.len()) {
        let mut m = params.comp.clone();
        m.extend(subset(&cont, bits).cloned());
        if is_answer_set_with(engine, p, &m)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

pub fn solve_cont_atoms(p: &Program) -> Result<bool> {
    Ok(solve_cont_atoms_with(&Engine::new(), p)?.is_some())
}

/// Single CNF, satisfiable iff `P` has no answer set: the conjunction over
/// all `N ⊆ Cont(P)` of variable-disjoint copies of the minimality-violation
/// formula for `Comp(P) ∪ N`, omitted (⊤) when the candidate is no model of
/// its reduct.
pub fn cont_atoms_formula(engine: &Engine, p: &Program) -> Result<Cnf> {
    let params = comp_and_cont(p);
    let cont: Vec<VarId> = params.cont.iter().cloned().collect();
    engine.check_ceiling("contingent atom candidates", candidates_over(cont.len()))?;
    let mut fresh = Fresh::avoiding(p.atom_set().iter());
    let mut clauses = Vec::new();
    for bits in 0..candidates_over(cont.len()) {
        let mut m = params.comp.clone();
        m.extend(subset(&cont, bits).cloned());
        if !models_reduct(p, &m, &m) {
            continue;
        }
        let f = minimality_cnf(p, &m, |a| fresh.var(&format!("m{bits}_{}", a.name().trim_start_matches('_'))));
        clauses.extend(f.clauses);
    }
    Ok(Cnf::new(clauses))
}

/// `ψ_P(z, z′)`: true iff the set read from `z` models the reduct of `P`
/// by the set read from `z′`.
fn psi_p(b: &mut Builder, p: &Program, z: &HashMap<VarId, NodeId>, zp: &HashMap<VarId, NodeId>) -> NodeId {
    let rules = p
        .rules
        .iter()
        .map(|r| {
            let mut parts: Vec<NodeId> = r.neg.iter().map(|a| zp[a]).collect();
            parts.extend(r.pos.iter().map(|a| b.not(z[a])));
            parts.extend(r.head.iter().map(|a| z[a]));
            b.or(parts)
        })
        .collect();
    b.and(rules)
}

/// `∃X ∀(Y ∪ Z ∪ W). ψ` with weight `k` on `X`, the number of contingent
/// rules. Also returns, per variable of `X`, the head atom it selects.
pub fn cont_rules_encoding(p: &Program) -> (WqbfInstance, Vec<(VarId, Option<VarId>)>) {
    let params = comp_and_cont(p);
    let atoms = p.atoms();
    let mut fresh = Fresh::avoiding(atoms.iter());
    let mut b = Builder::new();

    let mut selectors: Vec<(VarId, Option<VarId>)> = Vec::new();
    let mut rows: Vec<Vec<(NodeId, Option<VarId>)>> = Vec::new();
    for (i, &r) in params.contingent_rules.iter().enumerate() {
        let head = &p.rules[r].head;
        let row = (0..=head.len())
            .map(|j| {
                let v = fresh.var(&format!("x{}_{j}", i + 1));
                let sel = (j > 0).then(|| head[j - 1].clone());
                selectors.push((v.clone(), sel.clone()));
                (b.input(&v), sel)
            })
            .collect();
        rows.push(row);
    }
    let triple = |b: &mut Builder, fresh: &mut Fresh, role: &str| -> HashMap<VarId, NodeId> {
        atoms.iter().map(|a| (a.clone(), b.input(&fresh.var(role)))).collect()
    };
    let y = triple(&mut b, &mut fresh, "y");
    let z = triple(&mut b, &mut fresh, "z");
    let w = triple(&mut b, &mut fresh, "w");

    let mut psi_x = Vec::new();
    for row in &rows {
        psi_x.push(b.or(row.iter().map(|(n, _)| *n).collect()));
        for j in 0..row.len() {
            for j2 in j + 1..row.len() {
                let a = b.not(row[j].0);
                let c = b.not(row[j2].0);
                psi_x.push(b.or2(a, c));
            }
        }
    }
    let psi_x = b.and(psi_x);

    let mut psi_y1 = Vec::new();
    for (n, sel) in rows.iter().flatten() {
        if let Some(a) = sel {
            let ny = b.not(y[a]);
            psi_y1.push(b.and2(*n, ny));
        }
    }
    for a in &atoms {
        if params.cont.contains(a) {
            let mut conj = vec![y[a]];
            for (n, sel) in rows.iter().flatten() {
                if sel.as_ref() == Some(a) {
                    conj.push(b.not(*n));
                }
            }
            psi_y1.push(b.and(conj));
        } else {
            psi_y1.push(b.not(y[a]));
        }
    }
    let psi_y1 = b.or(psi_y1);
    let psi_y2 = psi_p(&mut b, p, &y, &y);

    let psi_w = atoms
        .iter()
        .map(|a| {
            let same = b.iff(y[a], z[a]);
            b.iff(w[a], same)
        })
        .collect();
    let psi_w = b.or(psi_w);

    let min1 = atoms
        .iter()
        .map(|a| {
            let ny = b.not(y[a]);
            b.and2(z[a], ny)
        })
        .collect();
    let min1 = b.or(min1);
    let min2 = atoms.iter().map(|a| b.not(w[a])).collect();
    let min2 = b.and(min2);
    let zy = psi_p(&mut b, p, &z, &y);
    let min3 = b.not(zy);
    let psi_min = b.or(vec![min1, min2, min3]);

    let left = b.or(vec![psi_y1, psi_w, psi_min]);
    let right = b.or2(psi_y1, psi_y2);
    let out = b.and(vec![psi_x, left, right]);

    let inner: Vec<VarId> = [&y, &z, &w].iter().flat_map(|m| atoms.iter().map(|a| var_of(&b, m[a]))).collect();
    let inst = WqbfInstance::exists_forall(
        selectors.iter().map(|(v, _)| v.clone()).collect(),
        WeightSpec::Exact(params.contingent_rules.len()),
        inner,
        WeightSpec::Free,
        b.finish(out),
    );
    (inst, selectors)
}

fn var_of(b: &Builder, n: NodeId) -> VarId {
    match b.gate(n) {
        crate::logic::Gate::Input(v) => v.clone(),
        _ => unreachable!("triple nodes are inputs"),
    }
}

/// Decides consistency through the weighted encoding; the witness on `X`
/// yields the answer set `Comp(P) ∪ Rng(μ)`.
pub fn solve_cont_rules_with(engine: &Engine, p: &Program) -> Result<Option<AtomSet>> {
    let (inst, selectors) = cont_rules_encoding(p);
    let report = solve_wqbf_with(engine, &inst)?;
    Ok(report.answer.witness().map(|alpha| {
        let mut m = comp_and_cont(p).comp;
        for (v, sel) in &selectors {
            if let (Some(a), Some(true)) = (sel, alpha.get(v)) {
                m.insert(a.clone());
            }
        }
        m
    }))
}

pub fn solve_cont_rules(p: &Program) -> Result<bool> {
    Ok(solve_cont_rules_with(&Engine::new(), p)?.is_some())
}

/// How the disjunctive-rules solver guesses the candidate `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateSearch {
    /// Enumeration when `|Atoms(P)| ≤ 20`, SAT otherwise.
    Auto,
    Enumerate,
    Sat,
}

/// Largest atom count for which candidates are enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

/// Program over atom indices.
struct Indexed {
    atoms: Vec<VarId>,
    rules: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    /// Per disjunctive rule, its head atom indices.
    disj: Vec<usize>,
}

impl Indexed {
    fn new(p: &Program, params: &ParamReport) -> Self {
        let atoms = p.atoms();
        let index: HashMap<&VarId, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let ix = |xs: &[VarId]| xs.iter().map(|a| index[a]).collect::<Vec<_>>();
        let rules = p.rules.iter().map(|r: &Rule| (ix(&r.head), ix(&r.pos), ix(&r.neg))).collect();
        Indexed { rules, disj: params.disjunctive_rules.clone(), atoms }
    }

    /// Every `(R, μ)`: per disjunctive rule, `None` (not in `R`) or a head
    /// position.
    fn mus(&self) -> Vec<Vec<Option<usize>>> {
        let mut out = vec![Vec::new()];
        for &r in &self.disj {
            let heads = &self.rules[r].0;
            out = out
                .into_iter()
                .flat_map(|mu: Vec<Option<usize>>| {
                    std::iter::once(None).chain(heads.iter().map(|&a| Some(a))).map(move |c| {
                        let mut m = mu.clone();
                        m.push(c);
                        m
                    })
                })
                .collect();
        }
        out
    }

    fn mu_count(&self) -> u128 {
        self.disj.iter().map(|&r| self.rules[r].0.len() as u128 + 1).try_fold(1u128, |acc, x| acc.checked_mul(x)).unwrap_or(u128::MAX)
    }

    fn models(&self, m: &[bool], s: &[bool]) -> bool {
        self.rules.iter().all(|(h, pos, neg)| neg.iter().any(|&a| m[a]) || !pos.iter().all(|&a| s[a]) || h.iter().any(|&a| s[a]))
    }

    /// Least set containing `Rng(μ)` closed under the normal rules of `P^m`.
    fn fixpoint(&self, m: &[bool], mu: &[Option<usize>]) -> Vec<bool> {
        let mut cur = vec![false; self.atoms.len()];
        for a in mu.iter().flatten() {
            cur[*a] = true;
        }
        loop {
            let mut changed = false;
            for (h, pos, neg) in &self.rules {
                if h.len() == 1 && !cur[h[0]] && neg.iter().all(|&a| !m[a]) && pos.iter().all(|&a| cur[a]) {
                    cur[h[0]] = true;
                    changed = true;
                }
            }
            if !changed {
                return cur;
            }
        }
    }

    /// `m` models its reduct and no `M_μ ⊊ m` does.
    fn accepts(&self, m: &[bool], mus: &[Vec<Option<usize>>]) -> bool {
        self.models(m, m)
            && mus.iter().all(|mu| {
                let s = self.fixpoint(m, mu);
                let proper = s.iter().zip(m).all(|(&x, &y)| !x || y) && s != m;
                !(proper && self.models(m, &s))
            })
    }

    fn set(&self, m: &[bool]) -> AtomSet {
        self.atoms.iter().zip(m).filter(|(_, &b)| b).map(|(a, _)| a.clone()).collect()
    }
}

/// Guess-and-check over `M`, verifying minimality through all `(R, μ)`
/// pairs over the disjunctive rules.
pub fn solve_disj_rules_with(engine: &Engine, p: &Program, search: CandidateSearch) -> Result<Option<AtomSet>> {
    let params = comp_and_cont(p);
    let ix = Indexed::new(p, &params);
    engine.check_ceiling("(R, μ) pairs", ix.mu_count())?;
    let n = ix.atoms.len();
    let enumerate = match search {
        CandidateSearch::Auto => n <= ENUMERATION_LIMIT,
        CandidateSearch::Enumerate => true,
        CandidateSearch::Sat => false,
    };
    let mus = ix.mus();
    if enumerate {
        engine.check_ceiling("candidate sets", candidates_over(n))?;
        for bits in 0..candidates_over(n) {
            let m: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            if ix.accepts(&m, &mus) {
                return Ok(Some(ix.set(&m)));
            }
        }
        return Ok(None);
    }
    let c = disj_rules_circuit(&ix, &mus);
    match engine.solve_circuit(&c)? {
        SatResult::Unsat => Ok(None),
        SatResult::Sat(model) => {
            let m: Vec<bool> = ix.atoms.iter().map(|a| model.get(a).unwrap_or(false)).collect();
            if !ix.accepts(&m, &mus) {
                return Err(Error::External("candidate from the SAT encoding failed verification".into()));
            }
            Ok(Some(ix.set(&m)))
        }
    }
}

/// Circuit over the atoms, satisfied exactly by the answer sets. The
/// fixpoint `M_μ` is unrolled for `|Atoms|` stages.
fn disj_rules_circuit(ix: &Indexed, mus: &[Vec<Option<usize>>]) -> crate::logic::Circuit {
    let n = ix.atoms.len();
    let mut b = Builder::new();
    let m: Vec<NodeId> = ix.atoms.iter().map(|a| b.input(a)).collect();
    let active: Vec<NodeId> = ix
        .rules
        .iter()
        .map(|(_, _, neg)| {
            let off = neg.iter().map(|&a| b.not(m[a])).collect();
            b.and_simpl(off)
        })
        .collect();
    let models = |b: &mut Builder, s: &[NodeId]| {
        let per_rule = ix
            .rules
            .iter()
            .zip(&active)
            .map(|((h, pos, _), &act)| {
                let mut parts = vec![b.not_simpl(act)];
                parts.extend(pos.iter().map(|&a| b.not_simpl(s[a])));
                parts.extend(h.iter().map(|&a| s[a]));
                b.or_simpl(parts)
            })
            .collect();
        b.and_simpl(per_rule)
    };
    let mut top = vec![models(&mut b, &m)];
    for mu in mus {
        let mut cur: Vec<NodeId> = (0..n).map(|a| b.constant(mu.contains(&Some(a)))).collect();
        for _ in 0..n {
            let mut next = cur.clone();
            for (r, (h, pos, _)) in ix.rules.iter().enumerate() {
                if h.len() != 1 {
                    continue;
                }
                let mut conj = vec![active[r]];
                conj.extend(pos.iter().map(|&a| cur[a]));
                let fire = b.and_simpl(conj);
                next[h[0]] = b.or_simpl(vec![next[h[0]], fire]);
            }
            cur = next;
        }
        let within = (0..n)
            .map(|a| {
                let out = b.not_simpl(cur[a]);
                b.or_simpl(vec![out, m[a]])
            })
            .collect();
        let within = b.and_simpl(within);
        let missing = (0..n)
            .map(|a| {
                let out = b.not_simpl(cur[a]);
                b.and_simpl(vec![m[a], out])
            })
            .collect();
        let missing = b.or_simpl(missing);
        let smaller_model = models(&mut b, &cur);
        let witness = b.and_simpl(vec![within, missing, smaller_model]);
        top.push(b.not_simpl(witness));
    }
    let out = b.and_simpl(top);
    b.finish(out)
}

pub fn solve_disj_rules(p: &Program) -> Result<bool> {
    Ok(solve_disj_rules_with(&Engine::new(), p, CandidateSearch::Auto)?.is_some())
}

/// Consistency strategy for the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AspStrategy {
    Auto,
    ContAtoms,
    ContRules,
    DisjRules,
    Brute,
}

impl FromStr for AspStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => AspStrategy::Auto,
            "cont-atoms" => AspStrategy::ContAtoms,
            "cont-rules" => AspStrategy::ContRules,
            "disj-rules" => AspStrategy::DisjRules,
            "brute" => AspStrategy::Brute,
            _ => return Err(Error::Invalid(format!("unknown strategy `{s}`"))),
        })
    }
}

impl fmt::Display for AspStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AspStrategy::Auto => "auto",
            AspStrategy::ContAtoms => "cont-atoms",
            AspStrategy::ContRules => "cont-rules",
            AspStrategy::DisjRules => "disj-rules",
            AspStrategy::Brute => "brute",
        })
    }
}

/// Strategy with the smallest parameter; ties go to contingent atoms, then
/// contingent rules.
pub fn choose_strategy(params: &ParamReport) -> AspStrategy {
    let options = [
        (params.cont.len(), AspStrategy::ContAtoms),
        (params.contingent_rules.len(), AspStrategy::ContRules),
        (params.disjunctive_rules.len(), AspStrategy::DisjRules),
    ];
    options.iter().min_by_key(|(k, _)| *k).map(|&(_, s)| s).expect("three options")
}

/// Decides consistency with `strategy`; returns an answer set if one exists
/// and the strategy that ran.
pub fn solve_asp(engine: &Engine, p: &Program, strategy: AspStrategy) -> Result<(Option<AtomSet>, AspStrategy)> {
    let strategy = match strategy {
        AspStrategy::Auto => choose_strategy(&comp_and_cont(p)),
        s => s,
    };
    let found = match strategy {
        AspStrategy::ContAtoms => solve_cont_atoms_with(engine, p)?,
        AspStrategy::ContRules => solve_cont_rules_with(engine, p)?,
        AspStrategy::DisjRules => solve_disj_rules_with(engine, p, CandidateSearch::Auto)?,
        AspStrategy::Brute => brute_force_answer_sets_with(engine, p)?.into_iter().next(),
        AspStrategy::Auto => unreachable!(),
    };
    Ok((found, strategy))
}
