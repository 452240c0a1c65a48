//! Deciding weighted two-block quantified instances.

mod enumerate;

use std::fmt;

pub use enumerate::{enumerate_weight_assignments, WeightSets};

use crate::error::Result;
use crate::logic::{Assignment, Builder, Circuit, Compiled, Quant, VarId, WeightSpec, WqbfInstance};
use crate::sat::{Engine, SatResult};

/// Yes/no answer with the leading-block assignment that certifies it, when
/// the leading block is existential (witness) or universal (counterexample).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessedAnswer {
    Yes(Option<Assignment>),
    No(Option<Assignment>),
}

impl WitnessedAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, WitnessedAnswer::Yes(_))
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            WitnessedAnswer::Yes(w) | WitnessedAnswer::No(w) => w.as_ref(),
        }
    }

    fn from_search(outer: Quant, found: Option<Assignment>) -> Self {
        match (outer, found) {
            (Quant::Exists, Some(a)) => WitnessedAnswer::Yes(Some(a)),
            (Quant::Exists, None) => WitnessedAnswer::No(None),
            (Quant::Forall, Some(a)) => WitnessedAnswer::No(Some(a)),
            (Quant::Forall, None) => WitnessedAnswer::Yes(None),
        }
    }
}

impl fmt::Display for WitnessedAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_yes() { "yes" } else { "no" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Enumerate the weighted leading block, one SAT call per candidate.
    EnumerateOuter,
    /// Expand the weighted inner block, one SAT call.
    ExpandInner,
    /// Enumerate the leading block and evaluate the inner expansion.
    EnumerateBoth,
    /// Both blocks free: exponential expansion of the inner block.
    FullExpansion,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::EnumerateOuter => "enumerate-outer",
            Strategy::ExpandInner => "expand-inner",
            Strategy::EnumerateBoth => "enumerate-both",
            Strategy::FullExpansion => "full-expansion (exponential in the inner block)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub answer: WitnessedAnswer,
    pub strategy: Strategy,
    /// Leading-block candidates examined, or inner copies expanded.
    pub candidates: u64,
}

/// Decides `inst` with the default engine.
pub fn solve_wqbf(inst: &WqbfInstance) -> Result<WitnessedAnswer> {
    Ok(solve_wqbf_with(&Engine::default(), inst)?.answer)
}

pub fn strategy_for(inst: &WqbfInstance) -> Strategy {
    match (inst.outer_weight.is_free(), inst.inner_weight.is_free()) {
        (false, true) => Strategy::EnumerateOuter,
        (true, false) => Strategy::ExpandInner,
        (false, false) => Strategy::EnumerateBoth,
        (true, true) => Strategy::FullExpansion,
    }
}

pub fn solve_wqbf_with(engine: &Engine, inst: &WqbfInstance) -> Result<Report> {
    inst.validate()?;
    let strategy = strategy_for(inst);
    let (found, candidates) = match strategy {
        Strategy::EnumerateOuter => enumerate_outer(engine, inst)?,
        Strategy::EnumerateBoth => enumerate_both(engine, inst)?,
        Strategy::ExpandInner | Strategy::FullExpansion => expand_inner_and_solve(engine, inst)?,
    };
    Ok(Report { answer: WitnessedAnswer::from_search(inst.outer_kind, found), strategy, candidates })
}

/// The leading quantifier searches for an assignment that makes the inner
/// block succeed (outer ∃) or fail (outer ∀).
fn wanted(inst: &WqbfInstance) -> bool {
    inst.outer_kind == Quant::Exists
}

fn enumerate_outer(engine: &Engine, inst: &WqbfInstance) -> Result<(Option<Assignment>, u64)> {
    let n = inst.outer_vars.len();
    engine.check_ceiling("leading-block candidates", inst.outer_weight.count(n))?;
    let (lo, hi) = match inst.outer_weight {
        WeightSpec::Exact(k) => (k, k),
        WeightSpec::AtMost(k) => (0, k.min(n)),
        WeightSpec::AtLeast(k) => (k, n),
        _ => return enumerate_outer_flat(engine, inst),
    };
    let mut search = OuterSearch {
        engine,
        inst,
        compiled: inst.matrix.compile(&inst.all_vars())?,
        lo,
        hi,
        seen: 0,
    };
    let found = search.visit(&mut Vec::new(), 0)?;
    Ok((found.map(|set| set_to_assignment(&inst.outer_vars, &set)), search.seen))
}

fn enumerate_outer_flat(engine: &Engine, inst: &WqbfInstance) -> Result<(Option<Assignment>, u64)> {
    let mut seen = 0;
    for alpha in enumerate_weight_assignments(&inst.outer_vars, inst.outer_weight) {
        seen += 1;
        if inner_holds(engine, inst, &alpha)? == wanted(inst) {
            return Ok((Some(alpha), seen));
        }
    }
    Ok((None, seen))
}

/// Depth-first walk of the leading true-sets in the same preorder as
/// [`WeightSets`]. A subtree is skipped when Kleene evaluation of the matrix
/// under the decided prefix already rules out every candidate in it.
struct OuterSearch<'a> {
    engine: &'a Engine,
    inst: &'a WqbfInstance,
    compiled: Compiled,
    lo: usize,
    hi: usize,
    seen: u64,
}

impl OuterSearch<'_> {
    fn partial(&self, set: &[usize], start: usize, closed: bool) -> Vec<Option<bool>> {
        let n = self.inst.outer_vars.len();
        let mut vals = vec![None; n + self.inst.inner_vars.len()];
        for (i, v) in vals.iter_mut().enumerate().take(n) {
            if i < start || closed {
                *v = Some(false);
            }
        }
        for &i in set {
            vals[i] = Some(true);
        }
        vals
    }

    fn visit(&mut self, set: &mut Vec<usize>, start: usize) -> Result<Option<Vec<usize>>> {
        let n = self.inst.outer_vars.len();
        let want = wanted(self.inst);
        if set.len() + (n - start) < self.lo {
            return Ok(None);
        }
        let vals = self.partial(set, start, set.len() == self.hi);
        if self.compiled.eval3(&vals) == Some(!want) {
            return Ok(None);
        }
        if set.len() >= self.lo {
            self.seen += 1;
            let alpha = set_to_assignment(&self.inst.outer_vars, set);
            if inner_holds(self.engine, self.inst, &alpha)? == want {
                return Ok(Some(set.clone()));
            }
        }
        if set.len() < self.hi {
            for i in start..n {
                set.push(i);
                let found = self.visit(set, i + 1)?;
                set.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }
}

/// Truth of the free inner block under `alpha`, by one SAT call unless
/// constant propagation already settles it.
fn inner_holds(engine: &Engine, inst: &WqbfInstance, alpha: &Assignment) -> Result<bool> {
    let reduced = inst.matrix.substitute(alpha).simplify();
    if let Some(b) = reduced.as_const() {
        return Ok(b);
    }
    match inst.inner_kind {
        Quant::Exists => Ok(engine.solve_circuit(&reduced)?.is_sat()),
        Quant::Forall => Ok(!engine.solve_circuit(&reduced.negate())?.is_sat()),
    }
}

fn enumerate_both(engine: &Engine, inst: &WqbfInstance) -> Result<(Option<Assignment>, u64)> {
    let (n, m) = (inst.outer_vars.len(), inst.inner_vars.len());
    let total = inst.outer_weight.count(n).saturating_mul(inst.inner_weight.count(m).max(1));
    engine.check_ceiling("candidate pairs", total)?;
    let order: Vec<VarId> = inst.all_vars();
    let compiled = inst.matrix.compile(&order)?;
    let inner_sets: Vec<Vec<usize>> = WeightSets::new(m, inst.inner_weight).collect();
    let mut vals = vec![false; n + m];
    let mut seen = 0;
    for outer in WeightSets::new(n, inst.outer_weight) {
        seen += 1;
        vals.iter_mut().for_each(|v| *v = false);
        for &i in &outer {
            vals[i] = true;
        }
        let mut eval_inner = |set: &Vec<usize>| {
            vals[n..].iter_mut().for_each(|v| *v = false);
            for &j in set {
                vals[n + j] = true;
            }
            compiled.eval(&vals)
        };
        let holds = match inst.inner_kind {
            Quant::Exists => inner_sets.iter().any(&mut eval_inner),
            Quant::Forall => inner_sets.iter().all(&mut eval_inner),
        };
        if holds == wanted(inst) {
            return Ok((Some(set_to_assignment(&inst.outer_vars, &outer)), seen));
        }
    }
    Ok((None, seen))
}

/// Conjunction (inner ∀) or disjunction (inner ∃) of the matrix over every
/// admissible inner assignment, as a circuit over the leading block. Also
/// returns the number of copies.
pub fn expand_inner(engine: &Engine, inst: &WqbfInstance) -> Result<(Circuit, u64)> {
    let m = inst.inner_vars.len();
    engine.check_ceiling("inner-block expansion", inst.inner_weight.count(m))?;
    let mut b = Builder::new();
    let mut copies = Vec::new();
    for beta in enumerate_weight_assignments(&inst.inner_vars, inst.inner_weight) {
        let node = b.import(&inst.matrix, |b, v| match beta.get(v) {
            Some(val) => b.constant(val),
            None => b.input(v),
        });
        copies.push(node);
    }
    let n = copies.len() as u64;
    let out = match inst.inner_kind {
        Quant::Forall => b.and(copies),
        Quant::Exists => b.or(copies),
    };
    Ok((b.finish(out), n))
}

fn expand_inner_and_solve(engine: &Engine, inst: &WqbfInstance) -> Result<(Option<Assignment>, u64)> {
    let (e, copies) = expand_inner(engine, inst)?;
    let e = e.simplify();
    let target = if wanted(inst) { e } else { e.negate().simplify() };
    let model = match target.as_const() {
        Some(true) => Some(Assignment::new()),
        Some(false) => None,
        None => match engine.solve_circuit(&target)? {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        },
    };
    let found = model.map(|m| {
        Assignment::from_pairs(inst.outer_vars.iter().map(|v| (v.clone(), m.get(v).unwrap_or(false))))
    });
    Ok((found, copies))
}

fn set_to_assignment(vars: &[VarId], set: &[usize]) -> Assignment {
    let mut a = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), false)));
    for &i in set {
        a.set(vars[i].clone(), true);
    }
    a
}

/// Reference answer by enumerating both blocks.
pub fn brute_force_wqbf(inst: &WqbfInstance) -> Result<WitnessedAnswer> {
    brute_force_wqbf_with(&Engine::default(), inst)
}

pub fn brute_force_wqbf_with(engine: &Engine, inst: &WqbfInstance) -> Result<WitnessedAnswer> {
    inst.validate()?;
    engine.check_oracle_bound("brute-force quantified instance", inst.num_vars())?;
    let (n, m) = (inst.outer_vars.len(), inst.inner_vars.len());
    let compiled = inst.matrix.compile(&inst.all_vars())?;
    let mut vals = vec![false; n + m];
    for outer in 0u64..1 << n {
        let w = outer.count_ones() as usize;
        if !inst.outer_weight.admits(w, n) {
            continue;
        }
        let mut ok_exists = false;
        let mut ok_forall = true;
        for inner in 0u64..1 << m {
            if !inst.inner_weight.admits(inner.count_ones() as usize, m) {
                continue;
            }
            for (i, v) in vals.iter_mut().enumerate() {
                *v = if i < n { outer >> i & 1 == 1 } else { inner >> (i - n) & 1 == 1 };
            }
            let r = compiled.eval(&vals);
            ok_exists |= r;
            ok_forall &= r;
        }
        let holds = match inst.inner_kind {
            Quant::Exists => ok_exists,
            Quant::Forall => ok_forall,
        };
        if holds == wanted(inst) {
            let a = Assignment::from_pairs(inst.outer_vars.iter().enumerate().map(|(i, v)| (v.clone(), outer >> i & 1 == 1)));
            return Ok(WitnessedAnswer::from_search(inst.outer_kind, Some(a)));
        }
    }
    Ok(WitnessedAnswer::from_search(inst.outer_kind, None))
}

/// Truth of the inner block under a fixed leading assignment, by exhaustive
/// enumeration of the inner block.
pub fn inner_holds_brute(inst: &WqbfInstance, alpha: &Assignment) -> Result<bool> {
    let reduced = inst.matrix.substitute(alpha);
    let mut exists = false;
    let mut forall = true;
    for beta in enumerate_weight_assignments(&inst.inner_vars, inst.inner_weight) {
        let r = reduced.eval(&beta)?;
        exists |= r;
        forall &= r;
    }
    Ok(match inst.inner_kind {
        Quant::Exists => exists,
        Quant::Forall => forall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VarId {
        VarId::new(s)
    }

    #[test]
    fn exact_one_example_is_no() {
        // ∃¹{x1,x2} ∀{y}. (x1 ∧ y) ∨ (x2 ∧ ¬y)
        let mut b = Builder::new();
        let x1 = b.input(&v("x1"));
        let x2 = b.input(&v("x2"));
        let y = b.input(&v("y"));
        let ny = b.not(y);
        let t1 = b.and2(x1, y);
        let t2 = b.and2(x2, ny);
        let o = b.or2(t1, t2);
        let inst = WqbfInstance::exists_forall(
            vec![v("x1"), v("x2")],
            WeightSpec::Exact(1),
            vec![v("y")],
            WeightSpec::Free,
            b.finish(o),
        );
        assert!(!solve_wqbf(&inst).unwrap().is_yes());
        assert!(!brute_force_wqbf(&inst).unwrap().is_yes());
    }

    #[test]
    fn single_var_witness() {
        let inst = WqbfInstance::exists_forall(
            vec![v("x")],
            WeightSpec::Exact(1),
            vec![],
            WeightSpec::Free,
            Circuit::var(&v("x")),
        );
        let ans = solve_wqbf(&inst).unwrap();
        assert_eq!(ans, WitnessedAnswer::Yes(Some(Assignment::from_pairs([(v("x"), true)]))));
    }

    #[test]
    fn constant_matrices() {
        for c in [true, false] {
            let inst = WqbfInstance::exists_forall(
                vec![v("x"), v("z")],
                WeightSpec::AtMost(1),
                vec![v("y")],
                WeightSpec::Exact(1),
                Circuit::constant(c),
            );
            assert_eq!(brute_force_wqbf(&inst).unwrap().is_yes(), c);
            assert_eq!(solve_wqbf(&inst).unwrap().is_yes(), c);
        }
    }

    #[test]
    fn expansion_copies_match_binomial() {
        let ys: Vec<VarId> = (0..5).map(|i| v(&format!("y{i}"))).collect();
        let inst = WqbfInstance::exists_forall(
            vec![v("x")],
            WeightSpec::Free,
            ys.clone(),
            WeightSpec::Exact(2),
            Circuit::var(&ys[0]),
        );
        let (_, copies) = expand_inner(&Engine::default(), &inst).unwrap();
        assert_eq!(copies, 10);
    }

    #[test]
    fn ceiling_is_enforced() {
        let xs: Vec<VarId> = (0..12).map(|i| v(&format!("x{i}"))).collect();
        let inst = WqbfInstance::exists_forall(
            xs.clone(),
            WeightSpec::AtLeast(0),
            vec![],
            WeightSpec::Free,
            Circuit::var(&xs[0]),
        );
        let e = Engine::default().with_ceiling(100);
        assert!(matches!(solve_wqbf_with(&e, &inst), Err(crate::Error::Ceiling { .. })));
    }
}
