//! Robust constraint satisfaction: the `∀^k∃*` encoding and the hardness
//! generator from weighted QBF with a 3CNF matrix.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::logic::{binomial, Builder, Circuit, Clause, Cnf, Fresh, Literal, NodeId, Quant, VarId, WeightSpec, WqbfInstance};
use crate::reductions::{complement_outer_weight, pad_exact_offweight};
use crate::sat::tseitin_cnf;
use crate::wqbf::solve_wqbf_with;
use crate::Engine;

/// A constraint over variable indices; `allowed` holds tuples of domain
/// indices, sorted and without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub allowed: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    pub variables: Vec<String>,
    pub domain: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(variables: Vec<String>, domain: Vec<String>, constraints: Vec<Constraint>) -> Result<Self> {
        let mut csp = CspInstance { variables, domain, constraints };
        for c in &mut csp.constraints {
            c.allowed.sort();
            c.allowed.dedup();
        }
        csp.validate()?;
        Ok(csp)
    }

    pub fn validate(&self) -> Result<()> {
        let names: HashSet<&str> = self.variables.iter().map(String::as_str).collect();
        if names.len() != self.variables.len() {
            return Err(Error::Invalid("duplicate variable".into()));
        }
        let values: HashSet<&str> = self.domain.iter().map(String::as_str).collect();
        if values.len() != self.domain.len() {
            return Err(Error::Invalid("duplicate domain value".into()));
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            let scope: HashSet<usize> = c.scope.iter().copied().collect();
            if scope.len() != c.scope.len() || c.scope.iter().any(|&v| v >= self.variables.len()) {
                return Err(Error::Invalid(format!("constraint {} has a bad scope", ci + 1)));
            }
            for t in &c.allowed {
                if t.len() != c.scope.len() || t.iter().any(|&d| d >= self.domain.len()) {
                    return Err(Error::Invalid(format!("constraint {} has a bad tuple", ci + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Whether a total assignment (one domain index per variable) satisfies
    /// every constraint.
    pub fn is_solution(&self, values: &[usize]) -> bool {
        self.constraints.iter().all(|c| {
            let t: Vec<usize> = c.scope.iter().map(|&v| values[v]).collect();
            c.allowed.binary_search(&t).is_ok()
        })
    }
}

impl fmt::Display for CspInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "var {}", self.variables.join(" "))?;
        writeln!(f, "dom {}", self.domain.join(" "))?;
        for c in &self.constraints {
            let scope: Vec<&str> = c.scope.iter().map(|&v| self.variables[v].as_str()).collect();
            let mut line = format!("con ({}) :", scope.join(","));
            for t in &c.allowed {
                let vals: Vec<&str> = t.iter().map(|&d| self.domain[d].as_str()).collect();
                let _ = write!(line, " ({})", vals.join(","));
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | ':' | '#'))
}

/// Parses `(a,b) (c,d)` into tuples of trimmed items.
fn parse_tuples(line: usize, s: &str) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::parse(line, format!("expected `(` at `{rest}`")))?;
        let close = body.find(')').ok_or_else(|| Error::parse(line, "missing `)`"))?;
        let inner = body[..close].trim();
        let items: Vec<String> = if inner.is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(|t| t.trim().to_string()).collect()
        };
        if let Some(bad) = items.iter().find(|t| !valid_token(t)) {
            return Err(Error::parse(line, format!("invalid item `{bad}`")));
        }
        out.push(items);
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

/// Reads `var`, `dom` and `con` lines; `#` starts a comment.
pub fn parse_csp(text: &str) -> Result<CspInstance> {
    let mut variables: Vec<String> = Vec::new();
    let mut domain: Vec<String> = Vec::new();
    let mut raw: Vec<(usize, Vec<String>, Vec<Vec<String>>)> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "var" | "dom" => {
                let target = if kw == "var" { &mut variables } else { &mut domain };
                for t in rest.split_whitespace() {
                    if !valid_token(t) {
                        return Err(Error::parse(line, format!("invalid name `{t}`")));
                    }
                    if target.iter().any(|x| x == t) {
                        return Err(Error::parse(line, format!("`{t}` declared twice")));
                    }
                    target.push(t.to_string());
                }
            }
            "con" => {
                let (scope, tuples) =
                    rest.split_once(':').ok_or_else(|| Error::parse(line, "expected `con (scope) : tuples`"))?;
                let mut scope = parse_tuples(line, scope)?;
                if scope.len() != 1 {
                    return Err(Error::parse(line, "expected exactly one scope tuple"));
                }
                raw.push((line, scope.pop().expect("one scope"), parse_tuples(line, tuples)?));
            }
            other => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
        }
    }
    let mut constraints = Vec::new();
    for (line, scope, tuples) in raw {
        let scope = scope
            .iter()
            .map(|v| variables.iter().position(|x| x == v).ok_or_else(|| Error::parse(line, format!("undeclared variable `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        if scope.iter().collect::<HashSet<_>>().len() != scope.len() {
            return Err(Error::parse(line, "scope repeats a variable"));
        }
        let mut allowed = Vec::new();
        for t in tuples {
            if t.len() != scope.len() {
                return Err(Error::parse(line, format!("tuple arity {} does not match scope arity {}", t.len(), scope.len())));
            }
            allowed.push(
                t.iter()
                    .map(|d| domain.iter().position(|x| x == d).ok_or_else(|| Error::parse(line, format!("undeclared value `{d}`"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        constraints.push(Constraint { scope, allowed });
    }
    CspInstance::new(variables, domain, constraints)
}

pub fn write_csp(csp: &CspInstance) -> String {
    csp.to_string()
}

/// Outcome of a robustness check. A counterexample is a non-violating
/// partial instantiation (variable index, value index) with no extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustReport {
    pub robust: bool,
    pub counterexample: Option<Vec<(usize, usize)>>,
}

fn grid(prefix: &str, n: usize, m: usize) -> Vec<Vec<VarId>> {
    (1..=n).map(|i| (1..=m).map(|j| VarId::new(&format!("{prefix}{i}_{j}"))).collect()).collect()
}

/// `∀^k Z ∃Y. (proper(Z) ∧ ¬violate(Z)) → (corr ∧ proper(Y) ∧ ⋀_c ψ_c)` with
/// `z^i_j` / `y^i_j` meaning "variable i takes value j".
pub fn robust_csp_instance(csp: &CspInstance, k: usize) -> Result<WqbfInstance> {
    csp.validate()?;
    let n = csp.variables.len();
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds the {n} variables")));
    }
    let m = csp.domain.len();
    let zv = grid("z", n, m);
    let yv = grid("y", n, m);
    let mut b = Builder::new();
    let z: Vec<Vec<NodeId>> = zv.iter().map(|row| row.iter().map(|v| b.input(v)).collect()).collect();
    let y: Vec<Vec<NodeId>> = yv.iter().map(|row| row.iter().map(|v| b.input(v)).collect()).collect();

    let at_most_one = |b: &mut Builder, row: &[NodeId]| -> Vec<NodeId> {
        let mut out = Vec::new();
        for j in 0..row.len() {
            for j2 in j + 1..row.len() {
                let a = b.not(row[j]);
                let c = b.not(row[j2]);
                out.push(b.or2(a, c));
            }
        }
        out
    };
    let z_proper_parts: Vec<NodeId> = z.iter().flat_map(|row| at_most_one(&mut b, row)).collect();
    let z_proper = b.and_simpl(z_proper_parts);

    let mut violations = Vec::new();
    for c in &csp.constraints {
        let mut per_tuple = Vec::new();
        for t in &c.allowed {
            let blockers: Vec<NodeId> = c
                .scope
                .iter()
                .zip(t)
                .flat_map(|(&i, &d)| (0..m).filter(move |&j| j != d).map(move |j| (i, j)))
                .map(|(i, j)| z[i][j])
                .collect();
            per_tuple.push(b.or_simpl(blockers));
        }
        violations.push(b.and_simpl(per_tuple));
    }
    let violate = b.or_simpl(violations);
    let not_violate = b.not_simpl(violate);
    let premise = b.and_simpl(vec![z_proper, not_violate]);

    let mut goal = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let nz = b.not(z[i][j]);
            goal.push(b.or2(nz, y[i][j]));
        }
    }
    for row in &y {
        goal.push(b.or_simpl(row.clone()));
        goal.extend(at_most_one(&mut b, row));
    }
    for c in &csp.constraints {
        let tuples: Vec<NodeId> = c
            .allowed
            .iter()
            .map(|t| {
                let lits = c.scope.iter().zip(t).map(|(&i, &d)| y[i][d]).collect();
                b.and_simpl(lits)
            })
            .collect();
        goal.push(b.or_simpl(tuples));
    }
    let conclusion = b.and_simpl(goal);
    let not_premise = b.not_simpl(premise);
    let out = b.or_simpl(vec![not_premise, conclusion]);
    Ok(WqbfInstance::forall_exists(
        zv.into_iter().flatten().collect(),
        WeightSpec::Exact(k),
        yv.into_iter().flatten().collect(),
        WeightSpec::Free,
        b.finish(out),
    ))
}

pub fn robust_csp_check_with(engine: &Engine, csp: &CspInstance, k: usize) -> Result<RobustReport> {
    let inst = robust_csp_instance(csp, k)?;
    let report = solve_wqbf_with(engine, &inst)?;
    let m = csp.domain.len();
    let counterexample = report.answer.witness().filter(|_| !report.answer.is_yes()).map(|a| {
        inst.outer_vars
            .iter()
            .enumerate()
            .filter(|(_, v)| a.get(v) == Some(true))
            .map(|(idx, _)| (idx / m, idx % m))
            .collect()
    });
    Ok(RobustReport { robust: report.answer.is_yes(), counterexample })
}

pub fn robust_csp_check(csp: &CspInstance, k: usize) -> Result<bool> {
    Ok(robust_csp_check_with(&Engine::default(), csp, k)?.robust)
}

/// Generator output with the structural quantities the construction bounds.
#[derive(Clone, Debug)]
pub struct RobustCspHard {
    pub csp: CspInstance,
    pub k: usize,
    /// Longest clause behind a constraint; at most `3(k+1)`.
    pub max_clause_len: usize,
    /// Largest `|σ(l)|`; at most `C(2k+1, k+1)`.
    pub max_sigma: usize,
}

fn forall_exact_exists_free(inst: &WqbfInstance) -> Result<usize> {
    match (inst.outer_kind, inst.outer_weight, inst.inner_weight) {
        (Quant::Forall, WeightSpec::Exact(k), WeightSpec::Free) => Ok(k),
        _ => Err(Error::Precondition("expected ∀ with exact weight over ∃ free".into())),
    }
}

/// Brings `∀^k X ∃Y. ψ` into the shape the generator expects: off-weight
/// assignments of `X` are made false by the padding gadget, and the matrix is
/// turned into 3CNF in which every clause has an existential literal. When
/// `2k > |X|` the leading block is complemented first, so the result has
/// `|X| ≥ 2k`.
pub fn robust_csp_source(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let k = forall_exact_exists_free(inst)?;
    let n = inst.outer_vars.len();
    let padded = if 2 * k > n && k <= n {
        let flipped = WqbfInstance { outer_weight: WeightSpec::ExactComplement(n - k), ..inst.clone() };
        pad_exact_offweight(&complement_outer_weight(&flipped)?)?
    } else {
        pad_exact_offweight(inst)?
    };
    let mut taken: Vec<VarId> = padded.all_vars();
    taken.extend(padded.matrix.inputs());
    let mut fresh = Fresh::avoiding(taken.iter());
    let cnf = match padded.matrix.to_cnf() {
        Some(c) => c,
        None => {
            let (c, _) = tseitin_cnf(&padded.matrix);
            c
        }
    };
    let mut inner_vars = padded.inner_vars.clone();
    let known: HashSet<VarId> = padded.all_vars().into_iter().collect();
    for v in cnf.vars() {
        if !known.contains(&v) {
            inner_vars.push(v);
        }
    }
    // Clauses over X alone get both polarities of one shared existential `w`.
    let outer: HashSet<&VarId> = padded.outer_vars.iter().collect();
    let mut w: Option<VarId> = None;
    let mut clauses = Vec::new();
    for c in cnf.clauses {
        if c.literals().iter().all(|l| outer.contains(&l.var)) {
            let w = w.get_or_insert_with(|| {
                let v = fresh.var("w");
                inner_vars.push(v.clone());
                v
            });
            for positive in [true, false] {
                let mut lits = c.literals().to_vec();
                lits.push(Literal::new(w.clone(), positive));
                split_clause(&lits, &mut fresh, &mut inner_vars, &mut clauses);
            }
        } else {
            split_clause(c.literals(), &mut fresh, &mut inner_vars, &mut clauses);
        }
    }
    Ok(WqbfInstance { inner_vars, matrix: Circuit::from_cnf(&Cnf::new(clauses)), ..padded })
}

fn split_clause(lits: &[Literal], fresh: &mut Fresh, aux: &mut Vec<VarId>, out: &mut Vec<Clause>) {
    if lits.len() <= 3 {
        out.push(Clause::new(lits.to_vec()).expect("clause literals are consistent"));
        return;
    }
    let mut carry = Literal::pos(fresh.var("s"));
    aux.push(carry.var.clone());
    out.push(Clause::new(vec![lits[0].clone(), lits[1].clone(), carry.clone()]).expect("fresh auxiliary"));
    let mut i = 2;
    while lits.len() - i > 2 {
        let next = Literal::pos(fresh.var("s"));
        aux.push(next.var.clone());
        out.push(Clause::new(vec![carry.negated(), lits[i].clone(), next.clone()]).expect("fresh auxiliary"));
        carry = next;
        i += 1;
    }
    out.push(Clause::new(vec![carry.negated(), lits[i].clone(), lits[i + 1].clone()]).expect("fresh auxiliary"));
}

/// Boolean CSP that is `k`-robustly satisfiable iff `∀^k X ∃Y. ψ` holds.
/// Each existential variable gets `2k+1` copies read by majority.
///
/// The input must be false under every off-weight assignment of `X` (see
/// [`robust_csp_source`]) and have `|X| ≥ 2k`.
pub fn gen_robust_csp_hard(inst: &WqbfInstance) -> Result<RobustCspHard> {
    let k = forall_exact_exists_free(inst)?;
    if inst.outer_vars.len() < 2 * k {
        return Err(Error::Precondition(format!("need at least 2k = {} universal variables", 2 * k)));
    }
    let cnf = match inst.matrix.to_cnf() {
        Some(c) if c.clauses.iter().all(|c| (1..=3).contains(&c.len())) => c,
        _ => return Err(Error::Precondition("matrix is not in 3CNF with nonempty clauses".into())),
    };
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut variables: Vec<String> = Vec::new();
    let mut index: HashMap<VarId, Vec<usize>> = HashMap::new();
    let claim = |names: &mut BTreeSet<String>, variables: &mut Vec<String>, base: String| -> usize {
        let mut name = base;
        while !names.insert(name.clone()) {
            name.push('\'');
        }
        variables.push(name);
        variables.len() - 1
    };
    for x in &inst.outer_vars {
        let i = claim(&mut names, &mut variables, x.name().to_string());
        index.insert(x.clone(), vec![i]);
    }
    let copies = 2 * k + 1;
    for y in &inst.inner_vars {
        let ids = (1..=copies).map(|i| claim(&mut names, &mut variables, format!("{}^{i}", y.name()))).collect();
        index.insert(y.clone(), ids);
    }

    let sigma = |l: &Literal| -> Result<Vec<Vec<(usize, bool)>>> {
        let ids = index
            .get(&l.var)
            .ok_or_else(|| Error::Invalid(format!("matrix variable `{}` is not quantified", l.var)))?;
        if ids.len() == 1 && inst.outer_vars.contains(&l.var) {
            return Ok(vec![vec![(ids[0], l.positive)]]);
        }
        Ok(subsets(ids.len(), k + 1)
            .into_iter()
            .map(|s| s.into_iter().map(|i| (ids[i], l.positive)).collect())
            .collect())
    };

    let mut max_sigma = 0;
    let mut max_clause_len = 0;
    let mut constraints = Vec::new();
    for c in &cnf.clauses {
        let sets = c.literals().iter().map(&sigma).collect::<Result<Vec<_>>>()?;
        max_sigma = max_sigma.max(sets.iter().map(Vec::len).max().unwrap_or(0));
        let mut product: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
        for set in &sets {
            product = product
                .iter()
                .flat_map(|p| set.iter().map(move |d| p.iter().chain(d).copied().collect()))
                .collect();
        }
        for clause in product {
            max_clause_len = max_clause_len.max(clause.len());
            constraints.push(clause_constraint(&clause));
        }
    }
    let csp = CspInstance::new(variables, vec!["0".into(), "1".into()], constraints)?;
    debug_assert!(max_clause_len <= 3 * (k + 1));
    debug_assert!(max_sigma as u128 <= binomial(2 * k + 1, k + 1).max(1));
    Ok(RobustCspHard { csp, k, max_clause_len, max_sigma })
}

/// Constraint allowing exactly the Boolean tuples that satisfy the clause.
fn clause_constraint(clause: &[(usize, bool)]) -> Constraint {
    let r = clause.len();
    let allowed = (0u32..1 << r)
        .map(|mask| (0..r).map(|i| ((mask >> (r - 1 - i)) & 1) as usize).collect::<Vec<_>>())
        .filter(|t| clause.iter().zip(t).any(|(&(_, pos), &v)| (v == 1) == pos))
        .collect();
    Constraint { scope: clause.iter().map(|&(v, _)| v).collect(), allowed }
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    go(0, n, r, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csp(text: &str) -> CspInstance {
        parse_csp(text).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert!(robust_csp_check(&csp("var x\ndom 0 1\n"), 1).unwrap());
        let neq = csp("var x y\ndom 0 1\ncon (x,y) : (0,1) (1,0)\n");
        assert!(robust_csp_check(&neq, 1).unwrap());
        let clash = csp(
            "var x y z\ndom 0 1\ncon (y,x) : (0,0) (1,1)\ncon (z,x) : (0,0) (1,1)\ncon (y,z) : (0,1) (1,0)\n",
        );
        let r = robust_csp_check_with(&Engine::default(), &clash, 1).unwrap();
        assert!(!r.robust);
        assert_eq!(r.counterexample.unwrap().len(), 1);
    }

    #[test]
    fn text_roundtrip() {
        let text = "var x y\ndom a b c\ncon (x,y) : (a,b) (c,a)\ncon () : ()\n";
        let c = csp(text);
        assert_eq!(write_csp(&c), text);
        assert!(parse_csp("var x\ndom 0\ncon (x,y) : (0,0)\n").is_err());
        assert!(parse_csp("var x\ndom 0\ncon (x) : (0,0)\n").is_err());
    }

    #[test]
    fn clause_constraints_list_satisfying_tuples() {
        let c = clause_constraint(&[(0, true), (1, false)]);
        assert_eq!(c.allowed, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert_eq!(subsets(4, 2).len(), 6);
    }
}
