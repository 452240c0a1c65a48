//! Graph problems: small clique extension through `∀*∃^k` and 3-coloring
//! extension to the leaves through one SAT query per pre-coloring.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::logic::{binomial, Builder, Clause, Cnf, Literal, NodeId, VarId, WeightSpec, WqbfInstance};
use crate::wqbf::solve_wqbf_with;
use crate::Engine;

/// Undirected simple graph; edges are stored as `(min, max)` index pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>) -> Result<Self> {
        if vertices.iter().collect::<HashSet<_>>().len() != vertices.len() {
            return Err(Error::Invalid("duplicate vertex".into()));
        }
        Ok(Graph { vertices, edges: BTreeSet::new() })
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.vertices.len();
        if a >= n || b >= n {
            return Err(Error::Invalid(format!("edge ({a}, {b}) leaves the vertex set")));
        }
        if a == b {
            return Err(Error::Invalid(format!("self-loop on `{}`", self.vertices[a])));
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Degree-1 vertices in index order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertices.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        (0..deg.len()).filter(|&v| deg[v] == 1).collect()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v {}", self.vertices.join(" "))?;
        for &(a, b) in &self.edges {
            writeln!(f, "e {} {}", self.vertices[a], self.vertices[b])?;
        }
        Ok(())
    }
}

/// Reads `v <names…>` and `e <a> <b>` lines; `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g = Graph::default();
    let mut pending = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "v" => {
                for t in &toks[1..] {
                    if g.vertex(t).is_some() {
                        return Err(Error::parse(line, format!("vertex `{t}` declared twice")));
                    }
                    g.vertices.push(t.to_string());
                }
            }
            "e" if toks.len() == 3 => pending.push((line, toks[1].to_string(), toks[2].to_string())),
            "e" => return Err(Error::parse(line, "edge line needs two endpoints")),
            other => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
        }
    }
    for (line, a, b) in pending {
        let ia = g.vertex(&a).ok_or_else(|| Error::parse(line, format!("undeclared vertex `{a}`")))?;
        let ib = g.vertex(&b).ok_or_else(|| Error::parse(line, format!("undeclared vertex `{b}`")))?;
        g.add_edge(ia, ib).map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    g.to_string()
}

fn vertex_vars(prefix: &str, ids: &[usize]) -> Vec<VarId> {
    ids.iter().map(|&v| VarId::new(&format!("{prefix}{}", v + 1))).collect()
}

/// `∀Y ∃^k X. C₁ ∨ (C₂ ∧ C₃)` over `y_v` for `v ∈ V′` and `x_v` for `v ∈ V`.
/// Non-edges are unordered pairs of distinct vertices.
pub fn clique_extension_instance(g: &Graph, vprime: &[usize], k: usize) -> Result<WqbfInstance> {
    let n = g.vertices.len();
    let vp: BTreeSet<usize> = vprime.iter().copied().collect();
    if vp.len() != vprime.len() || vp.iter().any(|&v| v >= n) {
        return Err(Error::Precondition("V′ must be a set of vertices".into()));
    }
    let vp: Vec<usize> = vp.into_iter().collect();
    let all: Vec<usize> = (0..n).collect();
    let yv = vertex_vars("y", &vp);
    let xv = vertex_vars("x", &all);
    let mut b = Builder::new();
    let mut y: Vec<Option<NodeId>> = vec![None; n];
    for (&v, var) in vp.iter().zip(&yv) {
        y[v] = Some(b.input(var));
    }
    let x: Vec<NodeId> = xv.iter().map(|v| b.input(v)).collect();

    let mut c1 = Vec::new();
    for (i, &a) in vp.iter().enumerate() {
        for &c in &vp[i + 1..] {
            if !g.has_edge(a, c) {
                c1.push(b.and2(y[a].expect("in V′"), y[c].expect("in V′")));
            }
        }
    }
    let c1 = b.or_simpl(c1);
    let mut c2 = Vec::new();
    for &v in &vp {
        let ny = b.not(y[v].expect("in V′"));
        let nx = b.not(x[v]);
        c2.push(b.or2(ny, nx));
    }
    let c2 = b.and_simpl(c2);
    let theta = |v: usize| -> Vec<NodeId> { std::iter::once(x[v]).chain(y[v]).collect() };
    let mut c3 = Vec::new();
    for a in 0..n {
        for c in a + 1..n {
            if g.has_edge(a, c) {
                continue;
            }
            for z1 in theta(a) {
                for z2 in theta(c) {
                    let n1 = b.not(z1);
                    let n2 = b.not(z2);
                    c3.push(b.or2(n1, n2));
                }
            }
        }
    }
    let c3 = b.and_simpl(c3);
    let rest = b.and_simpl(vec![c2, c3]);
    let out = b.or_simpl(vec![c1, rest]);
    Ok(WqbfInstance::forall_exists(yv, WeightSpec::Free, xv, WeightSpec::Exact(k), b.finish(out)))
}

/// Outcome of the clique-extension check; a counterexample is a clique of
/// `V′` with no extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueExtReport {
    pub holds: bool,
    pub counterexample: Option<Vec<usize>>,
}

pub fn clique_extension_check_with(engine: &Engine, g: &Graph, vprime: &[usize], k: usize) -> Result<CliqueExtReport> {
    let inst = clique_extension_instance(g, vprime, k)?;
    let report = solve_wqbf_with(engine, &inst)?;
    let mut sorted: Vec<usize> = vprime.to_vec();
    sorted.sort_unstable();
    let counterexample = report.answer.witness().filter(|_| !report.answer.is_yes()).map(|a| {
        sorted
            .iter()
            .zip(&inst.outer_vars)
            .filter(|(_, var)| a.get(var) == Some(true))
            .map(|(&v, _)| v)
            .collect()
    });
    Ok(CliqueExtReport { holds: report.answer.is_yes(), counterexample })
}

pub fn clique_extension_check(g: &Graph, vprime: &[usize], k: usize) -> Result<bool> {
    Ok(clique_extension_check_with(&Engine::default(), g, vprime, k)?.holds)
}

/// A pre-coloring: (vertex, color in `1..=3`).
pub type PreColoring = Vec<(usize, u8)>;

/// Every pre-coloring of exactly `m` leaves, subsets in lexicographic order
/// and colors in odometer order.
pub fn leaf_precolorings(g: &Graph, m: usize) -> Result<Vec<PreColoring>> {
    let leaves = g.leaves();
    if m > leaves.len() {
        return Err(Error::Precondition(format!("m = {m} exceeds the {} leaves", leaves.len())));
    }
    let mut out = Vec::new();
    let mut subset = Vec::new();
    fn go(leaves: &[usize], start: usize, m: usize, subset: &mut Vec<usize>, out: &mut Vec<PreColoring>) {
        if subset.len() == m {
            for code in 0..3usize.pow(m as u32) {
                let mut c = code;
                let mut coloring: PreColoring = subset.iter().map(|&v| (v, 0)).collect();
                for slot in coloring.iter_mut().rev() {
                    slot.1 = (c % 3) as u8 + 1;
                    c /= 3;
                }
                out.push(coloring);
            }
            return;
        }
        for i in start..leaves.len() {
            subset.push(leaves[i]);
            go(leaves, i + 1, m, subset, out);
            subset.pop();
        }
    }
    go(&leaves, 0, m, &mut subset, &mut out);
    Ok(out)
}

/// CNF satisfiable iff `pre` extends to a proper 3-coloring; variables are
/// `<prefix><vertex>_<color>`.
pub fn coloring_extension_cnf(g: &Graph, pre: &[(usize, u8)], prefix: &str) -> Cnf {
    let n = g.vertices.len();
    let col: Vec<[VarId; 3]> = (0..n)
        .map(|v| std::array::from_fn(|c| VarId::new(&format!("{prefix}{}_{}", v + 1, c + 1))))
        .collect();
    let clause = |lits: Vec<Literal>| Clause::new(lits).expect("distinct color variables");
    let mut clauses = Vec::new();
    for cs in &col {
        clauses.push(clause(cs.iter().cloned().map(Literal::pos).collect()));
        for a in 0..3 {
            for b in a + 1..3 {
                clauses.push(clause(vec![Literal::neg(cs[a].clone()), Literal::neg(cs[b].clone())]));
            }
        }
    }
    for &(a, b) in &g.edges {
        for c in 0..3 {
            clauses.push(clause(vec![Literal::neg(col[a][c].clone()), Literal::neg(col[b][c].clone())]));
        }
    }
    for &(v, c) in pre {
        clauses.push(clause(vec![Literal::pos(col[v][usize::from(c) - 1].clone())]));
    }
    Cnf::new(clauses)
}

/// Conjunction of variable-disjoint copies, one per pre-coloring of `m`
/// leaves; satisfiable iff every pre-coloring extends.
pub fn coloring_extension_formula(engine: &Engine, g: &Graph, m: usize) -> Result<Cnf> {
    check_candidates(engine, g, m)?;
    let mut clauses = Vec::new();
    for (i, pre) in leaf_precolorings(g, m)?.iter().enumerate() {
        clauses.extend(coloring_extension_cnf(g, pre, &format!("c{}_", i + 1)).clauses);
    }
    Ok(Cnf::new(clauses))
}

fn check_candidates(engine: &Engine, g: &Graph, m: usize) -> Result<()> {
    let leaves = g.leaves().len();
    if m > leaves {
        return Err(Error::Precondition(format!("m = {m} exceeds the {leaves} leaves")));
    }
    let count = binomial(leaves, m).saturating_mul(3u128.saturating_pow(m as u32));
    engine.check_ceiling("leaf pre-colorings", count)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringReport {
    pub holds: bool,
    pub counterexample: Option<PreColoring>,
    pub candidates: u64,
}

/// One SAT query per pre-coloring of exactly `m` leaves; stops at the first
/// pre-coloring that does not extend.
pub fn coloring_extension_leaves_with(engine: &Engine, g: &Graph, m: usize) -> Result<ColoringReport> {
    check_candidates(engine, g, m)?;
    let mut candidates = 0;
    for pre in leaf_precolorings(g, m)? {
        candidates += 1;
        if !engine.solve(&coloring_extension_cnf(g, &pre, "c"))?.is_sat() {
            return Ok(ColoringReport { holds: false, counterexample: Some(pre), candidates });
        }
    }
    Ok(ColoringReport { holds: true, counterexample: None, candidates })
}

pub fn coloring_extension_leaves(g: &Graph, m: usize) -> Result<bool> {
    Ok(coloring_extension_leaves_with(&Engine::default(), g, m)?.holds)
}

/// Renders a pre-coloring as `a=1 b=3`.
pub fn format_precoloring(g: &Graph, pre: &[(usize, u8)]) -> String {
    let mut s = String::new();
    for (i, &(v, c)) in pre.iter().enumerate() {
        let _ = write!(s, "{}{}={c}", if i > 0 { " " } else { "" }, g.vertices[v]);
    }
    s
}
