//! Prenex QBF with few universal variables: universal expansion into one
//! existential CNF.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::logic::format::{dimacs_numbering, parse_circ, parse_dimacs_cnf, write_circ};
use crate::logic::{Assignment, Circuit, Cnf, Fresh, Quant, VarId};
use crate::sat::{tseitin_cnf, Tseitin};
use crate::Engine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrenexQbf {
    pub blocks: Vec<(Quant, Vec<VarId>)>,
    pub matrix: Circuit,
}

impl PrenexQbf {
    pub fn new(blocks: Vec<(Quant, Vec<VarId>)>, matrix: Circuit) -> Result<Self> {
        let q = PrenexQbf { blocks, matrix };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (_, vars) in &self.blocks {
            for v in vars {
                if !seen.insert(v) {
                    return Err(Error::Invalid(format!("variable `{v}` is quantified twice")));
                }
            }
        }
        if let Some(v) = self.matrix.inputs().into_iter().find(|v| !seen.contains(v)) {
            return Err(Error::Invalid(format!("matrix variable `{v}` is not quantified")));
        }
        Ok(())
    }

    pub fn universal_count(&self) -> usize {
        self.blocks.iter().filter(|(q, _)| *q == Quant::Forall).map(|(_, v)| v.len()).sum()
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.blocks.iter().flat_map(|(_, v)| v.iter().cloned()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionStats {
    pub universals: usize,
    /// Matrix copies in the expansion, `2^k`.
    pub copies: usize,
    /// Clauses of the Tseitin encoding of the original matrix.
    pub matrix_clauses: usize,
    pub expanded_clauses: usize,
    /// `expanded_clauses / matrix_clauses`, at most `2^k`.
    pub factor: f64,
}

/// Expands universal variables innermost first. Expanding `∀y` turns the
/// current conjunction `G` into `G[y=0] ∧ G'[y=1]`, where `G'` renames every
/// existential variable in the scope of `y`. The result is the conjunction of
/// the copies, each Tseitin-encoded with its output asserted.
pub fn qbf_universal_expand(engine: &Engine, phi: &PrenexQbf) -> Result<(Cnf, ExpansionStats)> {
    phi.validate()?;
    let k = phi.universal_count();
    let copies_count = 1u128.checked_shl(k as u32).unwrap_or(u128::MAX);
    engine.check_ceiling("universal expansion copies", copies_count)?;
    let mut fresh = Fresh::avoiding(phi.vars().iter());
    for v in phi.matrix.inputs() {
        fresh.avoid(&v);
    }
    let mut copies = vec![phi.matrix.clone()];
    let mut scoped: Vec<VarId> = Vec::new();
    for (q, vars) in phi.blocks.iter().rev() {
        match q {
            Quant::Exists => scoped.extend(vars.iter().cloned()),
            Quant::Forall => {
                for y in vars.iter().rev() {
                    let pairs: Vec<(VarId, VarId)> =
                        scoped.iter().map(|v| (v.clone(), fresh.var(v.name().trim_start_matches('_')))).collect();
                    let rename: HashMap<VarId, VarId> = pairs.iter().cloned().collect();
                    let zero = Assignment::from_pairs([(y.clone(), false)]);
                    let one = Assignment::from_pairs([(y.clone(), true)]);
                    let mut next: Vec<Circuit> = copies.iter().map(|c| c.substitute(&zero).simplify()).collect();
                    next.extend(copies.iter().map(|c| c.substitute(&one).simplify().rename(&rename)));
                    scoped.extend(pairs.into_iter().map(|(_, copy)| copy));
                    copies = next;
                }
            }
        }
    }
    let mut t = Tseitin::new(fresh);
    for c in &copies {
        let (out, _) = t.encode(c);
        t.assert(out);
    }
    let cnf = t.into_cnf();
    let matrix_clauses = tseitin_cnf(&phi.matrix).0.clauses.len();
    let stats = ExpansionStats {
        universals: k,
        copies: copies.len(),
        matrix_clauses,
        expanded_clauses: cnf.clauses.len(),
        factor: cnf.clauses.len() as f64 / matrix_clauses as f64,
    };
    Ok((cnf, stats))
}

/// Truth of `phi` through universal expansion and one SAT call.
pub fn solve_qbf_expand(engine: &Engine, phi: &PrenexQbf) -> Result<bool> {
    let (cnf, _) = qbf_universal_expand(engine, phi)?;
    Ok(engine.solve(&cnf)?.is_sat())
}

fn prefix_line(line: usize, toks: &[&str]) -> Result<(Quant, Vec<String>)> {
    let q = if toks[0] == "a" { Quant::Forall } else { Quant::Exists };
    if toks.last() != Some(&"0") {
        return Err(Error::parse(line, "prefix line must end with 0"));
    }
    Ok((q, toks[1..toks.len() - 1].iter().map(|t| t.to_string()).collect()))
}

/// Reads QDIMACS (`p cnf` with `a`/`e` prefix lines), or the CIRC variant
/// (`p circ`, prefix lines with variable names, then a CIRC body). Adjacent
/// blocks with the same quantifier are merged; free matrix variables join an
/// outermost existential block.
pub fn parse_qbf(text: &str) -> Result<PrenexQbf> {
    let mut circ = None;
    let mut prefix: Vec<(Quant, Vec<String>)> = Vec::new();
    let mut body = String::new();
    let mut in_body = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        let toks: Vec<&str> = l.split_whitespace().collect();
        let comment = l.is_empty() || l.starts_with('#') || toks[0] == "c";
        if !comment && circ.is_none() {
            match toks.as_slice() {
                ["p", "circ"] => {
                    circ = Some(true);
                    body.push('\n');
                    continue;
                }
                ["p", "cnf", ..] => {
                    circ = Some(false);
                    body.push_str(l);
                    body.push('\n');
                    continue;
                }
                _ => return Err(Error::parse(line, "missing `p cnf` or `p circ` header")),
            }
        }
        if !comment && !in_body && (toks[0] == "a" || toks[0] == "e") {
            prefix.push(prefix_line(line, &toks)?);
            body.push('\n');
            continue;
        }
        if !comment {
            in_body = true;
        }
        if comment && circ == Some(true) {
            body.push('\n');
        } else {
            body.push_str(raw);
            body.push('\n');
        }
    }
    let matrix = match circ {
        None => return Err(Error::parse(1, "missing `p cnf` or `p circ` header")),
        Some(true) => parse_circ(&body)?,
        Some(false) => Circuit::from_cnf(&parse_dimacs_cnf(&body)?),
    };
    let mut blocks: Vec<(Quant, Vec<VarId>)> = Vec::new();
    for (q, names) in prefix {
        let vars: Vec<VarId> = names.iter().map(|n| VarId::new(n)).collect();
        match blocks.last_mut() {
            Some((last, vs)) if *last == q => vs.extend(vars),
            _ => blocks.push((q, vars)),
        }
    }
    let bound: HashSet<VarId> = blocks.iter().flat_map(|(_, v)| v.iter().cloned()).collect();
    let free: Vec<VarId> = matrix.inputs().into_iter().filter(|v| !bound.contains(v)).collect();
    if !free.is_empty() {
        match blocks.first_mut() {
            Some((Quant::Exists, vs)) => {
                vs.splice(0..0, free);
            }
            _ => blocks.insert(0, (Quant::Exists, free)),
        }
    }
    PrenexQbf::new(blocks, matrix).map_err(|e| Error::parse(text.lines().count().max(1), e.to_string()))
}

fn quant_char(q: Quant) -> &'static str {
    match q {
        Quant::Exists => "e",
        Quant::Forall => "a",
    }
}

/// QDIMACS when the matrix reads as a CNF, the CIRC variant otherwise.
pub fn write_qbf(phi: &PrenexQbf) -> String {
    let mut out = String::new();
    match phi.matrix.to_cnf() {
        Some(cnf) => {
            let map = dimacs_numbering(&phi.vars());
            let num: HashMap<&VarId, u32> = map.iter().map(|(v, n)| (v, *n)).collect();
            if map.iter().any(|(v, n)| v.name() != n.to_string()) {
                for (v, n) in &map {
                    let _ = writeln!(out, "c var {n} {v}");
                }
            }
            let maxv = map.iter().map(|(_, n)| *n).max().unwrap_or(0);
            let _ = writeln!(out, "p cnf {maxv} {}", cnf.clauses.len());
            for (q, vars) in &phi.blocks {
                let mut line = quant_char(*q).to_string();
                for v in vars {
                    let _ = write!(line, " {}", num[v]);
                }
                let _ = writeln!(out, "{line} 0");
            }
            for c in &cnf.clauses {
                for l in c.literals() {
                    let n = i64::from(num[&l.var]);
                    let _ = write!(out, "{} ", if l.positive { n } else { -n });
                }
                out.push_str("0\n");
            }
        }
        None => {
            out.push_str("p circ\n");
            for (q, vars) in &phi.blocks {
                let names: Vec<&str> = vars.iter().map(VarId::name).collect();
                let sep = if names.is_empty() { "" } else { " " };
                let _ = writeln!(out, "{}{sep}{} 0", quant_char(*q), names.join(" "));
            }
            out.push_str(&write_circ(&phi.matrix));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Builder;

    fn v(s: &str) -> VarId {
        VarId::new(s)
    }

    #[test]
    fn expansion_examples() {
        let mut b = Builder::new();
        let x = b.input(&v("x"));
        let y = b.input(&v("y"));
        let out = b.or2(x, y);
        let phi = PrenexQbf::new(vec![(Quant::Exists, vec![v("x")]), (Quant::Forall, vec![v("y")])], b.finish(out)).unwrap();
        let e = Engine::default();
        assert!(solve_qbf_expand(&e, &phi).unwrap());
        let (_, stats) = qbf_universal_expand(&e, &phi).unwrap();
        assert_eq!(stats.copies, 2);
        assert!(stats.factor <= 2.0);

        let only_y = PrenexQbf::new(vec![(Quant::Forall, vec![v("y")])], Circuit::var(&v("y"))).unwrap();
        assert!(!solve_qbf_expand(&e, &only_y).unwrap());
    }

    #[test]
    fn scoped_existentials_are_renamed() {
        // ∀y ∃z. z ↔ y is true only when z may differ per copy.
        let mut b = Builder::new();
        let y = b.input(&v("y"));
        let z = b.input(&v("z"));
        let out = b.iff(y, z);
        let phi = PrenexQbf::new(vec![(Quant::Forall, vec![v("y")]), (Quant::Exists, vec![v("z")])], b.finish(out.clone()))
            .unwrap();
        assert!(solve_qbf_expand(&Engine::default(), &phi).unwrap());
        let swapped = PrenexQbf::new(vec![(Quant::Exists, vec![v("z")]), (Quant::Forall, vec![v("y")])], phi.matrix.clone())
            .unwrap();
        assert!(!solve_qbf_expand(&Engine::default(), &swapped).unwrap());
    }

    #[test]
    fn text_roundtrip() {
        let text = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";
        let phi = parse_qbf(text).unwrap();
        assert_eq!(write_qbf(&phi), text);
        let circ = "p circ\ne x 0\na y 0\ninput x\ninput y\ng2 = not(y)\ng3 = and(x, g2)\ng4 = or(g3, y)\noutput g4\n";
        assert_eq!(write_qbf(&parse_qbf(circ).unwrap()), circ);
        let free = parse_qbf("p cnf 2 1\na 1 0\n1 2 0\n").unwrap();
        assert_eq!(free.blocks[0], (Quant::Exists, vec![v("2")]));
    }
}
