//! Text formats: CIRC circuits, DIMACS CNF/DNF and the WQDIMACS dialect.
//!
//! CIRC has one gate per line:
//! `input <name>`, `<label> = and(<refs>)`, `or(..)`, `not(<ref>)`,
//! `const 0|1`, and a final `output <ref>`. Refs name gates or inputs and
//! must be defined before use. `#` starts a comment line.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::{Circuit, Clause, Cnf, Dnf, Gate, Literal, Quant, Term, VarId, WeightSpec, WqbfInstance};
use crate::error::{Error, Result};

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=' | '#'))
}

fn split_refs(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect()
}

struct CircReader {
    gates: Vec<Gate>,
    names: HashMap<String, usize>,
    output: Option<usize>,
}

impl CircReader {
    fn new() -> Self {
        CircReader { gates: Vec::new(), names: HashMap::new(), output: None }
    }

    fn define(&mut self, line: usize, name: &str, g: Gate) -> Result<()> {
        if !valid_name(name) {
            return Err(Error::parse(line, format!("invalid name `{name}`")));
        }
        if self.names.contains_key(name) {
            return Err(Error::parse(line, format!("`{name}` defined twice")));
        }
        self.gates.push(g);
        self.names.insert(name.to_string(), self.gates.len() - 1);
        Ok(())
    }

    fn resolve(&self, line: usize, r: &str) -> Result<usize> {
        self.names
            .get(r)
            .copied()
            .ok_or_else(|| Error::parse(line, format!("undefined reference `{r}`")))
    }

    fn line(&mut self, ln: usize, text: &str) -> Result<()> {
        if self.output.is_some() {
            return Err(Error::parse(ln, "content after `output`"));
        }
        if let Some(rest) = text.strip_prefix("input ") {
            for name in rest.split_whitespace() {
                self.define(ln, name, Gate::Input(VarId::new(name)))?;
            }
            return Ok(());
        }
        if let Some(rest) = text.strip_prefix("output ") {
            self.output = Some(self.resolve(ln, rest.trim())?);
            return Ok(());
        }
        let Some((label, rhs)) = text.split_once('=') else {
            return Err(Error::parse(ln, format!("unrecognized line `{text}`")));
        };
        let label = label.trim();
        let rhs = rhs.trim();
        let gate = if let Some(k) = rhs.strip_prefix("const") {
            match k.trim() {
                "0" => Gate::Const(false),
                "1" => Gate::Const(true),
                other => return Err(Error::parse(ln, format!("bad constant `{other}`"))),
            }
        } else {
            let (op, args) = rhs
                .split_once('(')
                .ok_or_else(|| Error::parse(ln, format!("expected `op(...)`, got `{rhs}`")))?;
            let args = args
                .trim_end()
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(ln, "missing `)`"))?;
            let refs = split_refs(args)
                .into_iter()
                .map(|r| self.resolve(ln, r))
                .collect::<Result<Vec<_>>>()?;
            match op.trim() {
                "and" => Gate::And(refs),
                "or" => Gate::Or(refs),
                "not" => {
                    if refs.len() != 1 {
                        return Err(Error::parse(ln, "`not` takes exactly one argument"));
                    }
                    Gate::Not(refs[0])
                }
                other => return Err(Error::parse(ln, format!("unknown gate `{other}`"))),
            }
        };
        self.define(ln, label, gate)
    }

    fn finish(self, last_line: usize) -> Result<Circuit> {
        let out = self.output.ok_or_else(|| Error::parse(last_line, "missing `output` line"))?;
        Circuit::new(self.gates, out)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_circ(text: &str) -> Result<Circuit> {
    let mut r = CircReader::new();
    let mut last = 0;
    for (ln, l) in content_lines(text) {
        last = ln;
        r.line(ln, l)?;
    }
    r.finish(last)
}

pub fn write_circ(c: &Circuit) -> String {
    let mut out = String::new();
    let mut refs: Vec<String> = Vec::with_capacity(c.len());
    let mut declared: HashSet<String> = HashSet::new();
    let input_names: HashSet<&str> = c
        .gates()
        .iter()
        .filter_map(|g| if let Gate::Input(v) = g { Some(v.name()) } else { None })
        .collect();
    for (i, g) in c.gates().iter().enumerate() {
        let label = match g {
            Gate::Input(v) => {
                if declared.insert(v.name().to_string()) {
                    let _ = writeln!(out, "input {v}");
                }
                refs.push(v.name().to_string());
                continue;
            }
            _ => {
                let mut l = format!("g{i}");
                while input_names.contains(l.as_str()) {
                    l.push('\'');
                }
                l
            }
        };
        let rhs = match g {
            Gate::Const(b) => format!("const {}", u8::from(*b)),
            Gate::Not(a) => format!("not({})", refs[*a]),
            Gate::And(cs) | Gate::Or(cs) => {
                let op = if matches!(g, Gate::And(_)) { "and" } else { "or" };
                let args: Vec<&str> = cs.iter().map(|&x| refs[x].as_str()).collect();
                format!("{op}({})", args.join(", "))
            }
            Gate::Input(_) => unreachable!(),
        };
        let _ = writeln!(out, "{label} = {rhs}");
        refs.push(label);
    }
    let _ = writeln!(out, "output {}", refs[c.output()]);
    out
}

/// Number assignment for writing DIMACS: names that are all positive
/// integers are kept, anything else is numbered by first occurrence.
pub fn dimacs_numbering(vars: &[VarId]) -> Vec<(VarId, u32)> {
    let numeric: Option<Vec<u32>> = vars
        .iter()
        .map(|v| v.name().parse::<u32>().ok().filter(|&n| n > 0 && v.name() == n.to_string()))
        .collect();
    match numeric {
        Some(nums) => vars.iter().cloned().zip(nums).collect(),
        None => vars.iter().cloned().zip(1u32..).collect(),
    }
}

fn renumbered(map: &[(VarId, u32)]) -> bool {
    map.iter().any(|(v, n)| v.name() != n.to_string())
}

fn write_sets(out: &mut String, sets: &[&[Literal]], num: &HashMap<&VarId, u32>) {
    for lits in sets {
        for l in *lits {
            let n = num[&l.var] as i64;
            let _ = write!(out, "{} ", if l.positive { n } else { -n });
        }
        out.push_str("0\n");
    }
}

fn write_var_comments(out: &mut String, map: &[(VarId, u32)]) {
    if renumbered(map) {
        for (v, n) in map {
            let _ = writeln!(out, "c var {n} {v}");
        }
    }
}

/// Writes `p cnf`, returning the text and the variable numbering.
pub fn write_dimacs_cnf(f: &Cnf) -> (String, Vec<(VarId, u32)>) {
    let map = dimacs_numbering(&f.vars());
    let num: HashMap<&VarId, u32> = map.iter().map(|(v, n)| (v, *n)).collect();
    let maxv = map.iter().map(|(_, n)| *n).max().unwrap_or(0);
    let mut out = String::new();
    write_var_comments(&mut out, &map);
    let _ = writeln!(out, "p cnf {maxv} {}", f.clauses.len());
    let sets: Vec<&[Literal]> = f.clauses.iter().map(|c| c.literals()).collect();
    write_sets(&mut out, &sets, &num);
    (out, map)
}

pub fn write_dimacs_dnf(f: &Dnf) -> (String, Vec<(VarId, u32)>) {
    let map = dimacs_numbering(&f.vars());
    let num: HashMap<&VarId, u32> = map.iter().map(|(v, n)| (v, *n)).collect();
    let maxv = map.iter().map(|(_, n)| *n).max().unwrap_or(0);
    let mut out = String::new();
    write_var_comments(&mut out, &map);
    let _ = writeln!(out, "p dnf {maxv} {}", f.terms.len());
    let sets: Vec<&[Literal]> = f.terms.iter().map(|t| t.literals()).collect();
    write_sets(&mut out, &sets, &num);
    (out, map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Cnf,
    Dnf,
    Circ,
}

struct SetsReader {
    nvars: u32,
    expected: usize,
    sets: Vec<Vec<Literal>>,
    current: Vec<Literal>,
    kind: MatrixKind,
}

impl SetsReader {
    fn header(ln: usize, l: &str) -> Result<SetsReader> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let kind = match toks.get(1) {
            Some(&"cnf") => MatrixKind::Cnf,
            Some(&"dnf") => MatrixKind::Dnf,
            _ => return Err(Error::parse(ln, format!("expected `p cnf` or `p dnf`, got `{l}`"))),
        };
        if toks.len() != 4 {
            return Err(Error::parse(ln, "header needs variable and clause counts"));
        }
        let nvars = toks[2].parse().map_err(|_| Error::parse(ln, "bad variable count"))?;
        let expected = toks[3].parse().map_err(|_| Error::parse(ln, "bad clause count"))?;
        Ok(SetsReader { nvars, expected, sets: Vec::new(), current: Vec::new(), kind })
    }

    fn literal_var(&self, ln: usize, tok: &str) -> Result<Option<Literal>> {
        let n: i64 = tok.parse().map_err(|_| Error::parse(ln, format!("bad literal `{tok}`")))?;
        if n == 0 {
            return Ok(None);
        }
        if n.unsigned_abs() > u64::from(self.nvars) {
            return Err(Error::parse(ln, format!("literal {n} exceeds declared variable count")));
        }
        Ok(Some(Literal::new(VarId::new(&n.abs().to_string()), n > 0)))
    }

    fn line(&mut self, ln: usize, l: &str) -> Result<()> {
        for tok in l.split_whitespace() {
            match self.literal_var(ln, tok)? {
                Some(lit) => self.current.push(lit),
                None => self.sets.push(std::mem::take(&mut self.current)),
            }
        }
        Ok(())
    }

    fn finish(self, ln: usize) -> Result<Vec<Vec<Literal>>> {
        if !self.current.is_empty() {
            return Err(Error::parse(ln, "last clause is not terminated by 0"));
        }
        if self.sets.len() != self.expected {
            return Err(Error::parse(
                ln,
                format!("header declares {} clauses, found {}", self.expected, self.sets.len()),
            ));
        }
        Ok(self.sets)
    }
}

/// Clauses with a complementary pair are tautologies and are dropped.
fn to_cnf(sets: Vec<Vec<Literal>>) -> Cnf {
    Cnf::new(sets.into_iter().filter_map(|s| Clause::new(s).ok()).collect())
}

/// Terms with a complementary pair are contradictions and are dropped.
fn to_dnf(sets: Vec<Vec<Literal>>) -> Dnf {
    Dnf::new(sets.into_iter().filter_map(|s| Term::new(s).ok()).collect())
}

fn is_comment(l: &str) -> bool {
    l == "c" || l.starts_with("c ") || l.starts_with("c\t")
}

fn parse_sets(text: &str, want: MatrixKind) -> Result<Vec<Vec<Literal>>> {
    let mut reader: Option<SetsReader> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.trim();
        if l.is_empty() || is_comment(l) {
            continue;
        }
        last = ln;
        match reader.as_mut() {
            None if l.starts_with('p') => {
                let r = SetsReader::header(ln, l)?;
                if r.kind != want {
                    return Err(Error::parse(ln, format!("unexpected header `{l}`")));
                }
                reader = Some(r);
            }
            None => return Err(Error::parse(ln, "missing `p` header")),
            Some(r) => r.line(ln, l)?,
        }
    }
    reader.ok_or_else(|| Error::parse(last.max(1), "missing `p` header"))?.finish(last)
}

pub fn parse_dimacs_cnf(text: &str) -> Result<Cnf> {
    parse_sets(text, MatrixKind::Cnf).map(to_cnf)
}

pub fn parse_dimacs_dnf(text: &str) -> Result<Dnf> {
    parse_sets(text, MatrixKind::Dnf).map(to_dnf)
}

fn parse_weight(ln: usize, toks: &[&str]) -> Result<(usize, WeightSpec)> {
    let block: usize = match toks.get(1) {
        Some(&"1") => 1,
        Some(&"2") => 2,
        _ => return Err(Error::parse(ln, "weight line must name block 1 or 2")),
    };
    let k = match toks.get(3) {
        Some(t) => Some(t.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad weight `{t}`")))?),
        None => None,
    };
    let need = |k: Option<usize>| k.ok_or_else(|| Error::parse(ln, "weight bound missing"));
    let w = match toks.get(2) {
        Some(&"exact") => WeightSpec::Exact(need(k)?),
        Some(&"atmost") => WeightSpec::AtMost(need(k)?),
        Some(&"atleast") => WeightSpec::AtLeast(need(k)?),
        Some(&"complement") => WeightSpec::ExactComplement(need(k)?),
        Some(&"free") => WeightSpec::Free,
        _ => return Err(Error::parse(ln, "unknown weight kind")),
    };
    Ok((block, w))
}

/// Parses a WQDIMACS instance.
pub fn parse_wqdimacs(text: &str) -> Result<WqbfInstance> {
    let mut kind: Option<MatrixKind> = None;
    let mut header = String::new();
    let mut prefix: Vec<(Quant, Vec<VarId>)> = Vec::new();
    let mut weights = [WeightSpec::Free, WeightSpec::Free];
    let mut sets: Option<SetsReader> = None;
    let mut circ = CircReader::new();
    let mut body_started = false;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.trim();
        if l.is_empty() || is_comment(l) || l.starts_with('#') {
            continue;
        }
        last = ln;
        if kind.is_none() {
            if !l.starts_with("p ") {
                return Err(Error::parse(ln, "missing `p` header"));
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.get(1) == Some(&"circ") {
                kind = Some(MatrixKind::Circ);
            } else {
                let r = SetsReader::header(ln, l)?;
                kind = Some(r.kind);
                sets = Some(r);
            }
            header = l.to_string();
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if !body_started && (toks[0] == "e" || toks[0] == "a") {
            if toks.last() != Some(&"0") {
                return Err(Error::parse(ln, "prefix line must end with 0"));
            }
            if prefix.len() == 2 {
                return Err(Error::parse(ln, "more than two prefix lines"));
            }
            let q = if toks[0] == "e" { Quant::Exists } else { Quant::Forall };
            let vars = toks[1..toks.len() - 1]
                .iter()
                .map(|t| {
                    if kind != Some(MatrixKind::Circ) {
                        let n: u32 = t.parse().map_err(|_| Error::parse(ln, format!("bad variable `{t}`")))?;
                        if n == 0 || n > sets.as_ref().map_or(0, |s| s.nvars) {
                            return Err(Error::parse(ln, format!("variable {n} out of range")));
                        }
                    }
                    Ok(VarId::new(t))
                })
                .collect::<Result<Vec<_>>>()?;
            prefix.push((q, vars));
            continue;
        }
        if !body_started && toks[0] == "w" {
            let (block, w) = parse_weight(ln, &toks)?;
            weights[block - 1] = w;
            continue;
        }
        body_started = true;
        match kind {
            Some(MatrixKind::Circ) => circ.line(ln, l)?,
            _ => sets.as_mut().expect("header read").line(ln, l)?,
        }
    }
    let kind = kind.ok_or_else(|| Error::parse(last.max(1), "missing `p` header"))?;
    if prefix.len() != 2 {
        return Err(Error::parse(last, format!("expected two prefix lines, found {}", prefix.len())));
    }
    let matrix = match kind {
        MatrixKind::Circ => circ.finish(last)?,
        MatrixKind::Cnf => Circuit::from_cnf(&to_cnf(sets.expect("header read").finish(last)?)),
        MatrixKind::Dnf => Circuit::from_dnf(&to_dnf(sets.expect("header read").finish(last)?)),
    };
    let _ = header;
    let (q2, v2) = prefix.pop().expect("two blocks");
    let (q1, v1) = prefix.pop().expect("two blocks");
    let inst = WqbfInstance {
        outer_kind: q1,
        outer_vars: v1,
        outer_weight: weights[0],
        inner_kind: q2,
        inner_vars: v2,
        inner_weight: weights[1],
        matrix,
    };
    inst.validate().map_err(|e| Error::parse(last, e.to_string()))?;
    Ok(inst)
}

/// Picks the body kind: CNF when the matrix reads as one, then DNF, then CIRC.
pub fn matrix_kind(c: &Circuit) -> MatrixKind {
    if c.to_cnf().is_some() {
        MatrixKind::Cnf
    } else if c.to_dnf().is_some() {
        MatrixKind::Dnf
    } else {
        MatrixKind::Circ
    }
}

fn weight_line(block: usize, w: WeightSpec) -> String {
    match w {
        WeightSpec::Free => format!("w {block} free 0"),
        other => format!("w {block} {other}"),
    }
}

fn quant_char(q: Quant) -> char {
    match q {
        Quant::Exists => 'e',
        Quant::Forall => 'a',
    }
}

/// Writes a WQDIMACS instance with the given body kind. CNF/DNF bodies
/// renumber variables when needed and list the numbering as `c var` lines.
pub fn write_wqdimacs_as(inst: &WqbfInstance, kind: MatrixKind) -> Result<String> {
    let mut out = String::new();
    let blocks = [
        (inst.outer_kind, &inst.outer_vars, inst.outer_weight),
        (inst.inner_kind, &inst.inner_vars, inst.inner_weight),
    ];
    if kind == MatrixKind::Circ {
        out.push_str("p circ\n");
        for (q, vars, _) in blocks {
            let names: Vec<&str> = vars.iter().map(VarId::name).collect();
            let sep = if names.is_empty() { "" } else { " " };
            let _ = writeln!(out, "{} {}{sep}0", quant_char(q), names.join(" "));
        }
        for (i, (_, _, w)) in blocks.iter().enumerate() {
            let _ = writeln!(out, "{}", weight_line(i + 1, *w));
        }
        out.push_str(&write_circ(&inst.matrix));
        return Ok(out);
    }
    let sets: Vec<Vec<Literal>> = match kind {
        MatrixKind::Cnf => inst
            .matrix
            .to_cnf()
            .ok_or_else(|| Error::Invalid("matrix is not a CNF".into()))?
            .clauses
            .into_iter()
            .map(|c| c.literals().to_vec())
            .collect(),
        _ => inst
            .matrix
            .to_dnf()
            .ok_or_else(|| Error::Invalid("matrix is not a DNF".into()))?
            .terms
            .into_iter()
            .map(|t| t.literals().to_vec())
            .collect(),
    };
    let all = inst.all_vars();
    let map = dimacs_numbering(&all);
    let num: HashMap<&VarId, u32> = map.iter().map(|(v, n)| (v, *n)).collect();
    let maxv = map.iter().map(|(_, n)| *n).max().unwrap_or(0);
    write_var_comments(&mut out, &map);
    let tag = if kind == MatrixKind::Cnf { "cnf" } else { "dnf" };
    let _ = writeln!(out, "p {tag} {maxv} {}", sets.len());
    for (q, vars, _) in blocks {
        let mut line = String::new();
        line.push(quant_char(q));
        for v in vars.iter() {
            let _ = write!(line, " {}", num[v]);
        }
        let _ = writeln!(out, "{line} 0");
    }
    for (i, (_, _, w)) in blocks.iter().enumerate() {
        let _ = writeln!(out, "{}", weight_line(i + 1, *w));
    }
    let refs: Vec<&[Literal]> = sets.iter().map(Vec::as_slice).collect();
    write_sets(&mut out, &refs, &num);
    Ok(out)
}

pub fn write_wqdimacs(inst: &WqbfInstance) -> String {
    write_wqdimacs_as(inst, matrix_kind(&inst.matrix)).expect("kind matches matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Assignment;

    #[test]
    fn circ_roundtrip() {
        let text = "input x\ninput y\ng2 = not(y)\ng3 = and(x, g2)\ng4 = const 1\ng5 = or(g3, g4)\noutput g5\n";
        let c = parse_circ(text).unwrap();
        assert_eq!(write_circ(&c), text);
        let a = Assignment::from_pairs([(VarId::new("x"), false), (VarId::new("y"), true)]);
        assert!(c.eval(&a).unwrap());
    }

    #[test]
    fn circ_errors_carry_lines() {
        let err = parse_circ("input x\ng1 = and(x, y)\noutput g1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_circ("input x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn dimacs_roundtrip_numeric() {
        let text = "p cnf 3 2\n1 -2 0\n3 0\n";
        let f = parse_dimacs_cnf(text).unwrap();
        let (w, _) = write_dimacs_cnf(&f);
        assert_eq!(w, "p cnf 3 2\n1 -2 0\n3 0\n");
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(parse_dimacs_cnf("p cnf 2 1\n1 x 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs_cnf("p cnf 1 1\n2 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs_cnf("1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_dimacs_cnf("p cnf 2 2\n1 0\n").is_err());
    }

    #[test]
    fn wqdimacs_roundtrip() {
        let text = "p dnf 3 2\ne 1 2 0\na 3 0\nw 1 exact 1\nw 2 free 0\n1 3 0\n2 -3 0\n";
        let inst = parse_wqdimacs(text).unwrap();
        assert_eq!(inst.outer_weight, WeightSpec::Exact(1));
        assert_eq!(inst.inner_kind, Quant::Forall);
        assert_eq!(write_wqdimacs(&inst), text);
        let circ = write_wqdimacs_as(&inst, MatrixKind::Circ).unwrap();
        let back = parse_wqdimacs(&circ).unwrap();
        assert_eq!(back.matrix.to_dnf(), inst.matrix.to_dnf());
    }
}
