//! First-order model checking on `∃*∀*` sentences and its encoding into a
//! weighted instance.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{Builder, Fresh, NodeId, VarId, WeightSpec, WqbfInstance};

/// Finite relational structure. Elements are referred to by index into
/// `domain`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoStructure {
    pub domain: Vec<String>,
    /// Symbol to arity and tuple set.
    pub relations: BTreeMap<String, (usize, BTreeSet<Vec<usize>>)>,
}

impl FoStructure {
    pub fn new(domain: Vec<String>) -> Self {
        FoStructure { domain, relations: BTreeMap::new() }
    }

    pub fn add_relation(&mut self, name: &str, arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Result<()> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity || t.iter().any(|&e| e >= self.domain.len()) {
                return Err(Error::Invalid(format!("bad tuple {t:?} for {name}/{arity}")));
            }
            set.insert(t);
        }
        self.relations.insert(name.to_string(), (arity, set));
        Ok(())
    }

    pub fn holds(&self, rel: &str, tuple: &[usize]) -> bool {
        self.relations.get(rel).is_some_and(|(_, s)| s.contains(tuple))
    }
}

/// Quantifier-free formula over relation and equality atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoFormula {
    Const(bool),
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<FoFormula>),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
}

impl FoFormula {
    fn vars_into<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            FoFormula::Const(_) => {}
            FoFormula::Atom(_, args) => out.extend(args.iter().map(String::as_str)),
            FoFormula::Eq(a, b) => {
                out.insert(a);
                out.insert(b);
            }
            FoFormula::Not(f) => f.vars_into(out),
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().for_each(|f| f.vars_into(out)),
            FoFormula::Implies(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    fn eval(&self, s: &FoStructure, env: &HashMap<&str, usize>) -> bool {
        match self {
            FoFormula::Const(b) => *b,
            FoFormula::Atom(r, args) => {
                let t: Vec<usize> = args.iter().map(|a| env[a.as_str()]).collect();
                s.holds(r, &t)
            }
            FoFormula::Eq(a, b) => env[a.as_str()] == env[b.as_str()],
            FoFormula::Not(f) => !f.eval(s, env),
            FoFormula::And(fs) => fs.iter().all(|f| f.eval(s, env)),
            FoFormula::Or(fs) => fs.iter().any(|f| f.eval(s, env)),
            FoFormula::Implies(a, b) => !a.eval(s, env) || b.eval(s, env),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[FoFormula], op: &str, unit: &str| {
            if fs.is_empty() {
                return f.write_str(unit);
            }
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        };
        match self {
            FoFormula::Const(b) => f.write_str(if *b { "true" } else { "false" }),
            FoFormula::Atom(r, args) => write!(f, "{r}({})", args.join(",")),
            FoFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            FoFormula::Not(g) => match g.as_ref() {
                FoFormula::Eq(a, b) => write!(f, "{a} != {b}"),
                g => write!(f, "!{g}"),
            },
            FoFormula::And(fs) => join(f, fs, "&", "true"),
            FoFormula::Or(fs) => join(f, fs, "|", "false"),
            FoFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

/// Prenex sentence `∃x₁…x_k ∀y₁…y_n. ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoSentence {
    pub exist_vars: Vec<String>,
    pub forall_vars: Vec<String>,
    pub matrix: FoFormula,
}

impl FoSentence {
    /// Checks that quantified variables are distinct and cover the matrix,
    /// and that atoms use known symbols with the right arity.
    pub fn validate(&self, s: &FoStructure) -> Result<()> {
        let mut bound = BTreeSet::new();
        for v in self.exist_vars.iter().chain(&self.forall_vars) {
            if !bound.insert(v.as_str()) {
                return Err(Error::Invalid(format!("variable {v} quantified twice")));
            }
        }
        let mut used = BTreeSet::new();
        self.matrix.vars_into(&mut used);
        if let Some(v) = used.difference(&bound).next() {
            return Err(Error::Invalid(format!("free variable {v}")));
        }
        self.check_atoms(&self.matrix, s)
    }

    fn check_atoms(&self, f: &FoFormula, s: &FoStructure) -> Result<()> {
        match f {
            FoFormula::Atom(r, args) => match s.relations.get(r) {
                Some((arity, _)) if *arity == args.len() => Ok(()),
                Some((arity, _)) => Err(Error::Invalid(format!("{r} has arity {arity}, used with {}", args.len()))),
                None => Err(Error::Invalid(format!("unknown relation {r}"))),
            },
            FoFormula::Not(g) => self.check_atoms(g, s),
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().try_for_each(|g| self.check_atoms(g, s)),
            FoFormula::Implies(a, b) => {
                self.check_atoms(a, s)?;
                self.check_atoms(b, s)
            }
            FoFormula::Const(_) | FoFormula::Eq(..) => Ok(()),
        }
    }
}

impl fmt::Display for FoSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("sentence")?;
        if !self.exist_vars.is_empty() {
            write!(f, " exists {}", self.exist_vars.join(" "))?;
        }
        if !self.forall_vars.is_empty() {
            write!(f, " forall {}", self.forall_vars.join(" "))?;
        }
        write!(f, " : {}", self.matrix)
    }
}

/// Direct model checking by enumerating all variable assignments.
pub fn fo_model_check(s: &FoStructure, phi: &FoSentence) -> Result<bool> {
    phi.validate(s)?;
    let d = s.domain.len();
    let tuples = |len: usize| -> Box<dyn Iterator<Item = Vec<usize>>> {
        let total = d.checked_pow(len as u32).unwrap_or(usize::MAX);
        Box::new((0..total).map(move |mut code| {
            (0..len)
                .map(|_| {
                    let e = code % d;
                    code /= d;
                    e
                })
                .collect()
        }))
    };
    if d == 0 {
        // Empty domain: ∃ fails unless there is nothing to guess, ∀ holds vacuously.
        return Ok(phi.exist_vars.is_empty() && (!phi.forall_vars.is_empty() || phi.matrix.eval(s, &HashMap::new())));
    }
    for a in tuples(phi.exist_vars.len()) {
        let mut env: HashMap<&str, usize> = phi.exist_vars.iter().map(String::as_str).zip(a).collect();
        let mut all = true;
        for b in tuples(phi.forall_vars.len()) {
            for (v, e) in phi.forall_vars.iter().zip(b) {
                env.insert(v, e);
            }
            if !phi.matrix.eval(s, &env) {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Encoding into `∃^k X′ ∀ Y′. ψ_unique(X′) ∧ (ψ_unique(Y′) → μ(ψ))` with
/// one Boolean variable per (first-order variable, element) pair.
pub fn fo_mc_to_wqbf(s: &FoStructure, phi: &FoSentence) -> Result<WqbfInstance> {
    phi.validate(s)?;
    if s.domain.is_empty() {
        return Err(Error::Precondition("empty domain".into()));
    }
    let mut fresh = Fresh::default();
    let mut table: HashMap<&str, Vec<VarId>> = HashMap::new();
    let mut blocks = [Vec::new(), Vec::new()];
    for (bi, (vars, role)) in [(&phi.exist_vars, "x"), (&phi.forall_vars, "y")].into_iter().enumerate() {
        for (i, v) in vars.iter().enumerate() {
            let row: Vec<VarId> = s.domain.iter().map(|a| fresh.var(&format!("{role}{}_{a}", i + 1))).collect();
            blocks[bi].extend(row.iter().cloned());
            table.insert(v, row);
        }
    }
    let mut b = Builder::new();
    let nodes: HashMap<&str, Vec<NodeId>> = table
        .iter()
        .map(|(v, row)| (*v, row.iter().map(|x| b.input(x)).collect()))
        .collect();
    let unique = |b: &mut Builder, vars: &[String]| {
        let mut parts = Vec::new();
        for v in vars {
            let row = &nodes[v.as_str()];
            parts.push(b.or(row.clone()));
            for a in 0..row.len() {
                for c in a + 1..row.len() {
                    let na = b.not(row[a]);
                    let nc = b.not(row[c]);
                    parts.push(b.or2(na, nc));
                }
            }
        }
        b.and(parts)
    };
    let ux = unique(&mut b, &phi.exist_vars);
    let uy = unique(&mut b, &phi.forall_vars);
    let mu = encode(&mut b, s, &nodes, &phi.matrix);
    let guarded = b.implies(uy, mu);
    let out = b.and2(ux, guarded);
    let [xs, ys] = blocks;
    Ok(WqbfInstance::exists_forall(
        xs,
        WeightSpec::Exact(phi.exist_vars.len()),
        ys,
        WeightSpec::Free,
        b.finish(out),
    ))
}

fn encode(b: &mut Builder, s: &FoStructure, nodes: &HashMap<&str, Vec<NodeId>>, f: &FoFormula) -> NodeId {
    match f {
        FoFormula::Const(c) => b.constant(*c),
        FoFormula::Atom(r, args) => {
            let tuples = &s.relations[r].1;
            let terms = tuples
                .iter()
                .map(|t| {
                    let lits = args.iter().zip(t).map(|(z, &a)| nodes[z.as_str()][a]).collect();
                    b.and(lits)
                })
                .collect();
            b.or(terms)
        }
        FoFormula::Eq(x, y) => {
            let terms = (0..s.domain.len())
                .map(|a| {
                    let l = nodes[x.as_str()][a];
                    let r = nodes[y.as_str()][a];
                    b.and2(l, r)
                })
                .collect();
            b.or(terms)
        }
        FoFormula::Not(g) => {
            let n = encode(b, s, nodes, g);
            b.not(n)
        }
        FoFormula::And(gs) => {
            let cs = gs.iter().map(|g| encode(b, s, nodes, g)).collect();
            b.and(cs)
        }
        FoFormula::Or(gs) => {
            let cs = gs.iter().map(|g| encode(b, s, nodes, g)).collect();
            b.or(cs)
        }
        FoFormula::Implies(x, y) => {
            let l = encode(b, s, nodes, x);
            let r = encode(b, s, nodes, y);
            b.implies(l, r)
        }
    }
}

/// Reads a structure and a sentence from the line-based text format:
///
/// ```text
/// dom a b c
/// rel E/2 (a,b) (b,c)
/// sentence exists x1 forall y1 : E(x1,y1) | x1 = y1
/// ```
pub fn parse_fo(text: &str) -> Result<(FoStructure, FoSentence)> {
    let mut structure: Option<FoStructure> = None;
    let mut rels: Vec<(usize, String, usize, Vec<Vec<String>>)> = Vec::new();
    let mut sentence = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kw {
            "dom" => {
                if structure.is_some() {
                    return Err(Error::parse(line_no, "duplicate dom line"));
                }
                let elems: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if elems.iter().collect::<BTreeSet<_>>().len() != elems.len() {
                    return Err(Error::parse(line_no, "repeated domain element"));
                }
                structure = Some(FoStructure::new(elems));
            }
            "rel" => {
                let rest = rest.trim();
                let (sig, tuples) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let (name, arity) = sig.split_once('/').ok_or_else(|| Error::parse(line_no, "expected NAME/ARITY"))?;
                let arity: usize = arity.parse().map_err(|_| Error::parse(line_no, "bad arity"))?;
                rels.push((line_no, name.to_string(), arity, parse_tuples(tuples, line_no)?));
            }
            "sentence" => {
                if sentence.is_some() {
                    return Err(Error::parse(line_no, "duplicate sentence line"));
                }
                sentence = Some(parse_sentence(rest, line_no)?);
            }
            other => return Err(Error::parse(line_no, format!("unknown keyword `{other}`"))),
        }
    }
    let mut s = structure.ok_or_else(|| Error::parse(0, "missing dom line"))?;
    for (line_no, name, arity, tuples) in rels {
        let mut idx = Vec::new();
        for t in tuples {
            let row: Option<Vec<usize>> = t.iter().map(|e| s.domain.iter().position(|d| d == e)).collect();
            idx.push(row.ok_or_else(|| Error::parse(line_no, format!("tuple ({}) uses an unknown element", t.join(","))))?);
        }
        s.add_relation(&name, arity, idx).map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    let phi = sentence.ok_or_else(|| Error::parse(0, "missing sentence line"))?;
    phi.validate(&s)?;
    Ok((s, phi))
}

/// Writes a structure and sentence in the format read by [`parse_fo`].
pub fn write_fo(s: &FoStructure, phi: &FoSentence) -> String {
    let mut out = format!("dom {}\n", s.domain.join(" "));
    for (name, (arity, tuples)) in &s.relations {
        out.push_str(&format!("rel {name}/{arity}"));
        for t in tuples {
            let names: Vec<&str> = t.iter().map(|&e| s.domain[e].as_str()).collect();
            out.push_str(&format!(" ({})", names.join(",")));
        }
        out.push('\n');
    }
    out.push_str(&format!("{phi}\n"));
    out
}

fn parse_tuples(text: &str, line: usize) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| Error::parse(line, "expected `(`"))?;
        let end = body.find(')').ok_or_else(|| Error::parse(line, "unclosed tuple"))?;
        let inner = body[..end].trim();
        let elems = if inner.is_empty() { Vec::new() } else { inner.split(',').map(|e| e.trim().to_string()).collect() };
        out.push(elems);
        rest = body[end + 1..].trim_start();
    }
    Ok(out)
}

fn parse_sentence(text: &str, line: usize) -> Result<FoSentence> {
    let (prefix, body) = text.split_once(':').ok_or_else(|| Error::parse(line, "expected `:` before the matrix"))?;
    let mut exist_vars = Vec::new();
    let mut forall_vars = Vec::new();
    let mut target: Option<&mut Vec<String>> = None;
    let mut seen_forall = false;
    for w in prefix.split_whitespace() {
        match w {
            "exists" | "∃" if !seen_forall => target = Some(&mut exist_vars),
            "forall" | "∀" => {
                seen_forall = true;
                target = Some(&mut forall_vars);
            }
            "exists" | "∃" => return Err(Error::parse(line, "existential block after universal block")),
            v => match target.as_deref_mut() {
                Some(t) => t.push(v.to_string()),
                None => return Err(Error::parse(line, format!("variable {v} before a quantifier"))),
            },
        }
    }
    let tokens = lex(body, line)?;
    let mut p = Parser { tokens, pos: 0, line };
    let matrix = p.implication()?;
    if p.pos != p.tokens.len() {
        return Err(Error::parse(line, format!("unexpected `{}`", p.tokens[p.pos])));
    }
    Ok(FoSentence { exist_vars, forall_vars, matrix })
}

fn lex(s: &str, line: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push("->".into());
            i += 2;
        } else if c == '!' && cs.get(i + 1) == Some(&'=') {
            out.push("!=".into());
            i += 2;
        } else if "()!&|=,".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else {
            let t = match c {
                '¬' => "!",
                '∧' => "&",
                '∨' => "|",
                '→' => "->",
                '≠' => "!=",
                _ => return Err(Error::parse(line, format!("unexpected character `{c}`"))),
            };
            out.push(t.into());
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn eat(&mut self, t: &str) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(Error::parse(self.line, format!("expected `{t}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().map(str::to_string) {
            Some(t) if t.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_') => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(Error::parse(self.line, "expected an identifier")),
        }
    }

    fn implication(&mut self) -> Result<FoFormula> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            return Ok(FoFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<FoFormula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat("|") {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FoFormula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<FoFormula> {
        let mut parts = vec![self.unary()?];
        while self.eat("&") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FoFormula::And(parts) })
    }

    fn unary(&mut self) -> Result<FoFormula> {
        if self.eat("!") {
            return Ok(FoFormula::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let f = self.implication()?;
            self.expect(")")?;
            return Ok(f);
        }
        let name = self.ident()?;
        match name.as_str() {
            "true" => return Ok(FoFormula::Const(true)),
            "false" => return Ok(FoFormula::Const(false)),
            _ => {}
        }
        if self.eat("(") {
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.ident()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(FoFormula::Atom(name, args));
        }
        if self.eat("=") {
            return Ok(FoFormula::Eq(name, self.ident()?));
        }
        if self.eat("!=") {
            return Ok(FoFormula::Not(Box::new(FoFormula::Eq(name, self.ident()?))));
        }
        Err(Error::parse(self.line, format!("variable {name} outside an atom")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wqbf::solve_wqbf;

    #[test]
    fn unary_relation_example() {
        let (s, phi) = parse_fo("dom a\nrel R/1 (a)\nsentence exists x forall y : R(x)\n").unwrap();
        assert!(fo_model_check(&s, &phi).unwrap());
        let inst = fo_mc_to_wqbf(&s, &phi).unwrap();
        assert_eq!(inst.parameter(), 1);
        assert!(solve_wqbf(&inst).unwrap().is_yes());
    }

    #[test]
    fn parse_write_roundtrip() {
        let text = "dom a b c\nrel E/2 (a,b) (b,c)\nsentence exists x1 forall y1 : (E(x1,y1) | x1 = y1) -> !E(y1,x1) & x1 != y1\n";
        let (s, phi) = parse_fo(text).unwrap();
        let (s2, phi2) = parse_fo(&write_fo(&s, &phi)).unwrap();
        assert_eq!(s, s2);
        assert_eq!(phi, phi2);
    }

    #[test]
    fn unicode_operators() {
        let (_, phi) = parse_fo("dom a\nrel R/1 (a)\nsentence ∃ x ∀ y : ¬R(x) ∨ R(y) ∧ x ≠ y → x = y\n").unwrap();
        assert!(matches!(phi.matrix, FoFormula::Implies(..)));
    }

    #[test]
    fn rejects_free_and_unknown() {
        assert!(parse_fo("dom a\nsentence exists x : R(x)\n").is_err());
        assert!(parse_fo("dom a\nrel R/1\nsentence exists x : R(z)\n").is_err());
        assert!(parse_fo("dom a\nrel R/2 (a)\nsentence exists x : true\n").is_err());
    }
}
