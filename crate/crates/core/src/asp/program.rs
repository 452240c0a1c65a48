use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::VarId;

/// `a₁ ∨ … ∨ a_k ← b₁, …, b_m, not c₁, …, not c_n`. Each part keeps the
/// order of first mention and holds no duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<VarId>,
    pub pos: Vec<VarId>,
    pub neg: Vec<VarId>,
}

fn dedup(v: Vec<VarId>) -> Vec<VarId> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|a| seen.insert(a.clone())).collect()
}

impl Rule {
    pub fn new(head: Vec<VarId>, pos: Vec<VarId>, neg: Vec<VarId>) -> Self {
        Rule { head: dedup(head), pos: dedup(pos), neg: dedup(neg) }
    }

    pub fn fact(a: &VarId) -> Self {
        Rule::new(vec![a.clone()], vec![], vec![])
    }

    pub fn constraint(pos: Vec<VarId>, neg: Vec<VarId>) -> Self {
        Rule::new(vec![], pos, neg)
    }

    pub fn is_disjunctive(&self) -> bool {
        self.head.len() > 1
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &VarId> {
        self.head.iter().chain(&self.pos).chain(&self.neg)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<&str> = self.head.iter().map(VarId::name).collect();
        write!(f, "{}", head.join(" | "))?;
        let body: Vec<String> = self
            .pos
            .iter()
            .map(|a| a.name().to_string())
            .chain(self.neg.iter().map(|a| format!("not {}", a.name())))
            .collect();
        if !body.is_empty() {
            if !head.is_empty() {
                write!(f, " ")?;
            }
            write!(f, ":- {}", body.join(", "))?;
        } else if head.is_empty() {
            write!(f, ":-")?;
        }
        write!(f, ".")
    }
}

/// Disjunctive logic program; rule order is significant only for output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    /// `Atoms(P)` in order of first occurrence.
    pub fn atoms(&self) -> Vec<VarId> {
        let mut seen = HashSet::new();
        self.rules.iter().flat_map(Rule::atoms).filter(|a| seen.insert((*a).clone())).cloned().collect()
    }

    pub fn atom_set(&self) -> BTreeSet<VarId> {
        self.rules.iter().flat_map(Rule::atoms).cloned().collect()
    }

    pub fn push(&mut self, r: Rule) {
        self.rules.push(r);
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Whether `s` can be written and re-read as an atom.
pub(crate) fn is_atom_name(s: &str) -> bool {
    is_ident(s) && s != "not"
}

fn atom(line: usize, s: &str) -> Result<VarId> {
    let s = s.trim();
    if !is_ident(s) || s == "not" {
        return Err(Error::parse(line, format!("`{s}` is not an atom")));
    }
    Ok(VarId::new(s))
}

/// Parses one rule per line: `a | b :- c, not d.`, facts `a.`, constraints
/// `:- a, b.`. `%` starts a comment.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let src = raw.split('%').next().unwrap_or("").trim();
        if src.is_empty() {
            continue;
        }
        let src = src.strip_suffix('.').ok_or_else(|| Error::parse(line, "rule must end with `.`"))?;
        let (head, body) = match src.split_once(":-") {
            Some((h, b)) => (h.trim(), b.trim()),
            None => (src.trim(), ""),
        };
        if head.is_empty() && !src.contains(":-") {
            return Err(Error::parse(line, "empty rule"));
        }
        let head = if head.is_empty() {
            vec![]
        } else {
            head.split('|').map(|a| atom(line, a)).collect::<Result<_>>()?
        };
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        if !body.is_empty() {
            for lit in body.split(',') {
                let lit = lit.trim();
                match lit.strip_prefix("not ") {
                    Some(a) => neg.push(atom(line, a)?),
                    None => pos.push(atom(line, lit)?),
                }
            }
        }
        rules.push(Rule::new(head, pos, neg));
    }
    Ok(Program::new(rules))
}

pub fn write_program(p: &Program) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p = parse_program("a | b :- c, d, not e.\nf.\n:- a, b. % comment\n% only comment\n:- .\n").unwrap();
        assert_eq!(p.rules.len(), 4);
        assert_eq!(p.rules[0].head.len(), 2);
        assert_eq!(p.rules[0].neg, vec![VarId::new("e")]);
        assert!(p.rules[2].is_constraint());
        assert!(p.rules[3].pos.is_empty() && p.rules[3].head.is_empty());
        assert_eq!(parse_program(&write_program(&p)).unwrap(), p);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_program("a :- b"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_program("ok.\na :- 1b.").is_err());
        assert!(parse_program("a :- not.").is_err());
    }
}
