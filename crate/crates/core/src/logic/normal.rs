//! Literals, clauses, terms and the CNF/DNF containers.

use std::collections::HashSet;
use std::fmt;

use super::VarId;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: VarId) -> Self {
        Literal { var, positive: false }
    }

    pub fn new(var: VarId, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn negated(&self) -> Self {
        Literal { var: self.var.clone(), positive: !self.positive }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

/// Duplicate-free literal list in first-occurrence order; rejects `x, -x`.
fn literal_set(lits: Vec<Literal>) -> Result<Vec<Literal>> {
    let mut seen: HashSet<&Literal> = HashSet::new();
    for l in &lits {
        if seen.contains(&l.negated()) {
            return Err(Error::Invalid(format!("complementary pair on `{}`", l.var)));
        }
        seen.insert(l);
    }
    let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
    for l in lits {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Ok(out)
}

macro_rules! literal_set_type {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, Hash, Default)]
        pub struct $name {
            lits: Vec<Literal>,
        }

        impl $name {
            pub fn new(lits: Vec<Literal>) -> Result<Self> {
                Ok($name { lits: literal_set(lits)? })
            }

            pub fn literals(&self) -> &[Literal] {
                &self.lits
            }

            pub fn len(&self) -> usize {
                self.lits.len()
            }

            pub fn is_empty(&self) -> bool {
                self.lits.is_empty()
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.lits.iter()).finish()
            }
        }
    };
}

literal_set_type!(Clause);
literal_set_type!(Term);

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Cnf {
    pub clauses: Vec<Clause>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Dnf {
    pub terms: Vec<Term>,
}

fn vars_of<'a>(sets: impl Iterator<Item = &'a [Literal]>) -> Vec<VarId> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for lits in sets {
        for l in lits {
            if seen.insert(l.var.clone()) {
                out.push(l.var.clone());
            }
        }
    }
    out
}

impl Cnf {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Cnf { clauses }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<VarId> {
        vars_of(self.clauses.iter().map(|c| c.literals()))
    }

    pub fn eval(&self, a: &super::Assignment) -> Result<bool> {
        for c in &self.clauses {
            let mut sat = false;
            for l in c.literals() {
                let v = a.get(&l.var).ok_or_else(|| Error::Unassigned(l.var.clone()))?;
                if v == l.positive {
                    sat = true;
                    break;
                }
            }
            if !sat {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Dnf {
    pub fn new(terms: Vec<Term>) -> Self {
        Dnf { terms }
    }

    pub fn vars(&self) -> Vec<VarId> {
        vars_of(self.terms.iter().map(|t| t.literals()))
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.terms.iter().map(Term::len).sum()
    }

    pub fn max_width(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    pub fn eval(&self, a: &super::Assignment) -> Result<bool> {
        for t in &self.terms {
            let mut sat = true;
            for l in t.literals() {
                let v = a.get(&l.var).ok_or_else(|| Error::Unassigned(l.var.clone()))?;
                if v != l.positive {
                    sat = false;
                    break;
                }
            }
            if sat {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
