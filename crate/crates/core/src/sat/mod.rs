//! SAT back end: built-in CDCL solver, Tseitin encoding, DIMACS interop and
//! hand-off to an external solver binary.

pub mod cdcl;
mod external;
mod tseitin;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

pub use tseitin::{tseitin_cnf, Tseitin};

use crate::error::{Error, Result};
use crate::logic::format::{parse_dimacs_cnf, write_dimacs_cnf};
use crate::logic::{Assignment, Circuit, Clause, Cnf, Literal, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    External { path: PathBuf, timeout: Duration },
}

pub const DEFAULT_CEILING: u64 = 2_000_000;
pub const DEFAULT_ORACLE_BOUND: usize = 16;
pub const SAT_EXEC_ENV: &str = "BEYONDNP_SAT_EXEC";
pub const SAT_TIMEOUT_ENV: &str = "BEYONDNP_SAT_TIMEOUT";

/// Solver configuration shared by every encoding pipeline, plus a counter of
/// SAT queries issued through it.
#[derive(Debug)]
pub struct Engine {
    pub backend: Backend,
    pub seed: u64,
    pub ceiling: u64,
    pub oracle_bound: usize,
    calls: AtomicU64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            backend: Backend::Builtin,
            seed: 0,
            ceiling: DEFAULT_CEILING,
            oracle_bound: DEFAULT_ORACLE_BOUND,
            calls: AtomicU64::new(0),
        }
    }
}

impl Clone for Engine {
    fn clone(&self) -> Self {
        Engine {
            backend: self.backend.clone(),
            seed: self.seed,
            ceiling: self.ceiling,
            oracle_bound: self.oracle_bound,
            calls: AtomicU64::new(0),
        }
    }
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Default engine, switched to an external solver when
    /// `BEYONDNP_SAT_EXEC` is set (`BEYONDNP_SAT_TIMEOUT` in seconds).
    pub fn from_env() -> Self {
        let mut e = Engine::default();
        if let Ok(path) = std::env::var(SAT_EXEC_ENV) {
            let secs = std::env::var(SAT_TIMEOUT_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(60);
            e.backend = Backend::External { path: path.into(), timeout: Duration::from_secs(secs) };
        }
        e
    }

    pub fn with_ceiling(mut self, ceiling: u64) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn with_oracle_bound(mut self, bound: usize) -> Self {
        self.oracle_bound = bound;
        self
    }

    /// Number of SAT queries issued so far.
    pub fn sat_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub fn check_ceiling(&self, what: &str, count: u128) -> Result<()> {
        if count > u128::from(self.ceiling) {
            return Err(Error::Ceiling { what: what.into(), count, ceiling: self.ceiling });
        }
        Ok(())
    }

    pub fn check_oracle_bound(&self, what: &str, size: usize) -> Result<()> {
        if size > self.oracle_bound {
            return Err(Error::OracleBound { what: what.into(), size, bound: self.oracle_bound });
        }
        Ok(())
    }

    /// Decides `f`. A returned model is total over `f`'s variables and has
    /// been checked against every clause.
    pub fn solve(&self, f: &Cnf) -> Result<SatResult> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let vars = f.vars();
        let res = match &self.backend {
            Backend::Builtin => {
                let index: HashMap<&VarId, u32> = vars.iter().zip(0u32..).collect();
                let dense: Vec<Vec<u32>> = f
                    .clauses
                    .iter()
                    .map(|c| c.literals().iter().map(|l| 2 * index[&l.var] + u32::from(!l.positive)).collect())
                    .collect();
                match cdcl::solve_dense(vars.len(), &dense, self.seed) {
                    Some(m) => SatResult::Sat(Assignment::from_pairs(vars.iter().cloned().zip(m))),
                    None => SatResult::Unsat,
                }
            }
            Backend::External { path, timeout } => external::solve(path, *timeout, f)?,
        };
        if let SatResult::Sat(m) = &res {
            let ok = f.eval(m).map_err(|e| Error::External(format!("model incomplete: {e}")))?;
            if !ok {
                return Err(Error::External("model violates a clause".into()));
            }
        }
        Ok(res)
    }

    /// Satisfiability of a circuit; the model is restricted to its inputs.
    pub fn solve_circuit(&self, c: &Circuit) -> Result<SatResult> {
        let (cnf, _) = tseitin_cnf(c);
        Ok(match self.solve(&cnf)? {
            SatResult::Sat(m) => SatResult::Sat(m.restrict(&c.inputs())),
            SatResult::Unsat => SatResult::Unsat,
        })
    }
}

/// Built-in solver with default settings.
pub fn solve_cnf(f: &Cnf) -> SatResult {
    Engine::default().solve(f).expect("built-in solver returns verified models")
}

/// Writes `f` as DIMACS and parses it back. Returns the reparsed CNF over
/// numeric names and the numbering used.
pub fn dimacs_roundtrip(f: &Cnf) -> Result<(Cnf, Vec<(VarId, u32)>)> {
    let (text, map) = write_dimacs_cnf(f);
    Ok((parse_dimacs_cnf(&text)?, map))
}

/// Renames a CNF through a numbering produced by [`dimacs_roundtrip`].
pub fn rename_back(f: &Cnf, map: &[(VarId, u32)]) -> Cnf {
    let back: HashMap<String, VarId> = map.iter().map(|(v, n)| (n.to_string(), v.clone())).collect();
    Cnf::new(
        f.clauses
            .iter()
            .map(|c| {
                Clause::new(
                    c.literals()
                        .iter()
                        .map(|l| Literal::new(back.get(l.var.name()).cloned().unwrap_or_else(|| l.var.clone()), l.positive))
                        .collect(),
                )
                .expect("renaming is injective")
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Literal {
        match s.strip_prefix('-') {
            Some(n) => Literal::neg(VarId::new(n)),
            None => Literal::pos(VarId::new(s)),
        }
    }

    fn cnf(cs: &[&[&str]]) -> Cnf {
        Cnf::new(cs.iter().map(|c| Clause::new(c.iter().map(|s| lit(s)).collect()).unwrap()).collect())
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_cnf(&cnf(&[&["x"], &["-x"]])), SatResult::Unsat);
        assert_eq!(solve_cnf(&Cnf::default()), SatResult::Sat(Assignment::new()));
    }

    #[test]
    fn tseitin_input_example() {
        let (f, map) = tseitin_cnf(&Circuit::var(&VarId::new("x")));
        let t = map[0].clone().unwrap();
        let t = t.name();
        let expected = cnf(&[&[t, "-x"], &[&format!("-{t}"), "x"], &[t]]);
        assert_eq!(f, expected);
    }

    #[test]
    fn tseitin_const_false_unsat() {
        let (f, _) = tseitin_cnf(&Circuit::constant(false));
        assert_eq!(solve_cnf(&f), SatResult::Unsat);
    }

    #[test]
    fn roundtrip_examples() {
        let (back, map) = dimacs_roundtrip(&Cnf::default()).unwrap();
        assert_eq!(back, Cnf::default());
        assert!(map.is_empty());
        let f = cnf(&[&["x", "-y"]]);
        let (back, map) = dimacs_roundtrip(&f).unwrap();
        assert_eq!(rename_back(&back, &map), f);
    }
}
