use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// Prefix reserved for variables introduced by encoders and reductions.
pub const FRESH_PREFIX: char = '_';

/// Interned variable name. Ordering is the lexicographic order of names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: &str) -> Self {
        VarId(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId::new(s)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Generator of fresh variables `_<role>_<n>` with a monotone counter.
///
/// Names already taken by the instance being transformed are skipped, so a
/// fresh variable never coincides with an input variable.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    taken: HashSet<VarId>,
    counter: u64,
}

impl Fresh {
    pub fn avoiding<'a, I: IntoIterator<Item = &'a VarId>>(vars: I) -> Self {
        Fresh {
            taken: vars.into_iter().cloned().collect(),
            counter: 0,
        }
    }

    pub fn avoid(&mut self, v: &VarId) {
        self.taken.insert(v.clone());
    }

    pub fn var(&mut self, role: &str) -> VarId {
        loop {
            let v = VarId::new(&format!("{FRESH_PREFIX}{role}_{}", self.counter));
            self.counter += 1;
            if self.taken.insert(v.clone()) {
                return v;
            }
        }
    }
}
