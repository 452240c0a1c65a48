use std::collections::BTreeMap;
use std::fmt;

use super::VarId;

/// Partial truth assignment. Iteration follows variable order.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Assignment {
    map: BTreeMap<VarId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &VarId) -> Option<bool> {
        self.map.get(v).copied()
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.map.insert(v, value);
    }

    pub fn contains(&self, v: &VarId) -> bool {
        self.map.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Number of variables mapped to true.
    pub fn weight(&self) -> usize {
        self.map.values().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, bool)> {
        self.map.iter().map(|(k, &v)| (k, v))
    }

    pub fn true_vars(&self) -> impl Iterator<Item = &VarId> {
        self.map.iter().filter(|(_, &v)| v).map(|(k, _)| k)
    }

    /// Union with `other`; entries of `other` win on overlap.
    pub fn union(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.set(k.clone(), v);
        }
        out
    }

    /// Restriction to the given variables.
    pub fn restrict(&self, vars: &[VarId]) -> Assignment {
        let mut out = Assignment::new();
        for v in vars {
            if let Some(b) = self.get(v) {
                out.set(v.clone(), b);
            }
        }
        out
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, bool)>>(pairs: I) -> Self {
        Assignment { map: pairs.into_iter().collect() }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}={}", k, u8::from(v))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Number of variables mapped to true.
pub fn assignment_weight(a: &Assignment) -> usize {
    a.weight()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_counts_true_entries() {
        assert_eq!(assignment_weight(&Assignment::new()), 0);
        let a = Assignment::from_pairs([
            (VarId::new("x"), true),
            (VarId::new("y"), false),
            (VarId::new("z"), true),
        ]);
        assert_eq!(assignment_weight(&a), 2);
    }
}
