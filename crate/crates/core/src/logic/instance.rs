use std::collections::HashSet;
use std::fmt;

use super::{Circuit, VarId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

/// Weight restriction on a quantifier block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightSpec {
    Exact(usize),
    AtMost(usize),
    AtLeast(usize),
    /// Weight exactly `n - k` for a block of size `n`.
    ExactComplement(usize),
    Free,
}

impl WeightSpec {
    pub fn admits(self, weight: usize, n: usize) -> bool {
        match self {
            WeightSpec::Exact(k) => weight == k,
            WeightSpec::AtMost(k) => weight <= k,
            WeightSpec::AtLeast(k) => weight >= k,
            WeightSpec::ExactComplement(k) => k <= n && weight == n - k,
            WeightSpec::Free => true,
        }
    }

    pub fn is_free(self) -> bool {
        matches!(self, WeightSpec::Free)
    }

    pub fn bound(self) -> Option<usize> {
        match self {
            WeightSpec::Exact(k)
            | WeightSpec::AtMost(k)
            | WeightSpec::AtLeast(k)
            | WeightSpec::ExactComplement(k) => Some(k),
            WeightSpec::Free => None,
        }
    }

    /// Number of assignments over `n` variables admitted by this spec.
    pub fn count(self, n: usize) -> u128 {
        (0..=n).filter(|&w| self.admits(w, n)).map(|w| binomial(n, w)).sum()
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Exact(k) => write!(f, "exact {k}"),
            WeightSpec::AtMost(k) => write!(f, "atmost {k}"),
            WeightSpec::AtLeast(k) => write!(f, "atleast {k}"),
            WeightSpec::ExactComplement(k) => write!(f, "complement {k}"),
            WeightSpec::Free => write!(f, "free"),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Two-block weighted quantified instance `Q1 X1 [w1]. Q2 X2 [w2]. matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WqbfInstance {
    pub outer_kind: Quant,
    pub outer_vars: Vec<VarId>,
    pub outer_weight: WeightSpec,
    pub inner_kind: Quant,
    pub inner_vars: Vec<VarId>,
    pub inner_weight: WeightSpec,
    pub matrix: Circuit,
}

impl WqbfInstance {
    /// `∃ outer [w1]. ∀ inner [w2]. matrix`
    pub fn exists_forall(
        outer: Vec<VarId>,
        w1: WeightSpec,
        inner: Vec<VarId>,
        w2: WeightSpec,
        matrix: Circuit,
    ) -> Self {
        WqbfInstance {
            outer_kind: Quant::Exists,
            outer_vars: outer,
            outer_weight: w1,
            inner_kind: Quant::Forall,
            inner_vars: inner,
            inner_weight: w2,
            matrix,
        }
    }

    /// `∀ outer [w1]. ∃ inner [w2]. matrix`
    pub fn forall_exists(
        outer: Vec<VarId>,
        w1: WeightSpec,
        inner: Vec<VarId>,
        w2: WeightSpec,
        matrix: Circuit,
    ) -> Self {
        WqbfInstance {
            outer_kind: Quant::Forall,
            outer_vars: outer,
            outer_weight: w1,
            inner_kind: Quant::Exists,
            inner_vars: inner,
            inner_weight: w2,
            matrix,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_kind == self.inner_kind {
            return Err(Error::Invalid("both blocks have the same quantifier".into()));
        }
        let mut seen = HashSet::new();
        for v in self.outer_vars.iter().chain(&self.inner_vars) {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("variable `{v}` is quantified twice")));
            }
        }
        for v in self.matrix.inputs() {
            if !seen.contains(&v) {
                return Err(Error::Invalid(format!("matrix variable `{v}` is not quantified")));
            }
        }
        for (vars, w) in [(&self.outer_vars, self.outer_weight), (&self.inner_vars, self.inner_weight)] {
            if let WeightSpec::Exact(k) | WeightSpec::ExactComplement(k) = w {
                if k > vars.len() {
                    return Err(Error::Invalid(format!(
                        "weight {k} exceeds block size {}",
                        vars.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.outer_vars.len() + self.inner_vars.len()
    }

    pub fn all_vars(&self) -> Vec<VarId> {
        self.outer_vars.iter().chain(&self.inner_vars).cloned().collect()
    }

    /// The parameter: the weight bound of the leading block, or of the inner
    /// block when the leading one is free.
    pub fn parameter(&self) -> usize {
        self.outer_weight.bound().or(self.inner_weight.bound()).unwrap_or(0)
    }

    /// Same answer negated: `¬(Q1 X. Q2 Y. φ) = Q1' X. Q2' Y. ¬φ`.
    pub fn dual(&self) -> WqbfInstance {
        WqbfInstance {
            outer_kind: self.outer_kind.dual(),
            inner_kind: self.inner_kind.dual(),
            matrix: self.matrix.negate_nnf(),
            ..self.clone()
        }
    }
}
