use crate::logic::{Assignment, VarId, WeightSpec};

/// True-sets (as ascending index lists) over `n` variables admitted by a
/// weight spec, in lexicographic order. `ExactComplement(k)` yields the
/// complements of the `Exact(k)` sets in their order.
#[derive(Clone, Debug)]
pub struct WeightSets {
    n: usize,
    lo: usize,
    hi: usize,
    complement: bool,
    cur: Vec<usize>,
    started: bool,
    done: bool,
}

impl WeightSets {
    pub fn new(n: usize, w: WeightSpec) -> Self {
        let (lo, hi, complement) = match w {
            WeightSpec::Exact(k) => (k, k, false),
            WeightSpec::AtMost(k) => (0, k.min(n), false),
            WeightSpec::AtLeast(k) => (k, n, false),
            WeightSpec::ExactComplement(k) => (k, k, true),
            WeightSpec::Free => (0, n, false),
        };
        WeightSets { n, lo, hi, complement, cur: Vec::new(), started: false, done: lo > n || lo > hi }
    }

    /// Next subset in preorder of the subset tree, not extending past `hi`.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        let next = self.cur.last().map_or(0, |&l| l + 1);
        if self.cur.len() < self.hi && next < self.n {
            self.cur.push(next);
            return true;
        }
        while let Some(l) = self.cur.pop() {
            // Need room for the remaining elements required to reach `lo`.
            let need = self.lo.saturating_sub(self.cur.len() + 1);
            if l + 1 + need < self.n {
                self.cur.push(l + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for WeightSets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            if self.cur.len() >= self.lo && self.cur.len() <= self.hi {
                if self.complement {
                    let mut out = Vec::with_capacity(self.n - self.cur.len());
                    let mut it = self.cur.iter().peekable();
                    for i in 0..self.n {
                        if it.peek() == Some(&&i) {
                            it.next();
                        } else {
                            out.push(i);
                        }
                    }
                    return Some(out);
                }
                return Some(self.cur.clone());
            }
        }
        None
    }
}

/// Total assignments over `vars` admitted by `w`, in lexicographic order of
/// their true-sets with respect to the order of `vars`.
pub fn enumerate_weight_assignments(vars: &[VarId], w: WeightSpec) -> impl Iterator<Item = Assignment> + '_ {
    WeightSets::new(vars.len(), w).map(move |set| {
        let mut a = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), false)));
        for i in set {
            a.set(vars[i].clone(), true);
        }
        a
    })
}
