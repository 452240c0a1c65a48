//! Cardinality circuits built from a sequential unary counter.
//!
//! After reading inputs `x_1..x_i`, node `c[j]` is true iff at least `j` of
//! them are true, for `j` up to the needed bound. Layout is deterministic.

use crate::logic::{Builder, Circuit, NodeId, VarId};

/// Counter nodes `c[0..=t]` over `inputs`: `c[j]` holds iff at least `j`
/// inputs are true.
pub fn counter(b: &mut Builder, inputs: &[NodeId], t: usize) -> Vec<NodeId> {
    let tru = b.constant(true);
    let fls = b.constant(false);
    let mut c: Vec<NodeId> = (0..=t).map(|j| if j == 0 { tru } else { fls }).collect();
    for &x in inputs {
        let mut next = c.clone();
        for j in 1..=t {
            let carry = b.and_simpl(vec![x, c[j - 1]]);
            next[j] = b.or_simpl(vec![c[j], carry]);
        }
        c = next;
    }
    c
}

/// Node true iff at least `t` of `inputs` are true. Uses only `and`/`or`,
/// so it is monotone in its inputs.
pub fn at_least(b: &mut Builder, inputs: &[NodeId], t: usize) -> NodeId {
    if t == 0 {
        return b.constant(true);
    }
    if t > inputs.len() {
        return b.constant(false);
    }
    counter(b, inputs, t)[t]
}

/// Node true iff exactly `k` of `inputs` are true.
pub fn exactly(b: &mut Builder, inputs: &[NodeId], k: usize) -> NodeId {
    if k > inputs.len() {
        return b.constant(false);
    }
    let c = counter(b, inputs, k + 1);
    let over = b.not_simpl(c[k + 1]);
    b.and_simpl(vec![c[k], over])
}

/// Circuit over `vars` true iff exactly `k` of them are true.
pub fn exactly_k_circuit(vars: &[VarId], k: usize) -> Circuit {
    let mut b = Builder::new();
    let ins: Vec<NodeId> = vars.iter().map(|v| b.input(v)).collect();
    let o = exactly(&mut b, &ins, k);
    b.finish(o)
}

/// Circuit over `vars` true iff at least `t` of them are true.
pub fn at_least_circuit(vars: &[VarId], t: usize) -> Circuit {
    let mut b = Builder::new();
    let ins: Vec<NodeId> = vars.iter().map(|v| b.input(v)).collect();
    let o = at_least(&mut b, &ins, t);
    b.finish(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Assignment;

    #[test]
    fn truth_tables() {
        for n in 0..=6 {
            let vars: Vec<VarId> = (0..n).map(|i| VarId::new(&format!("v{i}"))).collect();
            for k in 0..=n + 1 {
                let ex = exactly_k_circuit(&vars, k);
                let al = at_least_circuit(&vars, k);
                for bits in 0u32..1 << n {
                    let a = Assignment::from_pairs(vars.iter().enumerate().map(|(i, v)| (v.clone(), bits >> i & 1 == 1)));
                    let w = bits.count_ones() as usize;
                    assert_eq!(ex.eval(&a).unwrap(), w == k);
                    assert_eq!(al.eval(&a).unwrap(), w >= k);
                }
            }
        }
    }

    #[test]
    fn exactly_zero_is_all_false() {
        let vars = [VarId::new("a"), VarId::new("b")];
        let c = exactly_k_circuit(&vars, 0);
        let all_false = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), false)));
        assert!(c.eval(&all_false).unwrap());
    }
}
