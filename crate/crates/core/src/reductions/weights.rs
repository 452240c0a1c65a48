//! Bridges between weight specifications on the leading block.

use super::{fresh_for, precondition, threshold};
use crate::error::Result;
use crate::logic::{Builder, Circuit, Cnf, Fresh, NodeId, Quant, VarId, WeightSpec, WqbfInstance};
use crate::sat::Tseitin;

fn exact_outer(inst: &WqbfInstance, what: &str) -> Result<usize> {
    match inst.outer_weight {
        WeightSpec::Exact(k) => Ok(k),
        w => Err(precondition(format!("{what} needs an exact leading weight, found {w}"))),
    }
}

/// Selection-matrix gadget over `xs` and `z[i][j]` (column `i < k`, row
/// `j < n`): true iff the true `z` form a partial permutation with exactly
/// one per column and the true `x` are exactly the selected rows.
fn selection_gadget(b: &mut Builder, xs: &[NodeId], z: &[Vec<NodeId>]) -> NodeId {
    let n = xs.len();
    let mut parts = Vec::new();
    for j in 0..n {
        for col in z {
            let nz = b.not(col[j]);
            parts.push(b.or2(nz, xs[j]));
        }
        let nx = b.not(xs[j]);
        let mut some = vec![nx];
        some.extend(z.iter().map(|col| col[j]));
        parts.push(b.or(some));
    }
    for j in 0..n {
        for i in 0..z.len() {
            for i2 in i + 1..z.len() {
                let a = b.not(z[i][j]);
                let c = b.not(z[i2][j]);
                parts.push(b.or2(a, c));
            }
        }
    }
    for col in z {
        for j in 0..n {
            for j2 in j + 1..n {
                let a = b.not(col[j]);
                let c = b.not(col[j2]);
                parts.push(b.or2(a, c));
            }
        }
        parts.push(b.or(col.clone()));
    }
    b.and(parts)
}

fn matrix_vars(fresh: &mut Fresh, role: &str, rows: usize, cols: usize) -> Vec<Vec<VarId>> {
    (0..cols)
        .map(|i| (0..rows).map(|j| fresh.var(&format!("{role}{}_{}", i + 1, j + 1))).collect())
        .collect()
}

/// Makes the matrix true (leading ∃) or false (leading ∀) under every
/// off-weight leading assignment, by adding `k·n` inner variables `z^i_j`.
pub fn pad_exact_offweight(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let k = exact_outer(inst, "off-weight padding")?;
    if !inst.inner_weight.is_free() {
        return Err(precondition("off-weight padding needs a free inner block"));
    }
    let mut fresh = fresh_for(inst);
    let z = matrix_vars(&mut fresh, "z", inst.outer_vars.len(), k);
    let mut b = Builder::new();
    let xs: Vec<NodeId> = inst.outer_vars.iter().map(|v| b.input(v)).collect();
    let zn: Vec<Vec<NodeId>> = z.iter().map(|col| col.iter().map(|v| b.input(v)).collect()).collect();
    let gadget = selection_gadget(&mut b, &xs, &zn);
    let psi = b.embed(&inst.matrix);
    let out = match inst.outer_kind {
        Quant::Exists => b.implies(gadget, psi),
        Quant::Forall => b.and2(gadget, psi),
    };
    let mut inner_vars = inst.inner_vars.clone();
    inner_vars.extend(z.into_iter().flatten());
    Ok(WqbfInstance { inner_vars, matrix: b.finish(out), ..inst.clone() })
}

/// `AtMost(k)` to `Exact(k)` by adding `k` unused padding variables.
pub fn atmost_to_exact(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let WeightSpec::AtMost(k) = inst.outer_weight else {
        return Err(precondition(format!("expected an atmost leading weight, found {}", inst.outer_weight)));
    };
    let mut fresh = fresh_for(inst);
    let mut outer_vars = inst.outer_vars.clone();
    outer_vars.extend((0..k).map(|_| fresh.var("xp")));
    Ok(WqbfInstance { outer_vars, outer_weight: WeightSpec::Exact(k), ..inst.clone() })
}

/// `Exact(k)` to `AtMost(2k)` with a `k`-column selection matrix `c^i_j`
/// joining the leading block.
pub fn exact_to_atmost(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let k = exact_outer(inst, "exact-to-atmost")?;
    let n = inst.outer_vars.len();
    let mut fresh = fresh_for(inst);
    let c = matrix_vars(&mut fresh, "c", n, k);
    let mut b = Builder::new();
    let xs: Vec<NodeId> = inst.outer_vars.iter().map(|v| b.input(v)).collect();
    let cn: Vec<Vec<NodeId>> = c.iter().map(|col| col.iter().map(|v| b.input(v)).collect()).collect();
    let mut parts = Vec::new();
    // Exactly one per column.
    for col in &cn {
        let mut inner = vec![b.or(col.clone())];
        for j in 0..n {
            for j2 in j + 1..n {
                let a = b.not(col[j]);
                let d = b.not(col[j2]);
                inner.push(b.or2(a, d));
            }
        }
        parts.push(b.and(inner));
    }
    // At most one per row.
    for j in 0..n {
        for i in 0..k {
            for i2 in i + 1..k {
                let a = b.not(cn[i][j]);
                let d = b.not(cn[i2][j]);
                parts.push(b.or2(a, d));
            }
        }
    }
    // Selection implies the row variable.
    for col in &cn {
        for j in 0..n {
            parts.push(b.implies(col[j], xs[j]));
        }
    }
    let gadget = b.and(parts);
    let psi = b.embed(&inst.matrix);
    let out = match inst.outer_kind {
        Quant::Exists => b.and2(gadget, psi),
        Quant::Forall => b.implies(gadget, psi),
    };
    let mut outer_vars = inst.outer_vars.clone();
    outer_vars.extend(c.into_iter().flatten());
    Ok(WqbfInstance {
        outer_vars,
        outer_weight: WeightSpec::AtMost(2 * k),
        matrix: b.finish(out),
        ..inst.clone()
    })
}

/// `ExactComplement(k)` to `Exact(k)`: every leading `x` is replaced by
/// `¬x̂` for a fresh `x̂`.
pub fn complement_outer_weight(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let WeightSpec::ExactComplement(k) = inst.outer_weight else {
        return Err(precondition(format!("expected a complement leading weight, found {}", inst.outer_weight)));
    };
    let mut fresh = fresh_for(inst);
    let hats: Vec<VarId> = inst.outer_vars.iter().map(|x| fresh.var(&format!("{x}_hat"))).collect();
    let map: std::collections::HashMap<&VarId, &VarId> = inst.outer_vars.iter().zip(&hats).collect();
    let mut b = Builder::new();
    let out = b.import(&inst.matrix, |b, v| match map.get(v) {
        Some(h) => {
            let n = b.input(h);
            b.not(n)
        }
        None => b.input(v),
    });
    Ok(WqbfInstance {
        outer_vars: hats,
        outer_weight: WeightSpec::Exact(k),
        matrix: b.finish(out),
        ..inst.clone()
    })
}

/// CNF over `vars` and fresh auxiliaries that is satisfiable under an
/// assignment to `vars` iff at least `k` of them are true. Returns the CNF
/// and its auxiliary variables.
pub fn atleast_gadget(vars: &[VarId], k: usize, fresh: Fresh) -> (Cnf, Vec<VarId>) {
    let mut t = Tseitin::new(fresh);
    let (out, _) = t.encode(&threshold::at_least_circuit(vars, k));
    t.assert(out);
    let cnf = t.into_cnf();
    let aux = cnf.vars().into_iter().filter(|v| !vars.contains(v)).collect();
    (cnf, aux)
}

fn combine(chi: &Cnf, psi: &Circuit, guard: bool) -> Circuit {
    let mut b = Builder::new();
    let c = b.embed(&Circuit::from_cnf(chi));
    let p = b.embed(psi);
    let out = if guard { b.implies(c, p) } else { b.and2(c, p) };
    b.finish(out)
}

/// Leading `AtLeast(k)` with free inner block to an unweighted instance.
/// The cardinality gadget's auxiliaries join the leading block; the matrix
/// is `χ ∧ ψ` (leading ∃) or `χ → ψ` (leading ∀).
pub fn atleast_outer_to_plain_qbf(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let WeightSpec::AtLeast(k) = inst.outer_weight else {
        return Err(precondition(format!("expected an atleast leading weight, found {}", inst.outer_weight)));
    };
    if !inst.inner_weight.is_free() {
        return Err(precondition("expected a free inner block"));
    }
    let (chi, aux) = atleast_gadget(&inst.outer_vars, k, fresh_for(inst));
    let mut outer_vars = inst.outer_vars.clone();
    outer_vars.extend(aux);
    Ok(WqbfInstance {
        outer_vars,
        outer_weight: WeightSpec::Free,
        matrix: combine(&chi, &inst.matrix, inst.outer_kind == Quant::Forall),
        ..inst.clone()
    })
}

/// Inner `AtLeast(k)` with free leading block to an unweighted instance,
/// with the gadget's auxiliaries joining the inner block.
pub fn atleast_inner_to_plain_qbf(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let WeightSpec::AtLeast(k) = inst.inner_weight else {
        return Err(precondition(format!("expected an atleast inner weight, found {}", inst.inner_weight)));
    };
    if !inst.outer_weight.is_free() {
        return Err(precondition("expected a free leading block"));
    }
    let (chi, aux) = atleast_gadget(&inst.inner_vars, k, fresh_for(inst));
    let mut inner_vars = inst.inner_vars.clone();
    inner_vars.extend(aux);
    Ok(WqbfInstance {
        inner_vars,
        inner_weight: WeightSpec::Free,
        matrix: combine(&chi, &inst.matrix, inst.inner_kind == Quant::Forall),
        ..inst.clone()
    })
}
