//! Bridges out of the doubly weighted fragment and the QSat₂ block split.

use std::collections::HashMap;

use super::{fresh_for, precondition, threshold};
use crate::error::Result;
use crate::logic::{Builder, Circuit, NodeId, Quant, VarId, WeightSpec, WqbfInstance};
use crate::sat::Tseitin;

fn both_exact(inst: &WqbfInstance) -> Result<(usize, usize)> {
    match (inst.outer_weight, inst.inner_weight) {
        (WeightSpec::Exact(k1), WeightSpec::Exact(k2)) => Ok((k1, k2)),
        (w1, w2) => Err(precondition(format!("expected exact weights on both blocks, found {w1} and {w2}"))),
    }
}

/// Frees the inner block: the matrix becomes `B → C` (inner ∀) or `B ∧ C`
/// (inner ∃), with `B` an exactly-`k` circuit over the inner variables.
pub fn doubly_weighted_to_kstar(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let (_, k) = both_exact(inst)?;
    let mut b = Builder::new();
    let guard = b.embed(&threshold::exactly_k_circuit(&inst.inner_vars, k));
    let body = b.embed(&inst.matrix);
    let out = match inst.inner_kind {
        Quant::Forall => b.implies(guard, body),
        Quant::Exists => b.and2(guard, body),
    };
    Ok(WqbfInstance { inner_weight: WeightSpec::Free, matrix: b.finish(out), ..inst.clone() })
}

/// CNF forcing exactly `k` of `vars`, with Tseitin auxiliaries drawn from
/// `fresh`. Returns the CNF as a circuit and its auxiliaries.
fn exactly_cnf(vars: &[VarId], k: usize, fresh: crate::logic::Fresh) -> (Circuit, Vec<VarId>) {
    let mut t = Tseitin::new(fresh);
    let (out, _) = t.encode(&threshold::exactly_k_circuit(vars, k));
    t.assert(out);
    let cnf = t.into_cnf();
    let aux = cnf.vars().into_iter().filter(|v| !vars.contains(v)).collect();
    (Circuit::from_cnf(&cnf), aux)
}

/// Frees the leading block: the exactly-`k` circuit over it is Tseitin
/// encoded into `B′` whose auxiliaries `X′` join the leading block, and the
/// matrix becomes `B′ ∧ C` (leading ∃) or `B′ → C` (leading ∀).
pub fn doubly_weighted_to_stark(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let (k, _) = both_exact(inst)?;
    let (guard, aux) = exactly_cnf(&inst.outer_vars, k, fresh_for(inst));
    let mut b = Builder::new();
    let g = b.embed(&guard);
    let body = b.embed(&inst.matrix);
    let out = match inst.outer_kind {
        Quant::Exists => b.and2(g, body),
        Quant::Forall => b.implies(g, body),
    };
    let mut outer_vars = inst.outer_vars.clone();
    outer_vars.extend(aux);
    Ok(WqbfInstance {
        outer_vars,
        outer_weight: WeightSpec::Free,
        matrix: b.finish(out),
        ..inst.clone()
    })
}

/// Result of [`qsat2_block_split`] with the bookkeeping tests need.
#[derive(Clone, Debug)]
pub struct BlockSplit {
    pub instance: WqbfInstance,
    /// Number of groups per block, also the weight of both blocks.
    pub k: usize,
    /// Selector variables per block and group.
    pub groups: [Vec<Vec<VarId>>; 2],
}

/// `∃X₁ ∀X₂. ψ` (3DNF, both blocks free) to a doubly weighted instance.
///
/// Each block is split into `⌈n/r⌉` consecutive groups of at most `r`
/// variables, with one selector `y^α` per local assignment `α` of a group.
/// The matrix is `ψ_{Y₁} ∧ (ψ_{Y₂} → ψ″)` where `ψ_{Y_i}` allows at most one
/// selector per group and `ψ″` reads each `x` as the disjunction of the
/// selectors whose assignment makes `x` true. The smaller block is padded
/// with unused variables to equal size.
pub fn qsat2_block_split(inst: &WqbfInstance, r: usize) -> Result<BlockSplit> {
    if inst.outer_kind != Quant::Exists || !inst.outer_weight.is_free() || !inst.inner_weight.is_free() {
        return Err(precondition("block split needs an unweighted ∃∀ instance"));
    }
    match inst.matrix.to_dnf() {
        Some(d) if d.max_width() <= 3 => {}
        _ => return Err(precondition("block split needs a 3DNF matrix")),
    }
    let mut fresh = fresh_for(inst);
    let n = inst.outer_vars.len().max(inst.inner_vars.len());
    if r == 0 || r > n {
        return Err(precondition(format!("group size {r} must lie in 1..={n}")));
    }
    let mut blocks = [inst.outer_vars.clone(), inst.inner_vars.clone()];
    for block in &mut blocks {
        while block.len() < n {
            block.push(fresh.var("pad"));
        }
    }
    let k = n.div_ceil(r);
    let mut b = Builder::new();
    let mut chi: HashMap<VarId, NodeId> = HashMap::new();
    let mut groups: [Vec<Vec<VarId>>; 2] = [Vec::new(), Vec::new()];
    let mut amo = [Vec::new(), Vec::new()];
    for (i, block) in blocks.iter().enumerate() {
        for (j, chunk) in block.chunks(r).enumerate() {
            let sel: Vec<(u32, VarId)> = (0..1u32 << chunk.len())
                .map(|alpha| {
                    let bits: String = (0..chunk.len()).map(|p| if alpha >> p & 1 == 1 { '1' } else { '0' }).collect();
                    (alpha, fresh.var(&format!("y{}_{}_{bits}", i + 1, j + 1)))
                })
                .collect();
            let nodes: Vec<NodeId> = sel.iter().map(|(_, v)| b.input(v)).collect();
            for a in 0..nodes.len() {
                for c in a + 1..nodes.len() {
                    let na = b.not(nodes[a]);
                    let nc = b.not(nodes[c]);
                    amo[i].push(b.or2(na, nc));
                }
            }
            for (p, x) in chunk.iter().enumerate() {
                let on = sel.iter().zip(&nodes).filter(|((alpha, _), _)| alpha >> p & 1 == 1).map(|(_, &n)| n).collect();
                chi.insert(x.clone(), b.or(on));
            }
            groups[i].push(sel.into_iter().map(|(_, v)| v).collect());
        }
    }
    let psi = b.import(&inst.matrix, |_, v| chi[v]);
    let [amo1, amo2] = amo;
    let psi_y1 = b.and(amo1);
    let psi_y2 = b.and(amo2);
    let inner = b.implies(psi_y2, psi);
    let out = b.and2(psi_y1, inner);
    let flat = |g: &Vec<Vec<VarId>>| g.iter().flatten().cloned().collect::<Vec<_>>();
    let instance = WqbfInstance::exists_forall(
        flat(&groups[0]),
        WeightSpec::Exact(k),
        flat(&groups[1]),
        WeightSpec::Exact(k),
        b.finish(out),
    );
    Ok(BlockSplit { instance, k, groups })
}
