//! Monotonization of the universal block of an `∃*∀^k` instance.

use std::collections::HashMap;

use super::{fresh_for, precondition, threshold};
use crate::error::Result;
use crate::logic::{Builder, Gate, NodeId, Quant, VarId, WeightSpec, WqbfInstance};

/// `∃X ∀^k Y. C` to `∃X ∀^k Y′. C′` with `C′` monotone in `Y′`.
///
/// `Y′ = {y^i_j}` is a `k × m` grid. Positive `y_j` reads `⋁_i y^i_j`,
/// negative `y_j` reads `y′_j = ⋀_i ⋁_{j′≠j} y^i_{j′}`. Grids with two picks
/// in a row (`z_i`) or fewer than `k` distinct columns (`B`) make `C′` true.
pub fn monotonize_universal(inst: &WqbfInstance) -> Result<WqbfInstance> {
    let WeightSpec::Exact(k) = inst.inner_weight else {
        return Err(precondition("monotonization needs an exact inner weight"));
    };
    if inst.inner_kind != Quant::Forall {
        return Err(precondition("monotonization needs a universal inner block"));
    }
    let m = inst.inner_vars.len();
    let mut fresh = fresh_for(inst);
    let grid: Vec<Vec<VarId>> = (0..k)
        .map(|i| (0..m).map(|j| fresh.var(&format!("y{}_{}", i + 1, j + 1))).collect())
        .collect();
    let matrix = if inst.matrix.is_nnf() { inst.matrix.clone() } else { inst.matrix.to_nnf() };

    let mut b = Builder::new();
    let g: Vec<Vec<NodeId>> = grid.iter().map(|row| row.iter().map(|v| b.input(v)).collect()).collect();
    let pos: Vec<NodeId> = (0..m).map(|j| b.or(g.iter().map(|row| row[j]).collect())).collect();
    let neg: Vec<NodeId> = (0..m)
        .map(|j| {
            let per_row = g
                .iter()
                .map(|row| b.or(row.iter().enumerate().filter(|&(j2, _)| j2 != j).map(|(_, &n)| n).collect()))
                .collect();
            b.and(per_row)
        })
        .collect();
    let mut guards = Vec::new();
    for row in &g {
        let mut pairs = Vec::new();
        for j in 0..m {
            for j2 in j + 1..m {
                pairs.push(b.and2(row[j], row[j2]));
            }
        }
        guards.push(b.or(pairs));
    }
    let need = (m + 1).saturating_sub(k);
    let few = threshold::at_least(&mut b, &neg, need);

    let index: HashMap<&VarId, usize> = inst.inner_vars.iter().enumerate().map(|(j, v)| (v, j)).collect();
    let live = matrix.cone();
    let gates = matrix.gates();
    let mut map = vec![usize::MAX; gates.len()];
    for (i, gate) in gates.iter().enumerate() {
        if !live[i] {
            continue;
        }
        map[i] = match gate {
            Gate::Input(v) => match index.get(v) {
                Some(&j) => pos[j],
                None => b.input(v),
            },
            Gate::Const(c) => b.constant(*c),
            Gate::Not(a) => match &gates[*a] {
                Gate::Input(v) => match index.get(v) {
                    Some(&j) => neg[j],
                    None => {
                        let x = b.input(v);
                        b.not(x)
                    }
                },
                Gate::Const(c) => b.constant(!*c),
                _ => unreachable!("matrix is in NNF"),
            },
            Gate::And(cs) => b.and(cs.iter().map(|&c| map[c]).collect()),
            Gate::Or(cs) => b.or(cs.iter().map(|&c| map[c]).collect()),
        };
    }
    let mut top = guards;
    top.push(map[matrix.output()]);
    top.push(few);
    let out = b.or(top);
    Ok(WqbfInstance {
        inner_vars: grid.into_iter().flatten().collect(),
        matrix: b.finish(out),
        ..inst.clone()
    })
}

/// True when no `Not` gate in the output cone has one of `vars` below it.
pub fn is_monotone_in(c: &crate::logic::Circuit, vars: &[VarId]) -> bool {
    let live = c.cone();
    let gates = c.gates();
    let mut mentions = vec![false; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        mentions[i] = match g {
            Gate::Input(v) => vars.contains(v),
            Gate::Const(_) => false,
            Gate::Not(a) => mentions[*a],
            Gate::And(cs) | Gate::Or(cs) => cs.iter().any(|&x| mentions[x]),
        };
        if live[i] && matches!(g, Gate::Not(_)) && mentions[i] {
            return false;
        }
    }
    true
}
