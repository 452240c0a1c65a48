use std::collections::{HashMap, HashSet};

use super::program::{is_atom_name, Program, Rule};
use super::semantics::atom_occurrences;
use crate::error::{Error, Result};
use crate::logic::{Fresh, Gate, Literal, Quant, VarId, WeightSpec, WqbfInstance};
use crate::reductions::is_monotone_in;

fn fresh_for(inst: &WqbfInstance) -> Fresh {
    let mut f = Fresh::avoiding(inst.all_vars().iter());
    for v in inst.matrix.inputs() {
        f.avoid(&v);
    }
    f
}

/// Renames variables whose names are not atoms (e.g. DIMACS numbers `3`) to
/// `a3`, avoiding names already in use.
fn atom_names(inst: &WqbfInstance) -> WqbfInstance {
    let mut taken: HashSet<VarId> = inst.all_vars().into_iter().chain(inst.matrix.inputs()).collect();
    let mut map = HashMap::new();
    for v in inst.all_vars().into_iter().chain(inst.matrix.inputs()) {
        if is_atom_name(v.name()) || map.contains_key(&v) {
            continue;
        }
        let mut name = format!("a{}", v.name());
        while !is_atom_name(&name) || taken.contains(&VarId::new(&name)) {
            name = format!("a{}", name.replace(|c: char| !c.is_ascii_alphanumeric() && c != '_', "_"));
        }
        let new = VarId::new(&name);
        taken.insert(new.clone());
        map.insert(v, new);
    }
    if map.is_empty() {
        return inst.clone();
    }
    let rename = |vs: &[VarId]| vs.iter().map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
    WqbfInstance {
        outer_vars: rename(&inst.outer_vars),
        inner_vars: rename(&inst.inner_vars),
        matrix: inst.matrix.rename(&map),
        ..inst.clone()
    }
}

/// Program consistent iff `∃^k X ∀Y. ψ` holds, for `ψ` in 3DNF. Its only
/// contingent rules are the `k` guessing rules `x^j_1 ∨ … ∨ x^j_n ←`.
pub fn gen_contrules_hard(inst: &WqbfInstance) -> Result<Program> {
    let inst = &atom_names(inst);
    let k = match (inst.outer_kind, inst.outer_weight, inst.inner_weight) {
        (Quant::Exists, WeightSpec::Exact(k), WeightSpec::Free) => k,
        _ => return Err(Error::Precondition("expected ∃ with exact weight over ∀ free".into())),
    };
    let dnf = match inst.matrix.to_dnf() {
        Some(d) if d.max_width() <= 3 => d,
        _ => return Err(Error::Precondition("matrix is not in 3DNF".into())),
    };
    let xs = &inst.outer_vars;
    let ys = &inst.inner_vars;
    let mut fresh = fresh_for(inst);
    let w = fresh.var("w");
    let v: Vec<VarId> = xs.iter().map(|x| fresh.var(&format!("v_{}", x.name().trim_start_matches('_')))).collect();
    let z: Vec<VarId> = ys.iter().map(|y| fresh.var(&format!("z_{}", y.name().trim_start_matches('_')))).collect();
    let guess: Vec<Vec<VarId>> = (1..=k)
        .map(|j| xs.iter().map(|x| fresh.var(&format!("x{j}_{}", x.name().trim_start_matches('_')))).collect())
        .collect();

    let mut rules = Vec::new();
    for row in &guess {
        rules.push(Rule::new(row.clone(), vec![], vec![]));
    }
    for i in 0..xs.len() {
        for j in 0..k {
            for j2 in j + 1..k {
                rules.push(Rule::constraint(vec![guess[j][i].clone(), guess[j2][i].clone()], vec![]));
            }
        }
    }
    for (y, zi) in ys.iter().zip(&z) {
        rules.push(Rule::new(vec![y.clone(), zi.clone()], vec![], vec![]));
        rules.push(Rule::new(vec![y.clone()], vec![w.clone()], vec![]));
        rules.push(Rule::new(vec![zi.clone()], vec![w.clone()], vec![]));
        rules.push(Rule::new(vec![w.clone()], vec![y.clone(), zi.clone()], vec![]));
    }
    for (i, x) in xs.iter().enumerate() {
        rules.push(Rule::new(vec![x.clone()], vec![w.clone()], vec![]));
        for row in &guess {
            rules.push(Rule::new(vec![x.clone()], vec![row[i].clone()], vec![]));
        }
        rules.push(Rule::new(vec![v[i].clone()], vec![w.clone()], vec![]));
        rules.push(Rule::new(vec![v[i].clone()], vec![], guess.iter().map(|row| row[i].clone()).collect()));
    }
    let xi: HashMap<&VarId, usize> = xs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let yi: HashMap<&VarId, usize> = ys.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let sigma = |l: &Literal| -> Result<VarId> {
        if let Some(&i) = xi.get(&l.var) {
            Ok(if l.positive { xs[i].clone() } else { v[i].clone() })
        } else if let Some(&i) = yi.get(&l.var) {
            Ok(if l.positive { ys[i].clone() } else { z[i].clone() })
        } else {
            Err(Error::Invalid(format!("matrix variable `{}` is not quantified", l.var)))
        }
    };
    for t in &dnf.terms {
        let body = t.literals().iter().map(sigma).collect::<Result<Vec<_>>>()?;
        rules.push(Rule::new(vec![w.clone()], body, vec![]));
    }
    rules.push(Rule::new(vec![w.clone()], vec![], vec![w.clone()]));
    Ok(Program::new(rules))
}

/// Program consistent iff `∃X ∀^k Y. C` holds, for `C` in NNF and monotone
/// in `Y`. Its only disjunctive rules are the `k` guessing rules over `Y`.
pub fn gen_disjrules_hard(inst: &WqbfInstance) -> Result<Program> {
    let inst = &atom_names(inst);
    let k = match (inst.outer_kind, inst.outer_weight, inst.inner_weight) {
        (Quant::Exists, WeightSpec::Free, WeightSpec::Exact(k)) => k,
        _ => return Err(Error::Precondition("expected ∃ free over ∀ with exact weight".into())),
    };
    let c = &inst.matrix;
    if !c.is_nnf() || !is_monotone_in(c, &inst.inner_vars) {
        return Err(Error::Precondition(
            "matrix must be in NNF and monotone in the universal block; apply monotonize_universal first".into(),
        ));
    }
    let xs = &inst.outer_vars;
    let ys = &inst.inner_vars;
    let mut fresh = fresh_for(inst);
    let w = fresh.var("w");
    let v: Vec<VarId> = xs.iter().map(|x| fresh.var(&format!("v_{}", x.name().trim_start_matches('_')))).collect();
    let guess: Vec<Vec<VarId>> = (1..=k)
        .map(|j| ys.iter().map(|y| fresh.var(&format!("y{j}_{}", y.name().trim_start_matches('_')))).collect())
        .collect();

    let mut rules = Vec::new();
    for (x, vi) in xs.iter().zip(&v) {
        rules.push(Rule::new(vec![x.clone()], vec![], vec![vi.clone()]));
        rules.push(Rule::new(vec![vi.clone()], vec![], vec![x.clone()]));
    }
    for row in &guess {
        rules.push(Rule::new(row.clone(), vec![], vec![]));
    }
    for (i, y) in ys.iter().enumerate() {
        for row in &guess {
            rules.push(Rule::new(vec![y.clone()], vec![row[i].clone()], vec![]));
        }
    }
    for row in &guess {
        for g in row {
            rules.push(Rule::new(vec![g.clone()], vec![w.clone()], vec![]));
        }
    }
    for i in 0..ys.len() {
        for j in 0..k {
            for j2 in j + 1..k {
                rules.push(Rule::new(vec![w.clone()], vec![guess[j][i].clone(), guess[j2][i].clone()], vec![]));
            }
        }
    }

    let xi: HashMap<&VarId, usize> = xs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let gates = c.gates();
    let live = c.cone();
    let mut sigma: Vec<Option<VarId>> = vec![None; gates.len()];
    let mut node_rules = Vec::new();
    for (g, gate) in gates.iter().enumerate() {
        if !live[g] {
            continue;
        }
        let input = |var: &VarId, positive: bool| -> Result<VarId> {
            match (xi.get(var), positive) {
                (Some(_), true) => Ok(var.clone()),
                (Some(&i), false) => Ok(v[i].clone()),
                (None, true) if ys.contains(var) => Ok(var.clone()),
                _ => Err(Error::Invalid(format!("matrix variable `{var}` is not quantified"))),
            }
        };
        sigma[g] = Some(match gate {
            Gate::Input(x) => input(x, true)?,
            Gate::Not(a) => match &gates[*a] {
                Gate::Input(x) => input(x, false)?,
                Gate::Const(b) => const_node(&mut fresh, &w, !*b, &mut node_rules),
                _ => unreachable!("matrix is in NNF"),
            },
            Gate::Const(b) => const_node(&mut fresh, &w, *b, &mut node_rules),
            Gate::And(cs) => {
                let zg = fresh.var("z");
                node_rules.push(Rule::new(vec![zg.clone()], vec![w.clone()], vec![]));
                let body = cs.iter().map(|&c| sigma[c].clone().expect("children precede parents")).collect();
                node_rules.push(Rule::new(vec![zg.clone()], body, vec![]));
                zg
            }
            Gate::Or(cs) => {
                let zg = fresh.var("z");
                node_rules.push(Rule::new(vec![zg.clone()], vec![w.clone()], vec![]));
                for &c in cs {
                    node_rules.push(Rule::new(vec![zg.clone()], vec![sigma[c].clone().expect("children precede parents")], vec![]));
                }
                zg
            }
        });
    }
    rules.extend(node_rules);
    let out = sigma[c.output()].clone().expect("output is live");
    rules.push(Rule::new(vec![w.clone()], vec![out], vec![]));
    rules.push(Rule::new(vec![w.clone()], vec![], vec![w.clone()]));
    Ok(Program::new(rules))
}

/// Atom standing for a constant node: derivable outright when `value`,
/// otherwise only from `w`.
fn const_node(fresh: &mut Fresh, w: &VarId, value: bool, rules: &mut Vec<Rule>) -> VarId {
    let zg = fresh.var("z");
    rules.push(Rule::new(vec![zg.clone()], vec![w.clone()], vec![]));
    if value {
        rules.push(Rule::fact(&zg));
    }
    zg
}

/// Replaces every atom occurring more than `bound` times by one copy per
/// occurrence, tied together by the cycle `x₂ ← x₁, …, x₁ ← x_ℓ`.
pub fn limit_atom_occurrences(p: &Program, bound: usize) -> Result<Program> {
    if bound < 3 {
        return Err(Error::Precondition(format!("occurrence bound {bound} is below 3")));
    }
    let occ = atom_occurrences(p);
    let heavy: Vec<VarId> = p.atoms().into_iter().filter(|a| occ[a] > bound).collect();
    if heavy.is_empty() {
        return Ok(p.clone());
    }
    let mut fresh = Fresh::avoiding(p.atom_set().iter());
    let copies: HashMap<VarId, Vec<VarId>> = heavy
        .iter()
        .map(|a| (a.clone(), (0..occ[a]).map(|_| fresh.var(a.name().trim_start_matches('_'))).collect()))
        .collect();
    let mut used: HashMap<VarId, usize> = HashMap::new();
    let mut rename = |a: &VarId| -> VarId {
        match copies.get(a) {
            Some(cs) => {
                let j = used.entry(a.clone()).or_insert(0);
                *j += 1;
                cs[*j - 1].clone()
            }
            None => a.clone(),
        }
    };
    let mut rules: Vec<Rule> = p
        .rules
        .iter()
        .map(|r| Rule {
            head: r.head.iter().map(&mut rename).collect(),
            pos: r.pos.iter().map(&mut rename).collect(),
            neg: r.neg.iter().map(&mut rename).collect(),
        })
        .collect();
    for a in &heavy {
        let cs = &copies[a];
        for j in 0..cs.len() {
            rules.push(Rule::new(vec![cs[(j + 1) % cs.len()].clone()], vec![cs[j].clone()], vec![]));
        }
    }
    Ok(Program::new(rules))
}
