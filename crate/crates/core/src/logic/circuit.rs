//! Boolean circuits: a topologically ordered gate list with one output.

use std::collections::{HashMap, HashSet};

use super::{Assignment, Clause, Cnf, Dnf, Literal, Term, VarId};
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(VarId),
    Const(bool),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
}

impl Gate {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Gate::Input(_) | Gate::Const(_) => &[],
            Gate::Not(a) => std::slice::from_ref(a),
            Gate::And(cs) | Gate::Or(cs) => cs,
        }
    }
}

/// Every gate refers only to gates with smaller index, so the list is a
/// topological order and the circuit is acyclic by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: NodeId,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>, output: NodeId) -> Result<Self> {
        if output >= gates.len() {
            return Err(Error::Invalid(format!("output gate {output} does not exist")));
        }
        for (i, g) in gates.iter().enumerate() {
            for &c in g.children() {
                if c >= i {
                    return Err(Error::Invalid(format!(
                        "gate {i} refers to gate {c}, which is not defined before it"
                    )));
                }
            }
        }
        Ok(Circuit { gates, output })
    }

    pub fn var(v: &VarId) -> Self {
        Circuit { gates: vec![Gate::Input(v.clone())], output: 0 }
    }

    pub fn constant(b: bool) -> Self {
        Circuit { gates: vec![Gate::Const(b)], output: 0 }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Marks the gates reachable from the output.
    pub fn cone(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                for &c in self.gates[i].children() {
                    live[c] = true;
                }
            }
        }
        live
    }

    /// Input variables feeding the output, in gate order.
    pub fn inputs(&self) -> Vec<VarId> {
        let live = self.cone();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if let (true, Gate::Input(v)) = (live[i], g) {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        let live = self.cone();
        let mut val = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            val[i] = match g {
                Gate::Input(v) => a.get(v).ok_or_else(|| Error::Unassigned(v.clone()))?,
                Gate::Const(b) => *b,
                Gate::Not(c) => !val[*c],
                Gate::And(cs) => cs.iter().all(|&c| val[c]),
                Gate::Or(cs) => cs.iter().any(|&c| val[c]),
            };
        }
        Ok(val[self.output])
    }

    /// Replaces every input assigned by `gamma` with the matching constant.
    pub fn substitute(&self, gamma: &Assignment) -> Circuit {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(v) => match gamma.get(v) {
                    Some(b) => Gate::Const(b),
                    None => g.clone(),
                },
                _ => g.clone(),
            })
            .collect();
        Circuit { gates, output: self.output }
    }

    /// `(depth, weft)` over paths ending in the output. A negation applied
    /// directly to an input is a literal and adds no depth.
    pub fn metrics(&self) -> (usize, usize) {
        let live = self.cone();
        let mut depth = vec![0usize; self.gates.len()];
        let mut weft = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            match g {
                Gate::Input(_) | Gate::Const(_) => {}
                Gate::Not(c) => {
                    let leaf = matches!(self.gates[*c], Gate::Input(_) | Gate::Const(_));
                    depth[i] = if leaf { 0 } else { depth[*c] + 1 };
                    weft[i] = weft[*c];
                }
                Gate::And(cs) | Gate::Or(cs) => {
                    let large = usize::from(cs.len() > 2);
                    depth[i] = 1 + cs.iter().map(|&c| depth[c]).max().unwrap_or(0);
                    weft[i] = large + cs.iter().map(|&c| weft[c]).max().unwrap_or(0);
                }
            }
        }
        (depth[self.output], weft[self.output])
    }

    /// True when every negation sits directly on an input.
    pub fn is_nnf(&self) -> bool {
        let live = self.cone();
        self.gates.iter().enumerate().all(|(i, g)| match g {
            Gate::Not(c) if live[i] => matches!(self.gates[*c], Gate::Input(_)),
            _ => true,
        })
    }

    fn nnf(&self, negate: bool) -> Circuit {
        let live = self.cone();
        let mut b = Builder::new();
        let mut pos: Vec<NodeId> = vec![usize::MAX; self.gates.len()];
        let mut neg: Vec<NodeId> = vec![usize::MAX; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            match g {
                Gate::Input(v) => {
                    pos[i] = b.input(v);
                    neg[i] = b.not(pos[i]);
                }
                Gate::Const(c) => {
                    pos[i] = b.constant(*c);
                    neg[i] = b.constant(!*c);
                }
                Gate::Not(c) => {
                    pos[i] = neg[*c];
                    neg[i] = pos[*c];
                }
                Gate::And(cs) => {
                    pos[i] = b.and(cs.iter().map(|&c| pos[c]).collect());
                    neg[i] = b.or(cs.iter().map(|&c| neg[c]).collect());
                }
                Gate::Or(cs) => {
                    pos[i] = b.or(cs.iter().map(|&c| pos[c]).collect());
                    neg[i] = b.and(cs.iter().map(|&c| neg[c]).collect());
                }
            }
        }
        let out = if negate { neg[self.output] } else { pos[self.output] };
        b.finish(out)
    }

    /// Negation normal form of the complement of this circuit.
    pub fn negate_nnf(&self) -> Circuit {
        self.nnf(true)
    }

    /// Equivalent circuit in negation normal form.
    pub fn to_nnf(&self) -> Circuit {
        self.nnf(false)
    }

    /// Plain negation: a `Not` gate on top of the output.
    pub fn negate(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.push(Gate::Not(self.output));
        Circuit { output: gates.len() - 1, gates }
    }

    /// Removes gates outside the output cone, keeping relative order.
    pub fn prune(&self) -> Circuit {
        let live = self.cone();
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let g = match g {
                Gate::Not(c) => Gate::Not(map[*c]),
                Gate::And(cs) => Gate::And(cs.iter().map(|&c| map[c]).collect()),
                Gate::Or(cs) => Gate::Or(cs.iter().map(|&c| map[c]).collect()),
                other => other.clone(),
            };
            map[i] = gates.len();
            gates.push(g);
        }
        Circuit { gates, output: map[self.output] }
    }

    /// Constant propagation: folds constants and drops neutral children.
    pub fn simplify(&self) -> Circuit {
        let live = self.cone();
        let mut b = Builder::new();
        let mut map = vec![usize::MAX; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            map[i] = match g {
                Gate::Input(v) => b.input(v),
                Gate::Const(c) => b.constant(*c),
                Gate::Not(c) => b.not_simpl(map[*c]),
                Gate::And(cs) => b.and_simpl(cs.iter().map(|&c| map[c]).collect()),
                Gate::Or(cs) => b.or_simpl(cs.iter().map(|&c| map[c]).collect()),
            };
        }
        b.finish(map[self.output])
    }

    /// The constant this circuit reduces to, if it is one.
    pub fn as_const(&self) -> Option<bool> {
        match self.gates[self.output] {
            Gate::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn compile(&self, order: &[VarId]) -> Result<Compiled> {
        Compiled::new(self, order)
    }

    fn literal_of(&self, n: NodeId) -> Option<Literal> {
        match &self.gates[n] {
            Gate::Input(v) => Some(Literal::pos(v.clone())),
            Gate::Not(c) => match &self.gates[*c] {
                Gate::Input(v) => Some(Literal::neg(v.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    /// Literals of an `and`-tree (`conj = true`) or `or`-tree of literals.
    fn flat_literals(&self, n: NodeId, conj: bool, out: &mut Vec<Literal>) -> bool {
        if let Some(l) = self.literal_of(n) {
            out.push(l);
            return true;
        }
        match (&self.gates[n], conj) {
            (Gate::And(cs), true) | (Gate::Or(cs), false) => {
                cs.iter().all(|&c| self.flat_literals(c, conj, out))
            }
            (Gate::Const(b), _) if *b == conj => true,
            _ => false,
        }
    }

    fn flat_top(&self, n: NodeId, conj: bool, out: &mut Vec<NodeId>) -> bool {
        match (&self.gates[n], conj) {
            (Gate::And(cs), true) | (Gate::Or(cs), false) => {
                cs.iter().all(|&c| self.flat_top(c, conj, out))
            }
            (Gate::Const(b), _) if *b == conj => true,
            _ => {
                out.push(n);
                true
            }
        }
    }

    /// Reads the circuit back as a DNF when it is an `or` of `and`s of literals.
    pub fn to_dnf(&self) -> Option<Dnf> {
        let mut tops = Vec::new();
        self.flat_top(self.output, false, &mut tops);
        let mut terms = Vec::new();
        for t in tops {
            let mut lits = Vec::new();
            if !self.flat_literals(t, true, &mut lits) {
                return None;
            }
            terms.push(Term::new(lits).ok()?);
        }
        Some(Dnf::new(terms))
    }

    /// Reads the circuit back as a CNF when it is an `and` of `or`s of literals.
    pub fn to_cnf(&self) -> Option<Cnf> {
        let mut tops = Vec::new();
        self.flat_top(self.output, true, &mut tops);
        let mut clauses = Vec::new();
        for t in tops {
            let mut lits = Vec::new();
            if !self.flat_literals(t, false, &mut lits) {
                return None;
            }
            clauses.push(Clause::new(lits).ok()?);
        }
        Some(Cnf::new(clauses))
    }

    /// DNF as a circuit; terms are left-to-right binary `and` chains.
    pub fn from_dnf(d: &Dnf) -> Circuit {
        let mut b = Builder::new();
        let terms: Vec<NodeId> = d
            .terms
            .iter()
            .map(|t| {
                let lits: Vec<NodeId> = t.literals().iter().map(|l| b.literal(l)).collect();
                b.and_chain(lits)
            })
            .collect();
        let out = match terms.len() {
            0 => b.constant(false),
            1 => terms[0],
            _ => b.or(terms),
        };
        b.finish(out)
    }

    pub fn from_cnf(c: &Cnf) -> Circuit {
        let mut b = Builder::new();
        let clauses: Vec<NodeId> = c
            .clauses
            .iter()
            .map(|cl| {
                let lits: Vec<NodeId> = cl.literals().iter().map(|l| b.literal(l)).collect();
                match lits.len() {
                    0 => b.constant(false),
                    1 => lits[0],
                    _ => b.or(lits),
                }
            })
            .collect();
        let out = match clauses.len() {
            0 => b.constant(true),
            1 => clauses[0],
            _ => b.and(clauses),
        };
        b.finish(out)
    }

    /// Renames input variables; unmapped inputs are kept.
    pub fn rename(&self, map: &HashMap<VarId, VarId>) -> Circuit {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(v) => Gate::Input(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                _ => g.clone(),
            })
            .collect();
        Circuit { gates, output: self.output }
    }
}

/// Incremental circuit construction. Inputs and constants are shared.
#[derive(Debug, Default, Clone)]
pub struct Builder {
    gates: Vec<Gate>,
    inputs: HashMap<VarId, NodeId>,
    consts: [Option<NodeId>; 2],
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, g: Gate) -> NodeId {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn gate(&self, n: NodeId) -> &Gate {
        &self.gates[n]
    }

    pub fn input(&mut self, v: &VarId) -> NodeId {
        if let Some(&n) = self.inputs.get(v) {
            return n;
        }
        let n = self.push(Gate::Input(v.clone()));
        self.inputs.insert(v.clone(), n);
        n
    }

    pub fn constant(&mut self, b: bool) -> NodeId {
        if let Some(n) = self.consts[usize::from(b)] {
            return n;
        }
        let n = self.push(Gate::Const(b));
        self.consts[usize::from(b)] = Some(n);
        n
    }

    pub fn literal(&mut self, l: &Literal) -> NodeId {
        let x = self.input(&l.var);
        if l.positive {
            x
        } else {
            self.not(x)
        }
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        self.push(Gate::Not(a))
    }

    pub fn and(&mut self, cs: Vec<NodeId>) -> NodeId {
        self.push(Gate::And(cs))
    }

    pub fn or(&mut self, cs: Vec<NodeId>) -> NodeId {
        self.push(Gate::Or(cs))
    }

    pub fn and2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.and(vec![a, b])
    }

    pub fn or2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.or(vec![a, b])
    }

    pub fn implies(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let na = self.not(a);
        self.or2(na, b)
    }

    pub fn iff(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let na = self.not(a);
        let nb = self.not(b);
        let both = self.and2(a, b);
        let neither = self.and2(na, nb);
        self.or2(both, neither)
    }

    /// Left-to-right chain of binary `and` gates; literals stay unwrapped.
    pub fn and_chain(&mut self, cs: Vec<NodeId>) -> NodeId {
        let mut it = cs.into_iter();
        let Some(mut acc) = it.next() else {
            return self.constant(true);
        };
        for c in it {
            acc = self.and2(acc, c);
        }
        acc
    }

    pub fn not_simpl(&mut self, a: NodeId) -> NodeId {
        match self.gates[a] {
            Gate::Const(b) => self.constant(!b),
            Gate::Not(c) => c,
            _ => self.not(a),
        }
    }

    pub fn and_simpl(&mut self, cs: Vec<NodeId>) -> NodeId {
        let mut kept = Vec::new();
        for c in cs {
            match self.gates[c] {
                Gate::Const(false) => return self.constant(false),
                Gate::Const(true) => {}
                _ => {
                    if !kept.contains(&c) {
                        kept.push(c)
                    }
                }
            }
        }
        match kept.len() {
            0 => self.constant(true),
            1 => kept[0],
            _ => self.and(kept),
        }
    }

    pub fn or_simpl(&mut self, cs: Vec<NodeId>) -> NodeId {
        let mut kept = Vec::new();
        for c in cs {
            match self.gates[c] {
                Gate::Const(true) => return self.constant(true),
                Gate::Const(false) => {}
                _ => {
                    if !kept.contains(&c) {
                        kept.push(c)
                    }
                }
            }
        }
        match kept.len() {
            0 => self.constant(false),
            1 => kept[0],
            _ => self.or(kept),
        }
    }

    /// Copies `c` into this builder. Each input variable is routed through
    /// `route`, which returns the node standing in for it.
    pub fn import<F>(&mut self, c: &Circuit, mut route: F) -> NodeId
    where
        F: FnMut(&mut Builder, &VarId) -> NodeId,
    {
        let live = c.cone();
        let mut map = vec![usize::MAX; c.gates.len()];
        for (i, g) in c.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            map[i] = match g {
                Gate::Input(v) => route(self, v),
                Gate::Const(b) => self.constant(*b),
                Gate::Not(a) => self.not(map[*a]),
                Gate::And(cs) => self.and(cs.iter().map(|&x| map[x]).collect()),
                Gate::Or(cs) => self.or(cs.iter().map(|&x| map[x]).collect()),
            };
        }
        map[c.output]
    }

    /// Copies `c` keeping its input variables.
    pub fn embed(&mut self, c: &Circuit) -> NodeId {
        self.import(c, |b, v| b.input(v))
    }

    pub fn finish(self, output: NodeId) -> Circuit {
        Circuit { gates: self.gates, output }.prune()
    }
}

#[derive(Clone, Debug)]
enum Op {
    Var(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
}

/// Index-based evaluator over a fixed variable order.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
    kids: Vec<usize>,
}

impl Compiled {
    fn new(c: &Circuit, order: &[VarId]) -> Result<Self> {
        let index: HashMap<&VarId, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let pruned = c.prune();
        let mut ops = Vec::with_capacity(pruned.gates.len());
        let mut kids = Vec::new();
        for g in &pruned.gates {
            ops.push(match g {
                Gate::Input(v) => {
                    Op::Var(*index.get(v).ok_or_else(|| Error::Unassigned(v.clone()))?)
                }
                Gate::Const(b) => Op::Const(*b),
                Gate::Not(a) => Op::Not(*a),
                Gate::And(cs) | Gate::Or(cs) => {
                    let start = kids.len();
                    kids.extend_from_slice(cs);
                    if matches!(g, Gate::And(_)) {
                        Op::And(start, kids.len())
                    } else {
                        Op::Or(start, kids.len())
                    }
                }
            });
        }
        Ok(Compiled { ops, kids })
    }

    pub fn eval(&self, vals: &[bool]) -> bool {
        let mut v = vec![false; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            v[i] = match *op {
                Op::Var(x) => vals[x],
                Op::Const(b) => b,
                Op::Not(a) => !v[a],
                Op::And(s, e) => self.kids[s..e].iter().all(|&c| v[c]),
                Op::Or(s, e) => self.kids[s..e].iter().any(|&c| v[c]),
            };
        }
        v[self.ops.len() - 1]
    }

    /// Kleene evaluation; `None` is unknown.
    pub fn eval3(&self, vals: &[Option<bool>]) -> Option<bool> {
        let mut v: Vec<Option<bool>> = vec![None; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            v[i] = match *op {
                Op::Var(x) => vals[x],
                Op::Const(b) => Some(b),
                Op::Not(a) => v[a].map(|b| !b),
                Op::And(s, e) => {
                    let mut acc = Some(true);
                    for &c in &self.kids[s..e] {
                        match v[c] {
                            Some(false) => {
                                acc = Some(false);
                                break;
                            }
                            None => acc = None,
                            Some(true) => {}
                        }
                    }
                    acc
                }
                Op::Or(s, e) => {
                    let mut acc = Some(false);
                    for &c in &self.kids[s..e] {
                        match v[c] {
                            Some(true) => {
                                acc = Some(true);
                                break;
                            }
                            None => acc = None,
                            Some(false) => {}
                        }
                    }
                    acc
                }
            };
        }
        v[self.ops.len() - 1]
    }
}
