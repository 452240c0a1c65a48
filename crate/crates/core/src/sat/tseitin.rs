//! Tseitin encoding of circuits into 3CNF.
//!
//! Every gate in the output cone gets an auxiliary variable constrained to be
//! equivalent to the gate. Gates with more than two children are split into
//! left-to-right chains of binary gates first.

use crate::logic::{Circuit, Clause, Cnf, Fresh, Gate, Literal, VarId};

/// Accumulates the clauses of several encoded circuits over shared inputs.
pub struct Tseitin {
    fresh: Fresh,
    clauses: Vec<Clause>,
}

fn clause(lits: Vec<Literal>) -> Clause {
    Clause::new(lits).expect("auxiliary variables never clash")
}

impl Tseitin {
    pub fn new(fresh: Fresh) -> Self {
        Tseitin { fresh, clauses: Vec::new() }
    }

    /// Tseitin encoder avoiding the input names of `c`.
    pub fn for_circuit(c: &Circuit) -> Self {
        Tseitin::new(Fresh::avoiding(&c.inputs()))
    }

    fn aux(&mut self) -> Literal {
        Literal::pos(self.fresh.var("t"))
    }

    fn binary(&mut self, and: bool, a: Literal, b: Literal) -> Literal {
        let t = self.aux();
        if and {
            self.clauses.push(clause(vec![t.negated(), a.clone()]));
            self.clauses.push(clause(vec![t.negated(), b.clone()]));
            self.clauses.push(clause(vec![t.clone(), a.negated(), b.negated()]));
        } else {
            self.clauses.push(clause(vec![t.clone(), a.negated()]));
            self.clauses.push(clause(vec![t.clone(), b.negated()]));
            self.clauses.push(clause(vec![t.negated(), a.clone(), b.clone()]));
        }
        t
    }

    fn equiv(&mut self, a: Literal) -> Literal {
        let t = self.aux();
        self.clauses.push(clause(vec![t.clone(), a.negated()]));
        self.clauses.push(clause(vec![t.negated(), a]));
        t
    }

    /// Encodes `c` and returns the literal standing for its output, along
    /// with the gate-to-variable map (`None` outside the output cone).
    pub fn encode(&mut self, c: &Circuit) -> (Literal, Vec<Option<VarId>>) {
        let live = c.cone();
        let mut lit: Vec<Option<Literal>> = vec![None; c.len()];
        for (i, g) in c.gates().iter().enumerate() {
            if !live[i] {
                continue;
            }
            let t = match g {
                Gate::Input(v) => self.equiv(Literal::pos(v.clone())),
                Gate::Const(b) => {
                    let t = self.aux();
                    self.clauses.push(clause(vec![if *b { t.clone() } else { t.negated() }]));
                    t
                }
                Gate::Not(a) => {
                    let a = lit[*a].clone().expect("child encoded");
                    self.equiv(a.negated())
                }
                Gate::And(cs) | Gate::Or(cs) => {
                    let and = matches!(g, Gate::And(_));
                    let kids: Vec<Literal> = cs.iter().map(|&x| lit[x].clone().expect("child encoded")).collect();
                    match kids.len() {
                        0 => {
                            let t = self.aux();
                            self.clauses.push(clause(vec![if and { t.clone() } else { t.negated() }]));
                            t
                        }
                        1 => self.equiv(kids[0].clone()),
                        _ => {
                            let mut acc = kids[0].clone();
                            for k in &kids[1..] {
                                acc = self.binary(and, acc, k.clone());
                            }
                            acc
                        }
                    }
                }
            };
            lit[i] = Some(t);
        }
        let map = lit.iter().map(|l| l.as_ref().map(|l| l.var.clone())).collect();
        (lit[c.output()].clone().expect("output encoded"), map)
    }

    pub fn assert(&mut self, l: Literal) {
        self.clauses.push(clause(vec![l]));
    }

    pub fn add_clause(&mut self, c: Clause) {
        self.clauses.push(c);
    }

    pub fn fresh(&mut self) -> &mut Fresh {
        &mut self.fresh
    }

    pub fn into_cnf(self) -> Cnf {
        Cnf::new(self.clauses)
    }
}

/// CNF satisfiable exactly when `c` is, with the output asserted.
pub fn tseitin_cnf(c: &Circuit) -> (Cnf, Vec<Option<VarId>>) {
    let mut t = Tseitin::for_circuit(c);
    let (out, map) = t.encode(c);
    t.assert(out);
    (t.into_cnf(), map)
}
