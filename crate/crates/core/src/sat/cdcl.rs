//! Conflict-driven clause learning over dense variable indices.
//!
//! Literals are `2 * var + sign`, sign 1 meaning negative. Two watched
//! literals per clause, VSIDS branching with phase saving, first-UIP
//! learning and Luby restarts.

const UNDEF: u8 = 2;

#[inline]
fn var(l: u32) -> usize {
    (l >> 1) as usize
}

#[inline]
fn neg(l: u32) -> u32 {
    l ^ 1
}

pub fn lit_from_dimacs(x: i32) -> u32 {
    let v = x.unsigned_abs() - 1;
    2 * v + u32::from(x < 0)
}

struct Heap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl Heap {
    fn new(n: usize) -> Self {
        Heap { heap: Vec::with_capacity(n), pos: vec![None; n] }
    }

    fn less(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let x = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::less(act, x, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = Some(i);
            i = p;
        }
        self.heap[i] = x;
        self.pos[x] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let x = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::less(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::less(act, self.heap[c], x) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = Some(i);
            i = c;
        }
        self.heap[i] = x;
        self.pos[x] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos[v].is_some() {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        self.pos[top] = None;
        let last = self.heap.pop().expect("non-empty");
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

pub struct Solver {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    inc: f64,
    phase: Vec<bool>,
    heap: Heap,
    seen: Vec<bool>,
    inconsistent: bool,
}

impl Solver {
    pub fn new(nvars: usize, seed: u64) -> Self {
        let mut activity = vec![0.0; nvars];
        if seed != 0 {
            // xorshift perturbation of the initial branching order
            let mut s = seed;
            for a in activity.iter_mut() {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                *a = (s % 1000) as f64 * 1e-6;
            }
        }
        let mut heap = Heap::new(nvars);
        for v in 0..nvars {
            heap.insert(v, &activity);
        }
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * nvars],
            value: vec![UNDEF; nvars],
            level: vec![0; nvars],
            reason: vec![None; nvars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            inc: 1.0,
            phase: vec![false; nvars],
            heap,
            seen: vec![false; nvars],
            inconsistent: false,
        }
    }

    #[inline]
    fn lit_value(&self, l: u32) -> u8 {
        let v = self.value[var(l)];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l as u8 & 1)
        }
    }

    fn enqueue(&mut self, l: u32, reason: Option<usize>) {
        let v = var(l);
        self.value[v] = u8::from(l & 1 == 0);
        self.level[v] = self.trail_lim.len();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause at decision level 0.
    pub fn add_clause(&mut self, lits: &[u32]) {
        if self.inconsistent {
            return;
        }
        let mut c: Vec<u32> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.lit_value(l) {
                1 => return,
                0 => continue,
                _ => {
                    if c.contains(&neg(l)) {
                        return;
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                let idx = self.clauses.len();
                self.watches[neg(c[0]) as usize].push(idx);
                self.watches[neg(c[1]) as usize].push(idx);
                self.clauses.push(c);
            }
        }
    }

    /// Unit propagation; returns a conflicting clause index.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let false_lit = neg(p);
                {
                    let c = &mut self.clauses[ci];
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[ci][0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let len = self.clauses[ci].len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[ci][k];
                    if self.lit_value(l) != 0 {
                        self.clauses[ci].swap(1, k);
                        self.watches[neg(l) as usize].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.lit_value(first) == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(first, Some(ci));
                i += 1;
            }
            let rest = std::mem::take(&mut self.watches[p as usize]);
            ws.extend(rest);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<u32>, usize) {
        let mut learnt: Vec<u32> = vec![0];
        let mut counter = 0;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let cur = self.trail_lim.len();
        loop {
            let clause = self.clauses[confl].clone();
            let start = usize::from(p.is_some());
            for &q in &clause[start..] {
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= cur {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[var(pl)] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            confl = self.reason[var(pl)].expect("implied literal has a reason");
        }
        learnt[0] = neg(p.expect("uip"));
        for &l in &learnt[1..] {
            self.seen[var(l)] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[var(learnt[i])] > self.level[var(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[var(learnt[1])];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, lvl: usize) {
        if self.trail_lim.len() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl);
        self.qhead = lim;
    }

    fn pick(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    /// Returns a model or `None` when unsatisfiable.
    pub fn solve(&mut self) -> Option<Vec<bool>> {
        if self.inconsistent {
            return None;
        }
        if self.propagate().is_some() {
            return None;
        }
        let mut restarts = 0u64;
        loop {
            let budget = 100 * luby(restarts);
            let mut conflicts = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    if self.trail_lim.is_empty() {
                        return None;
                    }
                    conflicts += 1;
                    let (learnt, back) = self.analyze(confl);
                    self.backtrack(back);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let idx = self.clauses.len();
                        self.watches[neg(learnt[0]) as usize].push(idx);
                        self.watches[neg(learnt[1]) as usize].push(idx);
                        let first = learnt[0];
                        self.clauses.push(learnt);
                        self.enqueue(first, Some(idx));
                    }
                    self.inc /= 0.95;
                } else {
                    if conflicts >= budget {
                        self.backtrack(0);
                        break;
                    }
                    match self.pick() {
                        None => {
                            return Some(self.value.iter().map(|&v| v == 1).collect());
                        }
                        Some(l) => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, None);
                        }
                    }
                }
            }
            restarts += 1;
        }
    }
}

/// Solves a clause list over variables `0..nvars`.
pub fn solve_dense(nvars: usize, clauses: &[Vec<u32>], seed: u64) -> Option<Vec<bool>> {
    let mut s = Solver::new(nvars, seed);
    for c in clauses {
        s.add_clause(c);
    }
    s.solve()
}
