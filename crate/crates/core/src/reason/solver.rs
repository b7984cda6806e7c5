//! A compact CDCL solver with conditional cardinality constraints.
//!
//! Clauses use two watched literals. Cardinality constraints `g → (Σ lits ≥ k)` and
//! `g → (Σ lits ≤ k)` are checked by rescanning whenever one of their variables is assigned;
//! implied literals get explicit reason clauses so conflict analysis treats both uniformly.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        Lit(var << 1)
    }

    pub fn neg(var: u32) -> Lit {
        Lit(var << 1 | 1)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Variable 0 is fixed to true.
pub(crate) const TRUE: Lit = Lit(0);
pub(crate) const FALSE: Lit = Lit(1);

#[derive(Debug, Clone)]
struct Card {
    guard: Lit,
    lits: Vec<Lit>,
    k: u32,
    at_least: bool,
}

#[derive(Debug, Clone)]
enum Reason {
    Decision,
    Clause(usize),
    /// Implied literal first, the rest false.
    Lits(Box<[Lit]>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SolveResult {
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

const UNDEF: i8 = 0;

pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    cards: Vec<Card>,
    card_occ: Vec<Vec<usize>>,
    units: Vec<Lit>,
    trivially_unsat: bool,

    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,

    deadline: Option<Instant>,
}

impl Solver {
    pub fn new() -> Self {
        let mut s = Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            cards: Vec::new(),
            card_occ: Vec::new(),
            units: Vec::new(),
            trivially_unsat: false,
            value: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            deadline: None,
        };
        let t = s.new_var();
        debug_assert_eq!(Lit::pos(t), TRUE);
        s.units.push(TRUE);
        s
    }

    pub fn num_vars(&self) -> usize {
        self.value.len()
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.value.len() as u32;
        self.value.push(UNDEF);
        self.level.push(0);
        self.reason.push(Reason::Decision);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.card_occ.push(Vec::new());
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(v as usize + 1);
        v
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// Adds a clause; must be called before [`Solver::solve`].
    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = lits.iter().copied().filter(|&l| l != FALSE).collect();
        c.sort();
        c.dedup();
        if c.contains(&TRUE) || c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        match c.len() {
            0 => self.trivially_unsat = true,
            1 => self.units.push(c[0]),
            _ => {
                let idx = self.clauses.len();
                self.watches[c[0].index()].push(idx);
                self.watches[c[1].index()].push(idx);
                self.clauses.push(c);
            }
        }
    }

    /// `guard → at least k of lits`.
    pub fn add_at_least(&mut self, guard: Lit, lits: Vec<Lit>, k: u32) {
        if k == 0 || guard == FALSE {
            return;
        }
        if k as usize > lits.len() {
            self.add_clause(&[!guard]);
            return;
        }
        if k as usize == lits.len() {
            for &l in &lits {
                self.add_clause(&[!guard, l]);
            }
            return;
        }
        self.push_card(Card { guard, lits, k, at_least: true });
    }

    /// `guard → at most k of lits`.
    pub fn add_at_most(&mut self, guard: Lit, lits: Vec<Lit>, k: u32) {
        if k as usize >= lits.len() || guard == FALSE {
            return;
        }
        if k == 0 {
            for &l in &lits {
                self.add_clause(&[!guard, !l]);
            }
            return;
        }
        self.push_card(Card { guard, lits, k, at_least: false });
    }

    fn push_card(&mut self, card: Card) {
        let idx = self.cards.len();
        let mut vars: Vec<u32> = card.lits.iter().map(|l| l.var()).collect();
        vars.push(card.guard.var());
        vars.sort();
        vars.dedup();
        for v in vars {
            self.card_occ[v as usize].push(idx);
        }
        self.cards.push(card);
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var() as usize];
        if l.is_neg() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) {
        let v = l.var() as usize;
        self.value[v] = if l.is_neg() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns a conflicting clause (all literals false) if propagation fails.
    fn propagate(&mut self) -> Option<Vec<Lit>> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            if let Some(c) = self.propagate_clauses(p) {
                return Some(c);
            }
            let occ = std::mem::take(&mut self.card_occ[p.var() as usize]);
            let mut conflict = None;
            for &ci in &occ {
                if let Some(c) = self.check_card(ci) {
                    conflict = Some(c);
                    break;
                }
            }
            self.card_occ[p.var() as usize] = occ;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn propagate_clauses(&mut self, p: Lit) -> Option<Vec<Lit>> {
        let false_lit = !p;
        let watching = std::mem::take(&mut self.watches[false_lit.index()]);
        let mut keep = Vec::with_capacity(watching.len());
        let mut conflict = None;
        let mut iter = watching.into_iter();
        for ci in iter.by_ref() {
            let clause = &mut self.clauses[ci];
            if clause[0] == false_lit {
                clause.swap(0, 1);
            }
            let first = clause[0];
            if self.lit_value(first) == 1 {
                keep.push(ci);
                continue;
            }
            let mut moved = false;
            for k in 2..self.clauses[ci].len() {
                let l = self.clauses[ci][k];
                if self.lit_value(l) != -1 {
                    self.clauses[ci].swap(1, k);
                    self.watches[l.index()].push(ci);
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            keep.push(ci);
            if self.lit_value(first) == -1 {
                conflict = Some(self.clauses[ci].clone());
                break;
            }
            self.enqueue(first, Reason::Clause(ci));
        }
        keep.extend(iter);
        self.watches[false_lit.index()] = keep;
        conflict
    }

    fn check_card(&mut self, ci: usize) -> Option<Vec<Lit>> {
        let card = &self.cards[ci];
        let g = self.lit_value(card.guard);
        if g == -1 {
            return None;
        }
        let (mut t, mut u) = (0u32, 0u32);
        for &l in &card.lits {
            match self.lit_value(l) {
                1 => t += 1,
                0 => u += 1,
                _ => {}
            }
        }
        let k = card.k;
        if card.at_least {
            if t + u > k {
                return None;
            }
            let falses: Vec<Lit> = card.lits.iter().copied().filter(|&l| self.lit_value(l) == -1).collect();
            if t + u < k {
                if g == 1 {
                    let mut c = vec![!card.guard];
                    c.extend(falses);
                    return Some(c);
                }
                let mut r = vec![!card.guard];
                r.extend(falses);
                self.enqueue(!self.cards[ci].guard, Reason::Lits(r.into_boxed_slice()));
                return None;
            }
            if g == 1 && u > 0 {
                let open: Vec<Lit> = card.lits.iter().copied().filter(|&l| self.lit_value(l) == 0).collect();
                let guard = card.guard;
                for l in open {
                    let mut r = vec![l, !guard];
                    r.extend(falses.iter().copied());
                    self.enqueue(l, Reason::Lits(r.into_boxed_slice()));
                }
            }
            None
        } else {
            if t < k {
                return None;
            }
            let trues: Vec<Lit> = card.lits.iter().copied().filter(|&l| self.lit_value(l) == 1).collect();
            if t > k {
                let mut c: Vec<Lit> = vec![!card.guard];
                c.extend(trues.iter().take(k as usize + 1).map(|&l| !l));
                if g == 1 {
                    return Some(c);
                }
                let guard = card.guard;
                self.enqueue(!guard, Reason::Lits(c.into_boxed_slice()));
                return None;
            }
            if g == 1 && u > 0 {
                let open: Vec<Lit> = card.lits.iter().copied().filter(|&l| self.lit_value(l) == 0).collect();
                let guard = card.guard;
                for l in open {
                    let mut r = vec![!l, !guard];
                    r.extend(trues.iter().map(|&x| !x));
                    self.enqueue(!l, Reason::Lits(r.into_boxed_slice()));
                }
            }
            None
        }
    }

    fn reason_lits(&self, v: usize) -> &[Lit] {
        match &self.reason[v] {
            Reason::Decision => &[],
            Reason::Clause(ci) => &self.clauses[*ci],
            Reason::Lits(ls) => ls,
        }
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.update(v, &self.activity);
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first) and the backjump level.
    fn analyze(&mut self, conflict: Vec<Lit>) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![FALSE];
        let mut path = 0usize;
        let mut clause = conflict;
        let mut idx = self.trail.len();
        let mut skip_first = false;
        let p = loop {
            for (j, &q) in clause.iter().enumerate() {
                if skip_first && j == 0 {
                    continue;
                }
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            clause = self.reason_lits(p.var() as usize).to_vec();
            skip_first = true;
        };
        learnt[0] = !p;
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[best].var() as usize] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            back = self.level[learnt[1].var() as usize];
        }
        self.var_inc /= 0.95;
        (learnt, back)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.phase[v] = !l.is_neg();
            self.value[v] = UNDEF;
            self.reason[v] = Reason::Decision;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                let v32 = v as u32;
                return Some(if self.phase[v] { Lit::pos(v32) } else { Lit::neg(v32) });
            }
        }
        None
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn solve(&mut self) -> SolveResult {
        if self.trivially_unsat {
            return SolveResult::Unsat;
        }
        for v in 0..self.num_vars() {
            self.heap.insert(v, &self.activity);
        }
        let units = std::mem::take(&mut self.units);
        for l in units {
            match self.lit_value(l) {
                1 => {}
                -1 => return SolveResult::Unsat,
                _ => self.enqueue(l, Reason::Decision),
            }
        }
        for ci in 0..self.cards.len() {
            if self.check_card(ci).is_some() {
                return SolveResult::Unsat;
            }
        }

        let mut conflicts: u64 = 0;
        let mut restart_index = 0u32;
        let mut restart_budget = luby(restart_index) * 64;
        let mut ticks: u32 = 0;
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(256) && self.timed_out() {
                return SolveResult::Unknown;
            }
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    return SolveResult::Unsat;
                }
                conflicts += 1;
                let (learnt, back) = self.analyze(conflict);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], Reason::Lits(learnt.into_boxed_slice()));
                } else {
                    let ci = self.clauses.len();
                    self.watches[learnt[0].index()].push(ci);
                    self.watches[learnt[1].index()].push(ci);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.enqueue(first, Reason::Clause(ci));
                }
                if conflicts >= restart_budget {
                    conflicts = 0;
                    restart_index += 1;
                    restart_budget = luby(restart_index) * 64;
                    self.backtrack(0);
                }
                continue;
            }
            match self.pick_branch() {
                None => {
                    return SolveResult::Sat(self.value.iter().map(|&v| v == 1).collect());
                }
                Some(l) => {
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(l, Reason::Decision);
                }
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut i = i as u64 + 1;
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if i == (1u64 << k) - 1 {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Max-heap of variables by activity; ties go to the lower index.
#[derive(Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos[v].is_some() {
            return;
        }
        self.heap.push(v);
        self.pos[v] = Some(self.heap.len() - 1);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn update(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0]] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(self.heap[i], self.heap[parent], act) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(self.heap[l], self.heap[best], act) {
                best = l;
            }
            if r < self.heap.len() && Self::better(self.heap[r], self.heap[best], act) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a]] = Some(a);
        self.pos[self.heap[b]] = Some(b);
    }
}
