//! Random bounded nets and a brute-force supervisor used as an oracle.
//!
//! The oracle works on the raw incidence data kept by the generator and
//! shares no code with the library beyond construction of the net.

#![allow(dead_code)]

pub mod invariants;

use std::collections::{BTreeMap, HashMap, VecDeque};

use petri_control::classify::{Atom, Clause, Comparison, ForbiddenSpec};
use petri_control::net::{Marking, NetBuilder, PetriNet};
use rand::Rng;

pub const TOKEN_BOUND: u32 = 3;
pub const MAX_STATES: usize = 5000;

/// `(place, at_least, value)`: `m(p) >= value` when `at_least`, else `m(p) <= value`.
pub type RawAtom = (usize, bool, u32);

#[derive(Debug, Clone)]
pub struct RandomNet {
    pub net: PetriNet,
    pub spec: ForbiddenSpec,
    /// `pre[t][p]`
    pub pre: Vec<Vec<u32>>,
    /// `post[t][p]`
    pub post: Vec<Vec<u32>>,
    pub initial: Vec<u32>,
    pub controllable: Vec<bool>,
    pub clauses: Vec<Vec<RawAtom>>,
    pub forbid_deadlocks: bool,
}

pub fn random_net<R: Rng>(rng: &mut R) -> RandomNet {
    let np = rng.gen_range(3..=8);
    let nt = rng.gen_range(2..=6);
    let mut pre = vec![vec![0u32; np]; nt];
    let mut post = vec![vec![0u32; np]; nt];
    let mut controllable = vec![false; nt];
    for t in 0..nt {
        controllable[t] = rng.gen_bool(0.7);
        let mut consumed = 0;
        for _ in 0..rng.gen_range(1..=2) {
            let p = rng.gen_range(0..np);
            if pre[t][p] == 0 {
                pre[t][p] = if rng.gen_bool(0.8) { 1 } else { 2 };
                consumed += pre[t][p];
            }
        }
        // Roughly token-conserving, so that most nets are live and bounded.
        let mut produced = match rng.gen_range(0..10) {
            0 => consumed.saturating_sub(1),
            1 => consumed + 1,
            _ => consumed,
        };
        let mut guard = 0;
        while produced > 0 && guard < 8 {
            guard += 1;
            let p = rng.gen_range(0..np);
            let w = rng.gen_range(1..=produced.min(2));
            if post[t][p] + w <= 2 {
                post[t][p] += w;
                produced -= w;
            }
        }
    }
    let mut initial = pre[rng.gen_range(0..nt)].clone();
    for _ in 0..rng.gen_range(1..=3) {
        let p = rng.gen_range(0..np);
        initial[p] = (initial[p] + 1).min(TOKEN_BOUND);
    }

    let mut rn = assemble(pre, post, initial, controllable, Vec::new(), false);
    // Clauses are cut from reachable states so that most instances have a
    // non-empty forbidden set.
    let reachable = Oracle::build(&rn, TOKEN_BOUND, MAX_STATES).map(|o| o.states);
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let witness = match &reachable {
            Some(states) if states.len() > 1 => states[rng.gen_range(1..states.len())].clone(),
            _ => vec![1; np],
        };
        let mut clause = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let p = rng.gen_range(0..np);
            if witness[p] > 0 {
                clause.push((p, true, rng.gen_range(1..=witness[p])));
            } else {
                clause.push((p, false, 0));
            }
        }
        clauses.push(clause);
    }
    rn = assemble(rn.pre, rn.post, rn.initial, rn.controllable, clauses, rng.gen_bool(0.15));
    rn
}

fn assemble(
    pre: Vec<Vec<u32>>,
    post: Vec<Vec<u32>>,
    initial: Vec<u32>,
    controllable: Vec<bool>,
    clauses: Vec<Vec<RawAtom>>,
    forbid_deadlocks: bool,
) -> RandomNet {
    let (np, nt) = (initial.len(), pre.len());
    let mut b = NetBuilder::new("random");
    for (p, &k) in initial.iter().enumerate() {
        b.add_place(&format!("P{}", p + 1), k);
    }
    for (t, &c) in controllable.iter().enumerate() {
        b.add_transition(&format!("t{}", t + 1), c, None);
    }
    for t in 0..nt {
        for p in 0..np {
            if pre[t][p] > 0 {
                b.set_input(p, t, pre[t][p]);
            }
            if post[t][p] > 0 {
                b.set_output(t, p, post[t][p]);
            }
        }
    }
    let net = b.build().expect("generated net is well formed");
    let spec = ForbiddenSpec {
        clauses: clauses
            .iter()
            .map(|c| {
                Clause(
                    c.iter()
                        .map(|&(p, ge, v)| {
                            Atom::new(p, if ge { Comparison::AtLeast } else { Comparison::AtMost }, v)
                        })
                        .collect(),
                )
            })
            .collect(),
        explicit: Vec::new(),
        forbid_deadlocks,
    };
    RandomNet { net, spec, pre, post, initial, controllable, clauses, forbid_deadlocks }
}

/// Brute-force state space with the forbidden closure computed by naive
/// fixpoint iteration.
#[derive(Debug)]
pub struct Oracle {
    pub states: Vec<Vec<u32>>,
    pub succ: Vec<Vec<(usize, usize)>>,
    pub forbidden: Vec<bool>,
}

impl Oracle {
    /// `None` when some place exceeds `bound` or there are too many states.
    pub fn build(rn: &RandomNet, bound: u32, max_states: usize) -> Option<Self> {
        let nt = rn.pre.len();
        let mut states = vec![rn.initial.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(rn.initial.clone(), 0)]);
        let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for t in 0..nt {
                let m = &states[i];
                if m.iter().zip(&rn.pre[t]).any(|(a, b)| a < b) {
                    continue;
                }
                let next: Vec<u32> =
                    (0..m.len()).map(|p| m[p] - rn.pre[t][p] + rn.post[t][p]).collect();
                if next.iter().any(|&k| k > bound) {
                    return None;
                }
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if states.len() >= max_states {
                            return None;
                        }
                        let j = states.len();
                        index.insert(next.clone(), j);
                        states.push(next);
                        succ.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                };
                succ[i].push((t, j));
            }
        }

        let holds = |m: &[u32], c: &[RawAtom]| {
            c.iter().all(|&(p, ge, v)| if ge { m[p] >= v } else { m[p] <= v })
        };
        let mut forbidden: Vec<bool> = states
            .iter()
            .zip(&succ)
            .map(|(m, s)| {
                rn.clauses.iter().any(|c| holds(m, c)) || (rn.forbid_deadlocks && s.is_empty())
            })
            .collect();
        loop {
            let mut changed = false;
            for i in 0..states.len() {
                if !forbidden[i]
                    && succ[i].iter().any(|&(t, j)| !rn.controllable[t] && forbidden[j])
                {
                    forbidden[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some(Oracle { states, succ, forbidden })
    }

    pub fn initial_forbidden(&self) -> bool {
        self.forbidden[0]
    }

    /// Allow iff the successor is admissible, over every admissible state and
    /// every enabled controllable transition.
    pub fn decisions(&self, rn: &RandomNet) -> BTreeMap<(Vec<u32>, usize), bool> {
        let mut out = BTreeMap::new();
        for (i, m) in self.states.iter().enumerate() {
            if self.forbidden[i] {
                continue;
            }
            for &(t, j) in &self.succ[i] {
                if rn.controllable[t] {
                    out.insert((m.clone(), t), !self.forbidden[j]);
                }
            }
        }
        out
    }

    /// States reached from the initial state when only decisions marked
    /// `true` are taken for controllable transitions.
    pub fn controlled_reach(&self, rn: &RandomNet) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.states.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &(t, j) in &self.succ[i] {
                if rn.controllable[t] && self.forbidden[j] {
                    continue;
                }
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let mut out: Vec<Vec<u32>> =
            (0..self.states.len()).filter(|&i| seen[i]).map(|i| self.states[i].clone()).collect();
        out.sort();
        out
    }

    pub fn forbidden_count(&self) -> usize {
        self.forbidden.iter().filter(|&&f| f).count()
    }
}

pub fn marking(v: &[u32]) -> Marking {
    Marking::new(v.to_vec())
}
