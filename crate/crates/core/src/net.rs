//! Petri net value types, firing semantics and the over-state order.
//!
//! A [`SubMarking`] is a sparse set of per-place thresholds. It plays two
//! roles: it is an over-state of every marking whose counts meet all of its
//! thresholds, and it is read as the conjunctive condition
//! `m(P) >= k` for every `(P, k)` entry.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Default cap on the number of sub-markings a single enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("a net needs at least one place and one transition")]
    Empty,
    #[error("duplicate place name `{0}`")]
    DuplicatePlace(String),
    #[error("duplicate transition name `{0}`")]
    DuplicateTransition(String),
    #[error("weight matrix has wrong dimensions: {0}")]
    Dimension(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("sub-marking enumeration would produce {size} elements (cap {cap})")]
    EnumerationTooLarge { size: u128, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    pub initial: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub controllable: bool,
    /// Event label such as `c1` or `f1`.
    pub event: Option<String>,
}

/// A place/transition net with its initial marking.
///
/// `pre[p][t]` is the number of tokens `t` consumes from `p`;
/// `post[t][p]` the number it produces into `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    pre: Vec<Vec<u32>>,
    post: Vec<Vec<u32>>,
}

impl PetriNet {
    pub fn new(
        name: impl Into<String>,
        places: Vec<Place>,
        transitions: Vec<Transition>,
        pre: Vec<Vec<u32>>,
        post: Vec<Vec<u32>>,
    ) -> Result<Self, NetError> {
        if places.is_empty() || transitions.is_empty() {
            return Err(NetError::Empty);
        }
        let mut seen = HashSet::new();
        for p in &places {
            if !seen.insert(p.name.as_str()) {
                return Err(NetError::DuplicatePlace(p.name.clone()));
            }
        }
        let mut seen = HashSet::new();
        for t in &transitions {
            if !seen.insert(t.name.as_str()) {
                return Err(NetError::DuplicateTransition(t.name.clone()));
            }
        }
        let (np, nt) = (places.len(), transitions.len());
        if pre.len() != np || pre.iter().any(|row| row.len() != nt) {
            return Err(NetError::Dimension(format!("pre must be {np}x{nt}")));
        }
        if post.len() != nt || post.iter().any(|row| row.len() != np) {
            return Err(NetError::Dimension(format!("post must be {nt}x{np}")));
        }
        Ok(Self {
            name: name.into(),
            places,
            transitions,
            pre,
            post,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p.name == name)
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    pub fn place_name(&self, p: usize) -> &str {
        &self.places[p].name
    }

    pub fn transition_name(&self, t: usize) -> &str {
        &self.transitions[t].name
    }

    pub fn is_controllable(&self, t: usize) -> bool {
        self.transitions[t].controllable
    }

    /// Indices of the controllable transitions, in declaration order.
    pub fn controllable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.transitions.len()).filter(|&t| self.transitions[t].controllable)
    }

    pub fn pre(&self, p: usize, t: usize) -> u32 {
        self.pre[p][t]
    }

    pub fn post(&self, t: usize, p: usize) -> u32 {
        self.post[t][p]
    }

    pub fn initial_marking(&self) -> Marking {
        Marking(self.places.iter().map(|p| p.initial).collect())
    }

    pub fn enabled(&self, m: &Marking, t: usize) -> bool {
        (0..self.places.len()).all(|p| m.0[p] >= self.pre[p][t])
    }

    pub fn fire(&self, m: &Marking, t: usize) -> Result<Marking, NetError> {
        if !self.enabled(m, t) {
            return Err(NetError::NotEnabled(self.transitions[t].name.clone()));
        }
        Ok(Marking(
            (0..self.places.len())
                .map(|p| m.0[p] - self.pre[p][t] + self.post[t][p])
                .collect(),
        ))
    }

    /// Renders a marking in powered-support notation, e.g. `P1P3^2P6`.
    pub fn format_marking(&self, m: &Marking) -> String {
        self.format_sub_marking(&m.support())
    }

    pub fn format_sub_marking(&self, s: &SubMarking) -> String {
        if s.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (p, k) in s.iter() {
            out.push_str(self.place_name(p));
            if k > 1 {
                out.push('^');
                out.push_str(&k.to_string());
            }
        }
        out
    }
}

/// Incremental construction by name, used by the net file parser and tests.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    inputs: BTreeMap<(usize, usize), u32>,
    outputs: BTreeMap<(usize, usize), u32>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn place(mut self, name: &str, initial: u32) -> Self {
        self.add_place(name, initial);
        self
    }

    pub fn add_place(&mut self, name: &str, initial: u32) -> usize {
        self.places.push(Place {
            name: name.to_string(),
            initial,
        });
        self.places.len() - 1
    }

    pub fn transition(mut self, name: &str, controllable: bool) -> Self {
        self.add_transition(name, controllable, None);
        self
    }

    pub fn add_transition(&mut self, name: &str, controllable: bool, event: Option<String>) -> usize {
        self.transitions.push(Transition {
            name: name.to_string(),
            controllable,
            event,
        });
        self.transitions.len() - 1
    }

    pub fn has_place(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p.name == name)
    }

    pub fn has_transition(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    /// Arc place -> transition. Panics on unknown names.
    pub fn input(mut self, place: &str, transition: &str, weight: u32) -> Self {
        let p = self.has_place(place).expect("unknown place");
        let t = self.has_transition(transition).expect("unknown transition");
        self.set_input(p, t, weight);
        self
    }

    /// Arc transition -> place. Panics on unknown names.
    pub fn output(mut self, transition: &str, place: &str, weight: u32) -> Self {
        let p = self.has_place(place).expect("unknown place");
        let t = self.has_transition(transition).expect("unknown transition");
        self.set_output(t, p, weight);
        self
    }

    /// Returns false if the arc was already present.
    pub fn set_input(&mut self, p: usize, t: usize, weight: u32) -> bool {
        self.inputs.insert((p, t), weight).is_none()
    }

    /// Returns false if the arc was already present.
    pub fn set_output(&mut self, t: usize, p: usize, weight: u32) -> bool {
        self.outputs.insert((t, p), weight).is_none()
    }

    pub fn build(self) -> Result<PetriNet, NetError> {
        let (np, nt) = (self.places.len(), self.transitions.len());
        let mut pre = vec![vec![0; nt]; np];
        let mut post = vec![vec![0; np]; nt];
        for (&(p, t), &w) in &self.inputs {
            pre[p][t] = w;
        }
        for (&(t, p), &w) in &self.outputs {
            post[t][p] = w;
        }
        PetriNet::new(self.name, self.places, self.transitions, pre, post)
    }
}

/// Token count per place, indexed like [`PetriNet::places`].
///
/// Ordered lexicographically by counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, p: usize) -> u32 {
        self.0[p]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Marked places with their counts as thresholds.
    pub fn support(&self) -> SubMarking {
        SubMarking(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(p, &k)| (p, k))
                .collect(),
        )
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Marking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Componentwise `self >= other` with at least one strict place.
    pub fn strictly_dominates(&self, other: &Marking) -> bool {
        self.dominates(other) && self != other
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// Sparse `place -> threshold` map, thresholds always `>= 1`.
///
/// Entries are kept sorted by place index, so the derived ordering is the
/// canonical (place, threshold) lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubMarking(Vec<(usize, u32)>);

impl SubMarking {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds from arbitrary `(place, threshold)` pairs. Zero thresholds are
    /// dropped; repeated places keep the largest threshold.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, k) in pairs {
            if k > 0 {
                let e = map.entry(p).or_insert(k);
                *e = (*e).max(k);
            }
        }
        Self(map.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn threshold(&self, p: usize) -> u32 {
        self.0
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn threshold_sum(&self) -> u64 {
        self.0.iter().map(|&(_, k)| u64::from(k)).sum()
    }

    /// True iff `m(P) >= k` for every entry.
    pub fn covers(&self, m: &Marking) -> bool {
        self.0.iter().all(|&(p, k)| m.0[p] >= k)
    }

    /// Non-strict over-state relation: every place of `self` appears in
    /// `other` with at least the same threshold.
    pub fn is_over_state_of(&self, other: &SubMarking) -> bool {
        let mut rest = other.0.iter();
        'outer: for &(p, k) in &self.0 {
            for &(q, j) in rest.by_ref() {
                if q == p {
                    if k <= j {
                        continue 'outer;
                    }
                    return false;
                }
                if q > p {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// Number of non-empty over-states, `prod(k + 1) - 1`.
    pub fn sub_marking_count(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, &(_, k)| acc.saturating_mul(u128::from(k) + 1))
            - 1
    }

    /// Every non-empty over-state of `self`, in canonical order.
    pub fn sub_markings(&self, cap: usize) -> Result<Vec<SubMarking>, NetError> {
        let size = self.sub_marking_count();
        if size > cap as u128 {
            return Err(NetError::EnumerationTooLarge { size, cap });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut current = Vec::with_capacity(self.0.len());
        self.enumerate_from(0, &mut current, &mut out);
        out.sort();
        Ok(out)
    }

    fn enumerate_from(
        &self,
        i: usize,
        current: &mut Vec<(usize, u32)>,
        out: &mut Vec<SubMarking>,
    ) {
        if i == self.0.len() {
            if !current.is_empty() {
                out.push(SubMarking(current.clone()));
            }
            return;
        }
        let (p, k) = self.0[i];
        self.enumerate_from(i + 1, current, out);
        for j in 1..=k {
            current.push((p, j));
            self.enumerate_from(i + 1, current, out);
            current.pop();
        }
    }

    /// Immediate predecessors in the over-state order: one threshold lowered
    /// by one (dropping the entry at zero). The empty sub-marking is omitted.
    pub fn lowered(&self) -> impl Iterator<Item = SubMarking> + '_ {
        (0..self.0.len()).filter_map(move |i| {
            let mut v = self.0.clone();
            if v[i].1 == 1 {
                v.remove(i);
            } else {
                v[i].1 -= 1;
            }
            (!v.is_empty()).then_some(SubMarking(v))
        })
    }
}
