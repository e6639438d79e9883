//! Explicit-state reachability graph construction.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::net::{Marking, PetriNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReachError {
    #[error("state limit of {limit} markings exceeded")]
    StateLimitExceeded { limit: usize },
    #[error("place `{place}` exceeds the token bound {bound} in marking {marking}")]
    TokenLimitExceeded {
        place: String,
        bound: u32,
        marking: Marking,
    },
    #[error(
        "net is unbounded: firing `{transition}` reaches {successor}, which strictly dominates its ancestor {ancestor}"
    )]
    Unbounded {
        ancestor: Marking,
        transition: String,
        successor: Marking,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplorationLimits {
    pub max_states: usize,
    pub max_tokens_per_place: Option<u32>,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        Self {
            max_states: 1_000_000,
            max_tokens_per_place: None,
        }
    }
}

impl ExplorationLimits {
    pub fn with_max_states(max_states: usize) -> Self {
        Self {
            max_states: max_states.max(1),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub transition: usize,
    pub target: usize,
}

/// Deduplicated marking graph with nodes sorted lexicographically by marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachGraph {
    nodes: Vec<Marking>,
    edges: Vec<Edge>,
    initial: usize,
    // edge index range per source node
    offsets: Vec<usize>,
    index: HashMap<Marking, usize>,
}

impl ReachGraph {
    pub fn nodes(&self) -> &[Marking] {
        &self.nodes
    }

    pub fn node(&self, n: usize) -> &Marking {
        &self.nodes[n]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// All edges sorted by (source, transition).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn node_of(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn out_edges(&self, n: usize) -> &[Edge] {
        &self.edges[self.offsets[n]..self.offsets[n + 1]]
    }

    /// Target of the `t`-edge leaving `n`, if `t` is enabled there.
    pub fn successor(&self, n: usize, t: usize) -> Option<usize> {
        let out = self.out_edges(n);
        out.binary_search_by_key(&t, |e| e.transition)
            .ok()
            .map(|i| out[i].target)
    }

    pub fn is_deadlock(&self, n: usize) -> bool {
        self.offsets[n] == self.offsets[n + 1]
    }

    pub fn deadlock_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&n| self.is_deadlock(n)).collect()
    }
}

pub fn build_reach_graph(net: &PetriNet, limits: ExplorationLimits) -> Result<ReachGraph, ReachError> {
    explore(net, limits, |_, _| true)
}

/// Breadth-first exploration firing only the transitions that are enabled
/// in the net and accepted by `allow`.
pub fn explore<F>(net: &PetriNet, limits: ExplorationLimits, allow: F) -> Result<ReachGraph, ReachError>
where
    F: Fn(&Marking, usize) -> bool,
{
    let m0 = net.initial_marking();
    check_token_bound(net, &m0, limits)?;

    let mut nodes = vec![m0.clone()];
    // BFS tree parent, used for the ancestor domination check
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut index = HashMap::from([(m0, 0usize)]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(n) = queue.pop_front() {
        for t in 0..net.num_transitions() {
            let current = &nodes[n];
            if !net.enabled(current, t) || !allow(current, t) {
                continue;
            }
            let next = net.fire(current, t).expect("enabled transition fires");
            let target = match index.get(&next) {
                Some(&id) => id,
                None => {
                    check_token_bound(net, &next, limits)?;
                    let mut ancestor = Some(n);
                    while let Some(a) = ancestor {
                        if next.strictly_dominates(&nodes[a]) {
                            return Err(ReachError::Unbounded {
                                ancestor: nodes[a].clone(),
                                transition: net.transition_name(t).to_string(),
                                successor: next,
                            });
                        }
                        ancestor = parent[a];
                    }
                    if nodes.len() >= limits.max_states {
                        return Err(ReachError::StateLimitExceeded {
                            limit: limits.max_states,
                        });
                    }
                    let id = nodes.len();
                    nodes.push(next.clone());
                    parent.push(Some(n));
                    index.insert(next, id);
                    queue.push_back(id);
                    id
                }
            };
            edges.push(Edge {
                source: n,
                transition: t,
                target,
            });
        }
    }

    Ok(canonicalize(nodes, edges, 0))
}

fn check_token_bound(net: &PetriNet, m: &Marking, limits: ExplorationLimits) -> Result<(), ReachError> {
    if let Some(bound) = limits.max_tokens_per_place {
        if let Some(p) = (0..m.len()).find(|&p| m.get(p) > bound) {
            return Err(ReachError::TokenLimitExceeded {
                place: net.place_name(p).to_string(),
                bound,
                marking: m.clone(),
            });
        }
    }
    Ok(())
}

fn canonicalize(nodes: Vec<Marking>, edges: Vec<Edge>, initial: usize) -> ReachGraph {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].cmp(&nodes[b]));
    let mut rank = vec![0; nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut slots: Vec<Option<Marking>> = nodes.into_iter().map(Some).collect();
    let nodes: Vec<Marking> = order.iter().map(|&old| slots[old].take().unwrap()).collect();
    let mut edges: Vec<Edge> = edges
        .into_iter()
        .map(|e| Edge {
            source: rank[e.source],
            transition: e.transition,
            target: rank[e.target],
        })
        .collect();
    edges.sort();

    let mut offsets = vec![0; nodes.len() + 1];
    for e in &edges {
        offsets[e.source + 1] += 1;
    }
    for i in 0..nodes.len() {
        offsets[i + 1] += offsets[i];
    }
    let index = nodes.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    ReachGraph {
        nodes,
        edges,
        initial: rank[initial],
        offsets,
        index,
    }
}
