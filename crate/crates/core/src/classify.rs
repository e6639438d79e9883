//! Admissible / forbidden / border partition of the reachability graph and
//! the per-transition critical and sound state sets.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::net::{Marking, PetriNet};
use crate::reach::ReachGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("forbidden clause references unknown place index {0}")]
    UnknownPlace(usize),
    #[error("explicit forbidden marking has {got} places, net has {expected}")]
    MarkingLength { got: usize, expected: usize },
    #[error("forbidden clause {0} has no comparisons")]
    EmptyClause(usize),
    #[error("initial marking {0} is forbidden; no supervisor exists")]
    InitialForbidden(String),
    #[error("uncontrollable transition `{transition}` leads from admissible {source_state} into forbidden {target}")]
    UncontrollableBreach {
        transition: String,
        source_state: String,
        target: String,
    },
    #[error("transition `{0}` is not controllable")]
    NotControllable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comparison {
    AtMost,
    AtLeast,
    Equal,
}

impl Comparison {
    pub fn holds(self, count: u32, value: u32) -> bool {
        match self {
            Comparison::AtMost => count <= value,
            Comparison::AtLeast => count >= value,
            Comparison::Equal => count == value,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Equal => "=",
        }
    }
}

/// `m(place) <op> value`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub place: usize,
    pub op: Comparison,
    pub value: u32,
}

impl Atom {
    pub fn new(place: usize, op: Comparison, value: u32) -> Self {
        Self { place, op, value }
    }

    pub fn holds(&self, m: &Marking) -> bool {
        self.op.holds(m.get(self.place), self.value)
    }
}

/// Conjunction of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(pub Vec<Atom>);

impl Clause {
    pub fn holds(&self, m: &Marking) -> bool {
        self.0.iter().all(|a| a.holds(m))
    }
}

/// Which markings are ruled out before closure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForbiddenSpec {
    pub clauses: Vec<Clause>,
    pub explicit: Vec<Marking>,
    pub forbid_deadlocks: bool,
}

impl ForbiddenSpec {
    pub fn validate(&self, net: &PetriNet) -> Result<(), ClassifyError> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if clause.0.is_empty() {
                return Err(ClassifyError::EmptyClause(i));
            }
            if let Some(a) = clause.0.iter().find(|a| a.place >= net.num_places()) {
                return Err(ClassifyError::UnknownPlace(a.place));
            }
        }
        if let Some(m) = self.explicit.iter().find(|m| m.len() != net.num_places()) {
            return Err(ClassifyError::MarkingLength {
                got: m.len(),
                expected: net.num_places(),
            });
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty() && self.explicit.is_empty() && !self.forbid_deadlocks
    }

    /// Forbiddenness of a single marking before closure.
    pub fn base_forbidden(&self, m: &Marking, is_deadlock: bool) -> bool {
        (self.forbid_deadlocks && is_deadlock)
            || self.clauses.iter().any(|c| c.holds(m))
            || self.explicit.iter().any(|e| e == m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Admissible,
    Forbidden,
    Border,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Admissible => "admissible",
            Label::Forbidden => "forbidden",
            Label::Border => "border",
        })
    }
}

/// Per-node partition. `Border` nodes are also forbidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    labels: Vec<Label>,
}

impl Classification {
    pub fn label(&self, n: usize) -> Label {
        self.labels[n]
    }

    pub fn is_admissible(&self, n: usize) -> bool {
        self.labels[n] == Label::Admissible
    }

    pub fn is_forbidden(&self, n: usize) -> bool {
        !self.is_admissible(n)
    }

    pub fn is_border(&self, n: usize) -> bool {
        self.labels[n] == Label::Border
    }

    pub fn admissible(&self) -> Vec<usize> {
        self.select(|l| l == Label::Admissible)
    }

    pub fn forbidden(&self) -> Vec<usize> {
        self.select(|l| l != Label::Admissible)
    }

    pub fn border(&self) -> Vec<usize> {
        self.select(|l| l == Label::Border)
    }

    fn select(&self, keep: impl Fn(Label) -> bool) -> Vec<usize> {
        (0..self.labels.len()).filter(|&n| keep(self.labels[n])).collect()
    }
}

/// Backward closure of the base-forbidden set under uncontrollable edges,
/// followed by border detection.
pub fn forbidden_closure(
    graph: &ReachGraph,
    net: &PetriNet,
    spec: &ForbiddenSpec,
) -> Result<Classification, ClassifyError> {
    spec.validate(net)?;
    let n = graph.len();

    let mut uncontrollable_preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        if !net.is_controllable(e.transition) {
            uncontrollable_preds[e.target].push(e.source);
        }
    }

    let mut forbidden = vec![false; n];
    let mut work = VecDeque::new();
    for (i, m) in graph.nodes().iter().enumerate() {
        if spec.base_forbidden(m, graph.is_deadlock(i)) {
            forbidden[i] = true;
            work.push_back(i);
        }
    }
    while let Some(i) = work.pop_front() {
        for &p in &uncontrollable_preds[i] {
            if !forbidden[p] {
                forbidden[p] = true;
                work.push_back(p);
            }
        }
    }

    let mut labels: Vec<Label> = forbidden
        .iter()
        .map(|&f| if f { Label::Forbidden } else { Label::Admissible })
        .collect();
    for e in graph.edges() {
        if !forbidden[e.source] && forbidden[e.target] {
            if !net.is_controllable(e.transition) {
                return Err(ClassifyError::UncontrollableBreach {
                    transition: net.transition_name(e.transition).to_string(),
                    source_state: net.format_marking(graph.node(e.source)),
                    target: net.format_marking(graph.node(e.target)),
                });
            }
            labels[e.target] = Label::Border;
        }
    }

    if forbidden[graph.initial()] {
        return Err(ClassifyError::InitialForbidden(
            net.format_marking(graph.node(graph.initial())),
        ));
    }
    Ok(Classification { labels })
}

fn check_controllable(net: &PetriNet, t: usize) -> Result<(), ClassifyError> {
    if net.is_controllable(t) {
        Ok(())
    } else {
        Err(ClassifyError::NotControllable(net.transition_name(t).to_string()))
    }
}

fn admissible_with<F>(graph: &ReachGraph, cls: &Classification, t: usize, keep: F) -> Vec<Marking>
where
    F: Fn(usize) -> bool,
{
    (0..graph.len())
        .filter(|&n| cls.is_admissible(n))
        .filter_map(|n| graph.successor(n, t).filter(|&s| keep(s)).map(|_| n))
        .map(|n| graph.node(n).clone())
        .collect()
}

/// Admissible markings whose `t`-successor is a border forbidden state.
pub fn critical_set(
    graph: &ReachGraph,
    cls: &Classification,
    net: &PetriNet,
    t: usize,
) -> Result<Vec<Marking>, ClassifyError> {
    check_controllable(net, t)?;
    Ok(admissible_with(graph, cls, t, |s| cls.is_border(s)))
}

/// Admissible markings whose `t`-successor is admissible.
pub fn sound_set(
    graph: &ReachGraph,
    cls: &Classification,
    net: &PetriNet,
    t: usize,
) -> Result<Vec<Marking>, ClassifyError> {
    check_controllable(net, t)?;
    Ok(admissible_with(graph, cls, t, |s| cls.is_admissible(s)))
}
