//! Closed-loop execution under a controller and comparison against the
//! optimal state-avoidance policy.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::classify::Classification;
use crate::net::{Marking, PetriNet};
use crate::reach::{explore, ExplorationLimits, ReachError, ReachGraph};
use crate::synth::TransitionCondition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("condition attached to uncontrollable transition `{0}`")]
    NotControllable(String),
    #[error("condition attached to unknown transition index {0}")]
    UnknownTransition(usize),
    #[error("two conditions for transition `{0}`")]
    DuplicateCondition(String),
}

/// Conditions gating controllable transitions. Transitions without a
/// condition are never blocked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Controller {
    conditions: BTreeMap<usize, TransitionCondition>,
}

impl Controller {
    pub fn new(
        net: &PetriNet,
        conditions: impl IntoIterator<Item = TransitionCondition>,
    ) -> Result<Self, VerifyError> {
        let mut map = BTreeMap::new();
        for c in conditions {
            if c.transition >= net.num_transitions() {
                return Err(VerifyError::UnknownTransition(c.transition));
            }
            let name = net.transition_name(c.transition);
            if !net.is_controllable(c.transition) {
                return Err(VerifyError::NotControllable(name.to_string()));
            }
            if map.insert(c.transition, c).is_some() {
                return Err(VerifyError::DuplicateCondition(name.to_string()));
            }
        }
        Ok(Self { conditions: map })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn condition(&self, t: usize) -> Option<&TransitionCondition> {
        self.conditions.get(&t)
    }

    pub fn conditions(&self) -> impl Iterator<Item = &TransitionCondition> {
        self.conditions.values()
    }

    /// Controller decision alone, ignoring whether `t` is enabled.
    pub fn allows(&self, m: &Marking, t: usize) -> bool {
        self.conditions.get(&t).is_none_or(|c| c.allows(m))
    }
}

pub fn controlled_enabled(net: &PetriNet, controller: &Controller, m: &Marking, t: usize) -> bool {
    net.enabled(m, t) && (!net.is_controllable(t) || controller.allows(m, t))
}

pub fn controlled_reach(
    net: &PetriNet,
    controller: &Controller,
    limits: ExplorationLimits,
) -> Result<ReachGraph, ReachError> {
    explore(net, limits, |m, t| !net.is_controllable(t) || controller.allows(m, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Allow,
    Block,
}

/// Allow/block per (admissible node, enabled controllable transition).
pub type DecisionTable = BTreeMap<(usize, usize), Decision>;

/// Optimal state-avoidance policy: block a controllable firing exactly when
/// its successor is forbidden.
pub fn oracle_supervisor(net: &PetriNet, graph: &ReachGraph, cls: &Classification) -> DecisionTable {
    let mut table = BTreeMap::new();
    for n in cls.admissible() {
        for e in graph.out_edges(n) {
            if net.is_controllable(e.transition) {
                let d = if cls.is_forbidden(e.target) {
                    Decision::Block
                } else {
                    Decision::Allow
                };
                table.insert((n, e.transition), d);
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub state: Marking,
    pub transition: usize,
    pub controller: Decision,
    pub oracle: Decision,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub controlled_states: usize,
    /// Admissible states reachable without leaving the admissible set.
    pub expected_states: usize,
    pub admissible_states: usize,
    /// Reached under control but not expected (includes any forbidden one).
    pub unexpected: Vec<Marking>,
    /// Expected but not reached under control.
    pub missing: Vec<Marking>,
    pub divergences: Vec<Divergence>,
    /// Admissible states where the controller blocks every enabled transition.
    pub induced_blocking: Vec<Marking>,
    /// Closed-loop exploration failure, if any.
    pub exploration_error: Option<String>,
}

/// Admissible nodes reachable from the initial node along edges that stay
/// inside the admissible set. This is the best any state-avoidance
/// controller can reach; it equals the whole admissible set whenever no
/// admissible state is only reachable through forbidden ones.
pub fn admissible_reachable(graph: &ReachGraph, cls: &Classification) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    if cls.is_forbidden(graph.initial()) {
        return seen;
    }
    let mut queue = VecDeque::from([graph.initial()]);
    seen.insert(graph.initial());
    while let Some(n) = queue.pop_front() {
        for e in graph.out_edges(n) {
            if cls.is_admissible(e.target) && seen.insert(e.target) {
                queue.push_back(e.target);
            }
        }
    }
    seen
}

pub fn check_maximal_permissive(
    net: &PetriNet,
    controller: &Controller,
    graph: &ReachGraph,
    cls: &Classification,
    limits: ExplorationLimits,
) -> VerificationReport {
    let expected: BTreeSet<Marking> = admissible_reachable(graph, cls)
        .into_iter()
        .map(|n| graph.node(n).clone())
        .collect();

    let (reached, exploration_error) = match controlled_reach(net, controller, limits) {
        Ok(g) => (g.nodes().iter().cloned().collect::<BTreeSet<_>>(), None),
        Err(e) => (BTreeSet::new(), Some(e.to_string())),
    };
    let unexpected: Vec<Marking> = reached.difference(&expected).cloned().collect();
    let missing: Vec<Marking> = if exploration_error.is_some() {
        Vec::new()
    } else {
        expected.difference(&reached).cloned().collect()
    };

    let oracle = oracle_supervisor(net, graph, cls);
    let divergences: Vec<Divergence> = oracle
        .iter()
        .filter_map(|(&(n, t), &want)| {
            let m = graph.node(n);
            let got = if controller.allows(m, t) {
                Decision::Allow
            } else {
                Decision::Block
            };
            (got != want).then(|| Divergence {
                state: m.clone(),
                transition: t,
                controller: got,
                oracle: want,
            })
        })
        .collect();

    let induced_blocking = cls
        .admissible()
        .into_iter()
        .filter(|&n| !graph.is_deadlock(n))
        .filter(|&n| {
            let m = graph.node(n);
            graph
                .out_edges(n)
                .iter()
                .all(|e| !controlled_enabled(net, controller, m, e.transition))
        })
        .map(|n| graph.node(n).clone())
        .collect();

    VerificationReport {
        pass: exploration_error.is_none()
            && unexpected.is_empty()
            && missing.is_empty()
            && divergences.is_empty(),
        controlled_states: reached.len(),
        expected_states: expected.len(),
        admissible_states: cls.admissible().len(),
        unexpected,
        missing,
        divergences,
        induced_blocking,
        exploration_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::forbidden_closure;
    use crate::fixtures::{self, parse_marking};
    use crate::net::SubMarking;
    use crate::reach::build_reach_graph;
    use crate::synth::{synthesize_all, Polarity, SynthesisOptions, Term};

    fn setup(
        fixture: (PetriNet, crate::classify::ForbiddenSpec),
    ) -> (PetriNet, ReachGraph, Classification) {
        let (net, spec) = fixture;
        let g = build_reach_graph(&net, ExplorationLimits::default()).unwrap();
        let cls = forbidden_closure(&g, &net, &spec).unwrap();
        (net, g, cls)
    }

    fn p4_at_least(net: &PetriNet, k: u32) -> Controller {
        let t1 = net.transition_index("t1").unwrap();
        let cond = TransitionCondition::new(
            t1,
            Polarity::Disable,
            vec![Term::AtLeast(SubMarking::from_pairs([(3, k)]))],
        );
        Controller::new(net, [cond]).unwrap()
    }

    #[test]
    fn gating_examples() {
        let (net, _, _) = setup(fixtures::two_machines_cap2());
        let ctl = p4_at_least(&net, 2);
        let t1 = net.transition_index("t1").unwrap();
        assert!(!controlled_enabled(&net, &ctl, &parse_marking(&net, "P1P4^2P5"), t1));
        assert!(controlled_enabled(&net, &ctl, &parse_marking(&net, "P1P3P4P5"), t1));
        let m0 = net.initial_marking();
        for t in 0..net.num_transitions() {
            assert_eq!(controlled_enabled(&net, &Controller::empty(), &m0, t), net.enabled(&m0, t));
        }
    }

    #[test]
    fn conditions_on_uncontrollable_transitions_are_rejected() {
        let (net, _, _) = setup(fixtures::two_machines_cap1());
        let t2 = net.transition_index("t2").unwrap();
        let cond = TransitionCondition::new(t2, Polarity::Disable, vec![]);
        assert_eq!(
            Controller::new(&net, [cond]),
            Err(VerifyError::NotControllable("t2".into()))
        );
    }

    #[test]
    fn synthesized_controllers_pass_on_fixtures() {
        for (fixture, size) in [(fixtures::two_machines_cap1(), 6), (fixtures::two_machines_cap2(), 10)] {
            let (net, g, cls) = setup(fixture);
            let result = synthesize_all(&net, &g, &cls, &SynthesisOptions::default()).unwrap();
            let ctl = result.controller(&net).unwrap();
            let closed = controlled_reach(&net, &ctl, ExplorationLimits::default()).unwrap();
            assert_eq!(closed.len(), size);
            let report = check_maximal_permissive(&net, &ctl, &g, &cls, ExplorationLimits::default());
            assert!(report.pass, "{report:?}");
            assert_eq!(report.controlled_states, size);
            assert_eq!(report.admissible_states, size);
            assert!(report.induced_blocking.is_empty());
        }
    }

    #[test]
    fn oracle_decisions_on_cap1() {
        let (net, g, cls) = setup(fixtures::two_machines_cap1());
        let table = oracle_supervisor(&net, &g, &cls);
        let t1 = net.transition_index("t1").unwrap();
        let node = |s: &str| g.node_of(&parse_marking(&net, s)).unwrap();
        assert_eq!(table[&(node("P1P4P5"), t1)], Decision::Block);
        assert_eq!(table[&(node("P1P3P5"), t1)], Decision::Allow);
        assert!(table.keys().all(|&(_, t)| net.is_controllable(t)));
    }

    #[test]
    fn over_restrictive_controller_fails() {
        let (net, g, cls) = setup(fixtures::two_machines_cap2());
        let ctl = p4_at_least(&net, 1);
        let report = check_maximal_permissive(&net, &ctl, &g, &cls, ExplorationLimits::default());
        assert!(!report.pass);
        let mut states: Vec<String> = report
            .divergences
            .iter()
            .map(|d| net.format_marking(&d.state))
            .collect();
        states.sort();
        assert_eq!(states, ["P1P3P4P5", "P1P3P4P6"]);
        assert!(report
            .divergences
            .iter()
            .all(|d| d.controller == Decision::Block && d.oracle == Decision::Allow));
    }

    #[test]
    fn empty_controller_passes_without_forbidden_states() {
        let (net, _) = fixtures::two_machines_cap1();
        let g = build_reach_graph(&net, ExplorationLimits::default()).unwrap();
        let cls = forbidden_closure(&g, &net, &Default::default()).unwrap();
        let report = check_maximal_permissive(&net, &Controller::empty(), &g, &cls, ExplorationLimits::default());
        assert!(report.pass);
        assert_eq!(report.controlled_states, 8);
    }

    #[test]
    fn blocking_everything_reaches_only_uncontrollable_closure() {
        let (net, _, _) = setup(fixtures::two_machines_cap1());
        let conds = net
            .controllable()
            .map(|t| TransitionCondition::new(t, Polarity::Enable, vec![]))
            .collect::<Vec<_>>();
        let ctl = Controller::new(&net, conds).unwrap();
        let closed = controlled_reach(&net, &ctl, ExplorationLimits::default()).unwrap();
        // no uncontrollable transition is enabled at P1P3P5
        assert_eq!(closed.len(), 1);
    }

    #[test]
    fn induced_blocking_is_reported() {
        let (net, g, cls) = setup(fixtures::two_machines_cap1());
        let conds = net
            .controllable()
            .map(|t| TransitionCondition::new(t, Polarity::Enable, vec![]))
            .collect::<Vec<_>>();
        let ctl = Controller::new(&net, conds).unwrap();
        let report = check_maximal_permissive(&net, &ctl, &g, &cls, ExplorationLimits::default());
        assert!(!report.pass);
        assert!(report.induced_blocking.contains(&net.initial_marking()));
    }
}
