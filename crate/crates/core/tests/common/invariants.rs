//! Invariant checks shared by the property tests and the acceptance runner.

use std::collections::BTreeSet;

use petri_control::classify::{critical_set, forbidden_closure, sound_set, ForbiddenSpec};
use petri_control::io::netfile::{parse_net, serialize_net};
use petri_control::io::report::{build_report, to_json};
use petri_control::net::{Marking, PetriNet, SubMarking};
use petri_control::reach::{build_reach_graph, ExplorationLimits};
use petri_control::synth::{synthesize_all, Method, Synthesized, SynthesisOptions};
use petri_control::verify::check_maximal_permissive;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_net, Oracle, RandomNet, MAX_STATES, TOKEN_BOUND};

pub const PLACES: usize = 5;

pub fn limits() -> ExplorationLimits {
    ExplorationLimits { max_states: MAX_STATES, max_tokens_per_place: Some(TOKEN_BOUND) }
}

pub fn sub_marking() -> impl Strategy<Value = SubMarking> {
    proptest::collection::vec(0u32..=3, PLACES)
        .prop_map(|v| SubMarking::from_pairs(v.into_iter().enumerate()))
}

pub fn marking() -> impl Strategy<Value = Marking> {
    proptest::collection::vec(0u32..=3, PLACES).prop_map(Marking::new)
}

/// Bounded random nets whose initial state is admissible.
pub fn bounded_net() -> impl Strategy<Value = RandomNet> {
    any::<u64>().prop_filter_map("unbounded or initially forbidden", |seed| {
        let rn = random_net(&mut ChaCha8Rng::seed_from_u64(seed));
        let oracle = Oracle::build(&rn, TOKEN_BOUND, MAX_STATES)?;
        (!oracle.initial_forbidden()).then_some(rn)
    })
}

pub fn over_state_partial_order(a: &SubMarking, b: &SubMarking, c: &SubMarking) -> Result<(), TestCaseError> {
    prop_assert!(a.is_over_state_of(a));
    if a.is_over_state_of(b) && b.is_over_state_of(a) {
        prop_assert_eq!(a, b);
    }
    if a.is_over_state_of(b) && b.is_over_state_of(c) {
        prop_assert!(a.is_over_state_of(c));
    }
    Ok(())
}

pub fn covers_is_over_state_of_support(s: &SubMarking, m: &Marking) -> Result<(), TestCaseError> {
    prop_assert_eq!(s.covers(m), s.is_over_state_of(&m.support()));
    let direct = s.iter().all(|(p, k)| m.get(p) >= k);
    prop_assert_eq!(s.covers(m), direct);
    Ok(())
}

pub fn sub_marking_enumeration(m: &Marking) -> Result<(), TestCaseError> {
    let support = m.support();
    let all = support.sub_markings(1 << 20).unwrap();
    let expected: u128 = m.counts().iter().map(|&k| u128::from(k) + 1).product::<u128>() - 1;
    prop_assert_eq!(all.len() as u128, expected);
    prop_assert_eq!(support.sub_marking_count(), expected);
    let distinct: BTreeSet<&SubMarking> = all.iter().collect();
    prop_assert_eq!(distinct.len(), all.len());
    for s in &all {
        prop_assert!(!s.is_empty());
        prop_assert!(s.covers(m));
        prop_assert!(s.is_over_state_of(&support));
    }
    Ok(())
}

pub fn covers_is_monotone(s: &SubMarking, m: &Marking, bump: &Marking) -> Result<(), TestCaseError> {
    let bigger = Marking::new(m.counts().iter().zip(bump.counts()).map(|(a, b)| a + b).collect());
    if s.covers(m) {
        prop_assert!(s.covers(&bigger));
    }
    Ok(())
}

/// Graph states equal the brute-force state space and every edge follows the
/// incidence rule.
pub fn graph_matches_firing_rule(rn: &RandomNet) -> Result<(), TestCaseError> {
    let g = build_reach_graph(&rn.net, limits()).unwrap();
    let oracle = Oracle::build(rn, TOKEN_BOUND, MAX_STATES).unwrap();
    let ours: BTreeSet<Vec<u32>> = g.nodes().iter().map(|m| m.counts().to_vec()).collect();
    let theirs: BTreeSet<Vec<u32>> = oracle.states.iter().cloned().collect();
    prop_assert_eq!(ours, theirs);
    for e in g.edges() {
        let src = g.node(e.source).counts();
        let dst = g.node(e.target).counts();
        for p in 0..src.len() {
            prop_assert!(src[p] >= rn.pre[e.transition][p]);
            prop_assert_eq!(dst[p], src[p] - rn.pre[e.transition][p] + rn.post[e.transition][p]);
        }
    }
    let edge_count: usize = oracle.succ.iter().map(Vec::len).sum();
    prop_assert_eq!(g.edges().len(), edge_count);
    Ok(())
}

fn check_form(
    s: &Synthesized,
    targets: &[Marking],
    keep_apart: &[Marking],
    blocks_targets: bool,
) -> Result<(), TestCaseError> {
    let sets = &s.sets;
    for (i, a) in sets.c3.iter().enumerate() {
        for b in &sets.c3[i + 1..] {
            prop_assert!(!a.is_over_state_of(b) && !b.is_over_state_of(a), "C3 is not an antichain");
        }
    }
    for r in &sets.c4 {
        prop_assert!(sets.c3.contains(r));
    }
    for m in targets {
        let covered = sets.c4.iter().any(|r| r.covers(m));
        prop_assert!(covered || sets.uncoverable.contains(m), "target left uncovered");
        prop_assert_eq!(s.condition.allows(m), !blocks_targets);
    }
    for m in keep_apart {
        prop_assert_eq!(s.condition.allows(m), blocks_targets);
    }
    for r in sets.c2.iter() {
        prop_assert!(!keep_apart.iter().any(|m| r.covers(m)));
    }
    Ok(())
}

/// C3 antichain, cover completeness, blocking completeness and
/// permissiveness for both forms, and agreement of the two forms on every
/// admissible state where the transition is enabled.
pub fn synthesis_invariants(rn: &RandomNet) -> Result<(), TestCaseError> {
    let net = &rn.net;
    let g = build_reach_graph(net, limits()).unwrap();
    let cls = forbidden_closure(&g, net, &rn.spec).unwrap();
    let opts = SynthesisOptions { method: Method::Both, ..SynthesisOptions::default() };
    let result = synthesize_all(net, &g, &cls, &opts).unwrap();
    for ts in &result.transitions {
        prop_assert_eq!(&ts.criticals, &critical_set(&g, &cls, net, ts.transition).unwrap());
        prop_assert_eq!(&ts.sounds, &sound_set(&g, &cls, net, ts.transition).unwrap());
        let Some(primal) = &ts.primal else {
            prop_assert!(ts.criticals.is_empty());
            continue;
        };
        let dual = ts.dual.as_ref().unwrap();
        check_form(primal, &ts.criticals, &ts.sounds, true)?;
        check_form(dual, &ts.sounds, &ts.criticals, false)?;
        for n in cls.admissible() {
            let m = g.node(n);
            if net.enabled(m, ts.transition) {
                prop_assert_eq!(primal.condition.allows(m), dual.condition.allows(m));
            }
        }
    }
    Ok(())
}

fn report_json(net: &PetriNet, spec: &ForbiddenSpec) -> String {
    let g = build_reach_graph(net, limits()).unwrap();
    let cls = forbidden_closure(&g, net, spec).unwrap();
    let opts = SynthesisOptions::default();
    let result = synthesize_all(net, &g, &cls, &opts).unwrap();
    let ctl = result.controller(net).unwrap();
    let v = check_maximal_permissive(net, &ctl, &g, &cls, limits());
    to_json(&build_report(net, &g, &cls, &opts, &result, &v))
}

/// Reports are identical across repeated runs and across a serialize and
/// re-parse of the net.
pub fn report_is_byte_stable(rn: &RandomNet) -> Result<(), TestCaseError> {
    let first = report_json(&rn.net, &rn.spec);
    let second = report_json(&rn.net, &rn.spec);
    prop_assert_eq!(&first, &second);
    let (net, spec) = parse_net(&serialize_net(&rn.net, &rn.spec)).unwrap();
    prop_assert_eq!(&first, &report_json(&net, &spec));
    Ok(())
}

pub fn serialize_parse_idempotent(rn: &RandomNet) -> Result<(), TestCaseError> {
    let text = serialize_net(&rn.net, &rn.spec);
    let (net, spec) = parse_net(&text).unwrap();
    prop_assert_eq!(&net, &rn.net);
    prop_assert_eq!(&spec, &rn.spec);
    prop_assert_eq!(serialize_net(&net, &spec), text);
    Ok(())
}
