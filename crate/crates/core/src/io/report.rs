//! JSON synthesis report. Field order is fixed by the struct definitions and
//! every list is emitted in canonical order, so identical inputs give
//! byte-identical output.

use serde::Serialize;

use crate::classify::Classification;
use crate::io::condition::format_condition;
use crate::net::{Marking, PetriNet, SubMarking};
use crate::reach::ReachGraph;
use crate::synth::{Method, Synthesized, SynthesisOptions, SynthesisResult};
use crate::verify::{Decision, VerificationReport};

#[derive(Debug, Serialize)]
pub struct Report {
    pub net: NetSummary,
    pub graph: GraphSummary,
    pub classification: ClassificationSummary,
    pub synthesis: SynthesisSummary,
    pub verification: VerificationSummary,
}

#[derive(Debug, Serialize)]
pub struct NetSummary {
    pub name: String,
    pub places: Vec<String>,
    pub transitions: Vec<TransitionSummary>,
    pub initial: String,
}

#[derive(Debug, Serialize)]
pub struct TransitionSummary {
    pub name: String,
    pub controllable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub states: usize,
    pub edges: usize,
    pub deadlocks: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassificationSummary {
    pub admissible: Vec<String>,
    pub forbidden: Vec<String>,
    pub border: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SynthesisSummary {
    pub method: &'static str,
    pub exact_cover: bool,
    pub transitions: Vec<TransitionReport>,
}

#[derive(Debug, Serialize)]
pub struct TransitionReport {
    pub transition: String,
    pub critical: Vec<String>,
    pub sound: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disable: Option<FormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enable: Option<FormReport>,
    /// Final condition, absent when the transition needs no control.
    pub condition: Option<String>,
    pub statistics: StatisticsReport,
}

#[derive(Debug, Serialize)]
pub struct FormReport {
    pub sets: SetsReport,
    pub condition: String,
    pub exact_cover_applied: bool,
}

/// C1..C4 for the disable form, S1..S4 for the enable form.
#[derive(Debug, Serialize)]
pub struct SetsReport {
    pub candidates: Vec<String>,
    pub separating: Vec<String>,
    pub minimal: Vec<String>,
    pub selected: Vec<String>,
    pub uncoverable: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct StatisticsReport {
    pub critical: usize,
    pub sound: usize,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
}

#[derive(Debug, Serialize)]
pub struct VerificationSummary {
    pub verdict: &'static str,
    pub controlled_states: usize,
    pub expected_states: usize,
    pub admissible_states: usize,
    pub unexpected: Vec<String>,
    pub missing: Vec<String>,
    pub divergences: Vec<DivergenceReport>,
    pub induced_blocking: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploration_error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DivergenceReport {
    pub state: String,
    pub transition: String,
    pub controller: &'static str,
    pub oracle: &'static str,
}

fn markings(net: &PetriNet, ms: &[Marking]) -> Vec<String> {
    ms.iter().map(|m| net.format_marking(m)).collect()
}

fn subs(net: &PetriNet, ss: &[SubMarking]) -> Vec<String> {
    ss.iter().map(|s| net.format_sub_marking(s)).collect()
}

fn nodes(net: &PetriNet, g: &ReachGraph, ns: &[usize]) -> Vec<String> {
    ns.iter().map(|&n| net.format_marking(g.node(n))).collect()
}

fn decision(d: Decision) -> &'static str {
    match d {
        Decision::Allow => "allow",
        Decision::Block => "block",
    }
}

pub fn net_summary(net: &PetriNet) -> NetSummary {
    NetSummary {
        name: net.name().to_string(),
        places: net.places().iter().map(|p| p.name.clone()).collect(),
        transitions: net
            .transitions()
            .iter()
            .map(|t| TransitionSummary {
                name: t.name.clone(),
                controllable: t.controllable,
                event: t.event.clone(),
            })
            .collect(),
        initial: net.format_marking(&net.initial_marking()),
    }
}

pub fn graph_summary(net: &PetriNet, g: &ReachGraph) -> GraphSummary {
    GraphSummary {
        states: g.len(),
        edges: g.edges().len(),
        deadlocks: nodes(net, g, &g.deadlock_nodes()),
    }
}

pub fn classification_summary(net: &PetriNet, g: &ReachGraph, cls: &Classification) -> ClassificationSummary {
    ClassificationSummary {
        admissible: nodes(net, g, &cls.admissible()),
        forbidden: nodes(net, g, &cls.forbidden()),
        border: nodes(net, g, &cls.border()),
    }
}

fn form_report(net: &PetriNet, s: &Synthesized) -> FormReport {
    FormReport {
        sets: SetsReport {
            candidates: subs(net, &s.sets.c1),
            separating: subs(net, &s.sets.c2),
            minimal: subs(net, &s.sets.c3),
            selected: subs(net, &s.sets.c4),
            uncoverable: markings(net, &s.sets.uncoverable),
        },
        condition: format_condition(net, &s.condition),
        exact_cover_applied: s.exact_cover_applied,
    }
}

pub fn synthesis_summary(net: &PetriNet, options: &SynthesisOptions, result: &SynthesisResult) -> SynthesisSummary {
    SynthesisSummary {
        method: match options.method {
            Method::Disable => "disable",
            Method::Enable => "enable",
            Method::Both => "both",
        },
        exact_cover: options.exact_cover,
        transitions: result
            .transitions
            .iter()
            .map(|ts| {
                let st = ts.statistics();
                TransitionReport {
                    transition: net.transition_name(ts.transition).to_string(),
                    critical: markings(net, &ts.criticals),
                    sound: markings(net, &ts.sounds),
                    disable: ts.primal.as_ref().map(|s| form_report(net, s)),
                    enable: ts.dual.as_ref().map(|s| form_report(net, s)),
                    condition: ts.condition().map(|c| format_condition(net, c)),
                    statistics: StatisticsReport {
                        critical: st.critical,
                        sound: st.sound,
                        c1: st.c1,
                        c2: st.c2,
                        c3: st.c3,
                        c4: st.c4,
                    },
                }
            })
            .collect(),
    }
}

pub fn verification_summary(net: &PetriNet, v: &VerificationReport) -> VerificationSummary {
    VerificationSummary {
        verdict: if v.pass { "PASS" } else { "FAIL" },
        controlled_states: v.controlled_states,
        expected_states: v.expected_states,
        admissible_states: v.admissible_states,
        unexpected: markings(net, &v.unexpected),
        missing: markings(net, &v.missing),
        divergences: v
            .divergences
            .iter()
            .map(|d| DivergenceReport {
                state: net.format_marking(&d.state),
                transition: net.transition_name(d.transition).to_string(),
                controller: decision(d.controller),
                oracle: decision(d.oracle),
            })
            .collect(),
        induced_blocking: markings(net, &v.induced_blocking),
        exploration_error: v.exploration_error.clone(),
    }
}

pub fn build_report(
    net: &PetriNet,
    graph: &ReachGraph,
    cls: &Classification,
    options: &SynthesisOptions,
    result: &SynthesisResult,
    verification: &VerificationReport,
) -> Report {
    Report {
        net: net_summary(net),
        graph: graph_summary(net, graph),
        classification: classification_summary(net, graph, cls),
        synthesis: synthesis_summary(net, options, result),
        verification: verification_summary(net, verification),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
