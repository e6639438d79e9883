//! Over-state simplification of the control conditions.
//!
//! For a controllable transition the critical states must be blocked and the
//! sound states must stay enabled. Every over-state of a critical state that
//! covers no sound state blocks that critical state without touching any
//! sound one; the pipeline keeps the minimal such over-states and picks a
//! small subset that still blocks every critical state. The dual form swaps
//! the two roles and describes where the transition may fire instead.

use std::collections::HashSet;

use thiserror::Error;

use crate::classify::{self, ClassifyError, Classification};
use crate::cover::{self, CoverError};
use crate::net::{Marking, NetError, PetriNet, SubMarking, DEFAULT_ENUMERATION_CAP};
use crate::reach::ReachGraph;
use crate::verify::{Controller, VerifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Controller(#[from] VerifyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    /// Fire unless some term matches.
    Disable,
    /// Fire only if some term matches.
    Enable,
}

impl Polarity {
    pub fn keyword(self) -> &'static str {
        match self {
            Polarity::Disable => "disable",
            Polarity::Enable => "enable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionForm {
    DisableWhenAnyCovers,
    EnableWhenAnyCovers,
    /// At least one term pins a full marking.
    DisableExactMarkings,
    EnableExactMarkings,
}

/// One disjunct of a condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `m(P) >= k` for every entry.
    AtLeast(SubMarking),
    /// `m = marking`, every place pinned.
    Exactly(Marking),
}

impl Term {
    pub fn matches(&self, m: &Marking) -> bool {
        match self {
            Term::AtLeast(s) => s.covers(m),
            Term::Exactly(e) => e == m,
        }
    }

    fn literals(&self) -> usize {
        match self {
            Term::AtLeast(s) => s.len(),
            Term::Exactly(e) => e.len(),
        }
    }

    fn threshold_sum(&self) -> u64 {
        match self {
            Term::AtLeast(s) => s.threshold_sum(),
            Term::Exactly(e) => e.counts().iter().map(|&k| u64::from(k)).sum(),
        }
    }
}

/// Control predicate attached to one controllable transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionCondition {
    pub transition: usize,
    pub polarity: Polarity,
    /// Threshold terms first, then exact ones, each group in canonical order.
    pub terms: Vec<Term>,
}

impl TransitionCondition {
    pub fn new(transition: usize, polarity: Polarity, mut terms: Vec<Term>) -> Self {
        terms.sort();
        terms.dedup();
        Self {
            transition,
            polarity,
            terms,
        }
    }

    pub fn form(&self) -> ConditionForm {
        let exact = self.terms.iter().any(|t| matches!(t, Term::Exactly(_)));
        match (self.polarity, exact) {
            (Polarity::Disable, false) => ConditionForm::DisableWhenAnyCovers,
            (Polarity::Disable, true) => ConditionForm::DisableExactMarkings,
            (Polarity::Enable, false) => ConditionForm::EnableWhenAnyCovers,
            (Polarity::Enable, true) => ConditionForm::EnableExactMarkings,
        }
    }

    pub fn any_matches(&self, m: &Marking) -> bool {
        self.terms.iter().any(|t| t.matches(m))
    }

    /// Whether the controller lets the transition fire at `m`.
    pub fn allows(&self, m: &Marking) -> bool {
        match self.polarity {
            Polarity::Disable => !self.any_matches(m),
            Polarity::Enable => self.any_matches(m),
        }
    }

    /// (terms, literals, threshold sum); smaller is simpler.
    pub fn complexity(&self) -> (usize, usize, u64) {
        (
            self.terms.len(),
            self.terms.iter().map(Term::literals).sum(),
            self.terms.iter().map(Term::threshold_sum).sum(),
        )
    }

    pub fn sub_markings(&self) -> impl Iterator<Item = &SubMarking> {
        self.terms.iter().filter_map(|t| match t {
            Term::AtLeast(s) => Some(s),
            Term::Exactly(_) => None,
        })
    }
}

/// Intermediate sets of one pipeline run. For the dual form these are the
/// S1..S4 sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSets {
    /// All non-empty over-states of the target states.
    pub c1: Vec<SubMarking>,
    /// Members of `c1` covering none of the states to keep apart.
    pub c2: Vec<SubMarking>,
    /// Minimal elements of `c2`.
    pub c3: Vec<SubMarking>,
    /// Selected cover.
    pub c4: Vec<SubMarking>,
    /// Targets no member of `c2` covers; they get exact terms.
    pub uncoverable: Vec<Marking>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Disable,
    Enable,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub method: Method,
    pub exact_cover: bool,
    pub enumeration_cap: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            method: Method::Both,
            exact_cover: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// One simplified condition together with the sets that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synthesized {
    pub sets: CandidateSets,
    pub condition: TransitionCondition,
    /// False when exact cover was requested but the greedy path ran.
    pub exact_cover_applied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Statistics {
    pub critical: usize,
    pub sound: usize,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSynthesis {
    pub transition: usize,
    pub criticals: Vec<Marking>,
    pub sounds: Vec<Marking>,
    pub primal: Option<Synthesized>,
    pub dual: Option<Synthesized>,
    /// None when the transition needs no control.
    pub chosen: Option<Polarity>,
}

impl TransitionSynthesis {
    pub fn condition(&self) -> Option<&TransitionCondition> {
        match self.chosen? {
            Polarity::Disable => self.primal.as_ref().map(|s| &s.condition),
            Polarity::Enable => self.dual.as_ref().map(|s| &s.condition),
        }
    }

    /// Counts for the primal pipeline (the dual one when only it ran).
    pub fn statistics(&self) -> Statistics {
        let mut stats = Statistics {
            critical: self.criticals.len(),
            sound: self.sounds.len(),
            ..Statistics::default()
        };
        if let Some(s) = self.primal.as_ref().or(self.dual.as_ref()) {
            stats.c1 = s.sets.c1.len();
            stats.c2 = s.sets.c2.len();
            stats.c3 = s.sets.c3.len();
            stats.c4 = s.sets.c4.len();
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    /// One entry per controllable transition, in net order.
    pub transitions: Vec<TransitionSynthesis>,
}

impl SynthesisResult {
    pub fn get(&self, t: usize) -> Option<&TransitionSynthesis> {
        self.transitions.iter().find(|s| s.transition == t)
    }

    pub fn conditions(&self) -> impl Iterator<Item = &TransitionCondition> {
        self.transitions.iter().filter_map(|s| s.condition())
    }

    pub fn controller(&self, net: &PetriNet) -> Result<Controller, SynthError> {
        Ok(Controller::new(net, self.conditions().cloned())?)
    }
}

/// Unsimplified disable condition: one full-support term per critical state.
pub fn raw_condition(transition: usize, criticals: &[Marking]) -> TransitionCondition {
    TransitionCondition::new(
        transition,
        Polarity::Disable,
        criticals.iter().map(|m| Term::AtLeast(m.support())).collect(),
    )
}

/// C1..C3 for `targets` against the states in `keep_apart`. `c4` is left
/// empty. Sound coverage is tested directly against `keep_apart`; the
/// over-state closure of that set is never built.
pub fn candidate_pipeline(
    targets: &[Marking],
    keep_apart: &[Marking],
    cap: usize,
) -> Result<CandidateSets, SynthError> {
    let mut seen = HashSet::new();
    for m in targets {
        for s in m.support().sub_markings(cap)? {
            seen.insert(s);
        }
    }
    let mut c1: Vec<SubMarking> = seen.into_iter().collect();
    c1.sort();

    let c2: Vec<SubMarking> = c1
        .iter()
        .filter(|s| !keep_apart.iter().any(|m| s.covers(m)))
        .cloned()
        .collect();

    // c1 is closed under lowering a threshold and c2 is upward closed inside
    // c1, so an element is minimal in c2 iff none of its immediate
    // predecessors is in c2.
    let c2_set: HashSet<&SubMarking> = c2.iter().collect();
    let c3: Vec<SubMarking> = c2
        .iter()
        .filter(|s| s.lowered().all(|p| !c2_set.contains(&p)))
        .cloned()
        .collect();

    let uncoverable = targets
        .iter()
        .filter(|m| !c3.iter().any(|s| s.covers(m)))
        .cloned()
        .collect();

    Ok(CandidateSets {
        c1,
        c2,
        c3,
        c4: Vec::new(),
        uncoverable,
    })
}

fn simplify(
    transition: usize,
    polarity: Polarity,
    targets: &[Marking],
    keep_apart: &[Marking],
    options: &SynthesisOptions,
) -> Result<Synthesized, SynthError> {
    let mut sets = candidate_pipeline(targets, keep_apart, options.enumeration_cap)?;
    let coverable: Vec<Marking> = targets
        .iter()
        .filter(|m| !sets.uncoverable.contains(m))
        .cloned()
        .collect();
    let mut exact_cover_applied = false;
    if !coverable.is_empty() {
        sets.c4 = if options.exact_cover {
            let (rows, ran) = cover::select_cover_exact(&sets.c3, &coverable)?;
            exact_cover_applied = ran;
            rows
        } else {
            cover::select_cover(&sets.c3, &coverable)?
        };
    }
    let terms = sets
        .c4
        .iter()
        .cloned()
        .map(Term::AtLeast)
        .chain(sets.uncoverable.iter().cloned().map(Term::Exactly))
        .collect();
    Ok(Synthesized {
        sets,
        condition: TransitionCondition::new(transition, polarity, terms),
        exact_cover_applied,
    })
}

/// Simplified disable-form condition. Critical states that no threshold
/// term can separate from the sound states are blocked by exact equality.
pub fn synthesize_disable(
    transition: usize,
    criticals: &[Marking],
    sounds: &[Marking],
    options: &SynthesisOptions,
) -> Result<Synthesized, SynthError> {
    simplify(transition, Polarity::Disable, criticals, sounds, options)
}

/// Dual enable-form condition. With no sound state it has no terms and
/// never allows the transition.
pub fn synthesize_enable(
    transition: usize,
    criticals: &[Marking],
    sounds: &[Marking],
    options: &SynthesisOptions,
) -> Result<Synthesized, SynthError> {
    simplify(transition, Polarity::Enable, sounds, criticals, options)
}

/// Runs the whole pipeline for every controllable transition.
pub fn synthesize_all(
    net: &PetriNet,
    graph: &ReachGraph,
    cls: &Classification,
    options: &SynthesisOptions,
) -> Result<SynthesisResult, SynthError> {
    let mut transitions = Vec::new();
    for t in net.controllable() {
        let criticals = classify::critical_set(graph, cls, net, t)?;
        let sounds = classify::sound_set(graph, cls, net, t)?;
        let mut entry = TransitionSynthesis {
            transition: t,
            criticals,
            sounds,
            primal: None,
            dual: None,
            chosen: None,
        };
        if !entry.criticals.is_empty() {
            if options.method != Method::Enable {
                entry.primal = Some(synthesize_disable(t, &entry.criticals, &entry.sounds, options)?);
            }
            if options.method != Method::Disable {
                entry.dual = Some(synthesize_enable(t, &entry.criticals, &entry.sounds, options)?);
            }
            entry.chosen = choose(entry.primal.as_ref(), entry.dual.as_ref());
        }
        transitions.push(entry);
    }
    Ok(SynthesisResult { transitions })
}

/// Simpler of the two by (terms, literals), disable-form on ties.
/// Threshold sums are not compared: `m(P4)>=2` and `m(P3)>=1` count as
/// equally simple.
fn choose(primal: Option<&Synthesized>, dual: Option<&Synthesized>) -> Option<Polarity> {
    let shape = |s: &Synthesized| {
        let (terms, literals, _) = s.condition.complexity();
        (terms, literals)
    };
    match (primal, dual) {
        (Some(p), Some(d)) => {
            if shape(d) < shape(p) {
                Some(Polarity::Enable)
            } else {
                Some(Polarity::Disable)
            }
        }
        (Some(_), None) => Some(Polarity::Disable),
        (None, Some(_)) => Some(Polarity::Enable),
        (None, None) => None,
    }
}
