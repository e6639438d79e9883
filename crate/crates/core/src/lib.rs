//! Supervisory control of Petri nets by forbidden-state avoidance.
//!
//! The pipeline is: build the reachability graph ([`reach`]), label the
//! admissible, forbidden and border states ([`classify`]), derive a compact
//! enabling or disabling condition for every controllable transition
//! ([`synth`], [`cover`]) and check the resulting controller ([`verify`]).

pub mod classify;
pub mod cover;
pub mod fixtures;
pub mod io;
pub mod net;
pub mod reach;
pub mod synth;
pub mod verify;

pub use classify::{forbidden_closure, Classification, ClassifyError, ForbiddenSpec, Label};
pub use net::{Marking, NetBuilder, NetError, PetriNet, SubMarking};
pub use reach::{build_reach_graph, ExplorationLimits, ReachError, ReachGraph};
pub use synth::{synthesize_all, Method, SynthError, SynthesisOptions, SynthesisResult, TransitionCondition};
pub use verify::{check_maximal_permissive, Controller, VerificationReport};
