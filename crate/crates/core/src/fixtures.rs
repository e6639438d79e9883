//! Reference nets bundled with the crate.

use crate::classify::ForbiddenSpec;
use crate::io::netfile::{self, parse_net};
use crate::net::{Marking, PetriNet, SubMarking};

/// Two machines sharing a one-slot buffer.
pub const TWO_MACHINES_CAP1: &str = include_str!("../fixtures/two-machines-cap1.pn");
/// Two machines sharing a two-slot buffer.
pub const TWO_MACHINES_CAP2: &str = include_str!("../fixtures/two-machines-cap2.pn");
/// A controllable transition whose sound states dominate its critical state.
pub const DOMINATED_SOUND: &str = include_str!("../fixtures/dominated-sound.pn");
/// A net with an unbounded place.
pub const UNBOUNDED: &str = include_str!("../fixtures/unbounded.pn");

fn load(text: &str) -> (PetriNet, ForbiddenSpec) {
    parse_net(text).expect("bundled fixture parses")
}

pub fn two_machines_cap1() -> (PetriNet, ForbiddenSpec) {
    load(TWO_MACHINES_CAP1)
}

pub fn two_machines_cap2() -> (PetriNet, ForbiddenSpec) {
    load(TWO_MACHINES_CAP2)
}

pub fn dominated_sound() -> (PetriNet, ForbiddenSpec) {
    load(DOMINATED_SOUND)
}

pub fn unbounded() -> (PetriNet, ForbiddenSpec) {
    load(UNBOUNDED)
}

/// Parses a powered-support string such as `P1P4^2`. Panics on bad input.
pub fn parse_marking(net: &PetriNet, text: &str) -> Marking {
    netfile::parse_powered_support(net, text)
        .unwrap_or_else(|(col, msg)| panic!("bad marking `{text}` at column {col}: {msg}"))
}

/// Parses a sub-marking string such as `P1P4^2`. Panics on bad input.
pub fn parse_sub_marking(net: &PetriNet, text: &str) -> SubMarking {
    netfile::parse_sub_marking(net, text)
        .unwrap_or_else(|(col, msg)| panic!("bad sub-marking `{text}` at column {col}: {msg}"))
}
