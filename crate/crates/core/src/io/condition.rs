//! Text form of transition conditions.
//!
//! ```text
//! disable(t1) := (m(P4)>=2)
//! disable(t1) := (m(P4)>=1) | (m(P6)>=1)
//! disable(t1) := (m(P1)>=1 & m(P4)>=2)
//! disable_exact(t1) := [P1=1,P2=0,P3=0,P4=2,P5=1,P6=0]
//! enable(t1) := false
//! ```
//!
//! The `_exact` head is used whenever at least one term pins a full marking.

use thiserror::Error;

use crate::net::{Marking, PetriNet, SubMarking};
use crate::synth::{ConditionForm, Polarity, Term, TransitionCondition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ConditionParseError {
    pub line: usize,
    pub message: String,
}

pub fn format_condition(net: &PetriNet, cond: &TransitionCondition) -> String {
    let head = match cond.form() {
        ConditionForm::DisableWhenAnyCovers => "disable",
        ConditionForm::EnableWhenAnyCovers => "enable",
        ConditionForm::DisableExactMarkings => "disable_exact",
        ConditionForm::EnableExactMarkings => "enable_exact",
    };
    let body = if cond.terms.is_empty() {
        "false".to_string()
    } else {
        cond.terms
            .iter()
            .map(|t| format_term(net, t))
            .collect::<Vec<_>>()
            .join(" | ")
    };
    format!("{head}({}) := {body}", net.transition_name(cond.transition))
}

pub fn format_term(net: &PetriNet, term: &Term) -> String {
    match term {
        Term::AtLeast(s) => format_sub_marking_condition(net, s),
        Term::Exactly(m) => {
            let parts: Vec<String> = (0..net.num_places())
                .map(|p| format!("{}={}", net.place_name(p), m.get(p)))
                .collect();
            format!("[{}]", parts.join(","))
        }
    }
}

/// `(m(P1)>=1 & m(P4)>=2)`
pub fn format_sub_marking_condition(net: &PetriNet, s: &SubMarking) -> String {
    let atoms: Vec<String> = s
        .iter()
        .map(|(p, k)| format!("m({})>={k}", net.place_name(p)))
        .collect();
    format!("({})", atoms.join(" & "))
}

/// Parses one condition per non-empty line; `#` starts a comment.
pub fn parse_conditions(net: &PetriNet, text: &str) -> Result<Vec<TransitionCondition>, ConditionParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_condition(net, line).map_err(|message| ConditionParseError { line: i + 1, message })?);
    }
    Ok(out)
}

pub fn parse_condition(net: &PetriNet, line: &str) -> Result<TransitionCondition, String> {
    let (head, body) = line
        .split_once(":=")
        .ok_or_else(|| "expected `<head>(<transition>) := <terms>`".to_string())?;
    let head = head.trim();
    let open = head.find('(').ok_or("expected `(` after the condition keyword")?;
    let keyword = &head[..open];
    let name = head[open + 1..]
        .strip_suffix(')')
        .ok_or("expected `)` after the transition name")?
        .trim();
    let polarity = match keyword.trim() {
        "disable" | "disable_exact" => Polarity::Disable,
        "enable" | "enable_exact" => Polarity::Enable,
        other => return Err(format!("unknown condition keyword `{other}`")),
    };
    let transition = net
        .transition_index(name)
        .ok_or_else(|| format!("unknown transition `{name}`"))?;

    let body = body.trim();
    let mut terms = Vec::new();
    if body != "false" {
        for part in body.split('|') {
            terms.push(parse_term(net, part.trim())?);
        }
    }
    Ok(TransitionCondition::new(transition, polarity, terms))
}

fn parse_term(net: &PetriNet, text: &str) -> Result<Term, String> {
    if let Some(inner) = text.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let mut pairs = Vec::new();
        for atom in inner.split('&') {
            let atom: String = atom.chars().filter(|c| !c.is_whitespace()).collect();
            let (lhs, k) = atom
                .split_once(">=")
                .ok_or_else(|| format!("expected `m(<place>)>=<k>`, found `{atom}`"))?;
            let place = lhs
                .strip_prefix("m(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| format!("expected `m(<place>)`, found `{lhs}`"))?;
            let p = net.place_index(place).ok_or_else(|| format!("unknown place `{place}`"))?;
            let k: u32 = k.parse().map_err(|_| format!("invalid threshold `{k}`"))?;
            if k == 0 {
                return Err(format!("threshold for `{place}` must be at least 1"));
            }
            pairs.push((p, k));
        }
        return Ok(Term::AtLeast(SubMarking::from_pairs(pairs)));
    }
    if let Some(inner) = text.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let mut counts = vec![None; net.num_places()];
        for item in inner.split(',') {
            let (place, k) = item
                .trim()
                .split_once('=')
                .ok_or_else(|| format!("expected `<place>=<n>`, found `{item}`"))?;
            let p = net
                .place_index(place.trim())
                .ok_or_else(|| format!("unknown place `{}`", place.trim()))?;
            let k: u32 = k.trim().parse().map_err(|_| format!("invalid count `{k}`"))?;
            counts[p] = Some(k);
        }
        let counts: Option<Vec<u32>> = counts.into_iter().collect();
        let counts = counts.ok_or("an exact term must give every place")?;
        return Ok(Term::Exactly(Marking::new(counts)));
    }
    Err(format!("expected `( ... )` or `[ ... ]`, found `{text}`"))
}
