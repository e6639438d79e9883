//! Line-oriented net description format.
//!
//! ```text
//! net <name>
//! place <P> init=<n>
//! trans <t> ctrl|unctrl [event=<e>]
//! arc <P> -> <t> [weight=<n>]
//! arc <t> -> <P> [weight=<n>]
//! forbid clause: m(P2)>=1 & m(P3)<=0
//! forbid marking: P2 P4^2 P5
//! forbid deadlock
//! ```
//!
//! `#` starts a comment. Declarations may appear in any order; arcs and
//! forbid directives are resolved once the whole file is read.

use std::fmt::Write as _;

use thiserror::Error;

use crate::classify::{Atom, Clause, Comparison, ForbiddenSpec};
use crate::net::{Marking, NetBuilder, NetError, PetriNet, SubMarking};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetFileError {
    #[error("{line}:{column}: parse error: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },
}

impl NetFileError {
    fn parse(pos: Pos, message: impl Into<String>) -> Self {
        NetFileError::Parse {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        NetFileError::Semantic {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    pos: Pos {
                        line: line_no,
                        column: s + 1,
                    },
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            pos: Pos {
                line: line_no,
                column: s + 1,
            },
        });
    }
    out
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
        && !s.chars().all(|c| c.is_ascii_digit())
}

fn name_token<'a>(tok: Option<&Token<'a>>, what: &str, after: Pos) -> Result<Token<'a>, NetFileError> {
    let tok = tok.ok_or_else(|| NetFileError::parse(after, format!("expected {what} name")))?;
    if !is_name(tok.text) {
        return Err(NetFileError::parse(tok.pos, format!("invalid {what} name `{}`", tok.text)));
    }
    Ok(*tok)
}

/// `key=<non-negative integer>`; negative values are a semantic error.
fn keyed_number(tok: &Token<'_>, key: &str) -> Result<u32, NetFileError> {
    let value = tok
        .text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| NetFileError::parse(tok.pos, format!("expected `{key}=<n>`, found `{}`", tok.text)))?;
    let vpos = Pos {
        line: tok.pos.line,
        column: tok.pos.column + key.len() + 1,
    };
    if let Some(digits) = value.strip_prefix('-') {
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(NetFileError::semantic(vpos, format!("negative {key} `{value}`")));
        }
    }
    value
        .parse::<u32>()
        .map_err(|_| NetFileError::parse(vpos, format!("invalid {key} `{value}`")))
}

enum ForbidItem {
    Clause(String, Pos),
    Marking(String, Pos),
}

struct ArcDecl {
    from: String,
    from_pos: Pos,
    to: String,
    to_pos: Pos,
    weight: u32,
    pos: Pos,
}

/// Parses a net file into a net and its forbidden-state description.
pub fn parse_net(text: &str) -> Result<(PetriNet, ForbiddenSpec), NetFileError> {
    let mut name: Option<String> = None;
    let mut builder = NetBuilder::default();
    let mut arcs = Vec::new();
    let mut forbids = Vec::new();
    let mut forbid_deadlocks = false;
    let mut last_line = 1;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line, line_no);
        let Some(head) = toks.first() else { continue };
        let end = Pos {
            line: line_no,
            column: line.trim_end().len() + 1,
        };
        let trailing = |n: usize| -> Result<(), NetFileError> {
            match toks.get(n) {
                Some(t) => Err(NetFileError::parse(t.pos, format!("unexpected `{}`", t.text))),
                None => Ok(()),
            }
        };
        match head.text {
            "net" => {
                let tok = toks.get(1).ok_or_else(|| NetFileError::parse(end, "expected net name"))?;
                if name.is_some() {
                    return Err(NetFileError::semantic(head.pos, "duplicate `net` line"));
                }
                name = Some(tok.text.to_string());
                trailing(2)?;
            }
            "place" => {
                let tok = name_token(toks.get(1), "place", end)?;
                if builder.has_place(tok.text).is_some() {
                    return Err(NetFileError::semantic(tok.pos, format!("duplicate place `{}`", tok.text)));
                }
                let init = match toks.get(2) {
                    Some(t) => keyed_number(t, "init")?,
                    None => 0,
                };
                trailing(3)?;
                builder.add_place(tok.text, init);
            }
            "trans" => {
                let tok = name_token(toks.get(1), "transition", end)?;
                if builder.has_transition(tok.text).is_some() {
                    return Err(NetFileError::semantic(
                        tok.pos,
                        format!("duplicate transition `{}`", tok.text),
                    ));
                }
                let kind = toks
                    .get(2)
                    .ok_or_else(|| NetFileError::parse(end, "expected `ctrl` or `unctrl`"))?;
                let controllable = match kind.text {
                    "ctrl" => true,
                    "unctrl" => false,
                    other => {
                        return Err(NetFileError::parse(
                            kind.pos,
                            format!("expected `ctrl` or `unctrl`, found `{other}`"),
                        ))
                    }
                };
                let event = match toks.get(3) {
                    Some(t) => match t.text.strip_prefix("event=") {
                        Some(e) if is_name(e) => Some(e.to_string()),
                        _ => return Err(NetFileError::parse(t.pos, format!("expected `event=<e>`, found `{}`", t.text))),
                    },
                    None => None,
                };
                trailing(4)?;
                builder.add_transition(tok.text, controllable, event);
            }
            "arc" => {
                let from = name_token(toks.get(1), "source", end)?;
                let arrow = toks.get(2).ok_or_else(|| NetFileError::parse(end, "expected `->`"))?;
                if arrow.text != "->" {
                    return Err(NetFileError::parse(arrow.pos, format!("expected `->`, found `{}`", arrow.text)));
                }
                let to = name_token(toks.get(3), "target", end)?;
                let weight = match toks.get(4) {
                    Some(t) => keyed_number(t, "weight")?,
                    None => 1,
                };
                if weight == 0 {
                    return Err(NetFileError::semantic(toks[4].pos, "arc weight must be at least 1"));
                }
                trailing(5)?;
                arcs.push(ArcDecl {
                    from: from.text.to_string(),
                    from_pos: from.pos,
                    to: to.text.to_string(),
                    to_pos: to.pos,
                    weight,
                    pos: head.pos,
                });
            }
            "forbid" => {
                let rest_start = toks.get(1).map(|t| t.pos.column - 1).unwrap_or(line.len());
                let rest = &line[rest_start..];
                let rest_pos = Pos {
                    line: line_no,
                    column: rest_start + 1,
                };
                if let Some(body) = rest.strip_prefix("clause:") {
                    let pos = Pos {
                        line: line_no,
                        column: rest_pos.column + "clause:".len(),
                    };
                    forbids.push(ForbidItem::Clause(body.to_string(), pos));
                } else if let Some(body) = rest.strip_prefix("marking:") {
                    let pos = Pos {
                        line: line_no,
                        column: rest_pos.column + "marking:".len(),
                    };
                    forbids.push(ForbidItem::Marking(body.to_string(), pos));
                } else if rest.trim_end() == "deadlock" {
                    forbid_deadlocks = true;
                } else {
                    return Err(NetFileError::parse(
                        rest_pos,
                        "expected `clause:`, `marking:` or `deadlock`",
                    ));
                }
            }
            other => {
                return Err(NetFileError::parse(head.pos, format!("unknown directive `{other}`")));
            }
        }
    }

    for arc in &arcs {
        let place_then_trans = (builder.has_place(&arc.from), builder.has_transition(&arc.to));
        let trans_then_place = (builder.has_transition(&arc.from), builder.has_place(&arc.to));
        let fresh = match (place_then_trans, trans_then_place) {
            ((Some(p), Some(t)), _) => builder.set_input(p, t, arc.weight),
            (_, (Some(t), Some(p))) => builder.set_output(t, p, arc.weight),
            _ => {
                let known = |n: &str| builder.has_place(n).is_some() || builder.has_transition(n).is_some();
                if !known(&arc.from) {
                    return Err(NetFileError::semantic(
                        arc.from_pos,
                        format!("unknown place or transition `{}`", arc.from),
                    ));
                }
                if !known(&arc.to) {
                    return Err(NetFileError::semantic(
                        arc.to_pos,
                        format!("unknown place or transition `{}`", arc.to),
                    ));
                }
                return Err(NetFileError::semantic(
                    arc.pos,
                    format!("arc `{}` -> `{}` must join a place and a transition", arc.from, arc.to),
                ));
            }
        };
        if !fresh {
            return Err(NetFileError::semantic(
                arc.pos,
                format!("duplicate arc `{}` -> `{}`", arc.from, arc.to),
            ));
        }
    }

    let net = builder
        .named(name.unwrap_or_else(|| "net".to_string()))
        .build()
        .map_err(|e| {
            let pos = Pos {
                line: last_line,
                column: 1,
            };
            match e {
                NetError::Empty => NetFileError::semantic(pos, "a net needs at least one place and one transition"),
                other => NetFileError::semantic(pos, other.to_string()),
            }
        })?;

    let mut spec = ForbiddenSpec {
        forbid_deadlocks,
        ..ForbiddenSpec::default()
    };
    for item in forbids {
        match item {
            ForbidItem::Clause(body, pos) => spec.clauses.push(parse_clause(&net, &body, pos)?),
            ForbidItem::Marking(body, pos) => {
                let m = parse_powered_support(&net, &body)
                    .map_err(|(col, msg)| NetFileError::semantic(offset(pos, col), msg))?;
                spec.explicit.push(m);
            }
        }
    }
    Ok((net, spec))
}

fn offset(pos: Pos, col: usize) -> Pos {
    Pos {
        line: pos.line,
        column: pos.column + col,
    }
}

fn parse_clause(net: &PetriNet, body: &str, pos: Pos) -> Result<Clause, NetFileError> {
    let mut atoms = Vec::new();
    let mut col = 0;
    for part in body.split('&') {
        let lead = part.len() - part.trim_start().len();
        let at = offset(pos, col + lead);
        let text: String = part.chars().filter(|c| !c.is_whitespace()).collect();
        col += part.len() + 1;
        if text.is_empty() {
            return Err(NetFileError::parse(at, "empty comparison"));
        }
        let inner = text
            .strip_prefix("m(")
            .ok_or_else(|| NetFileError::parse(at, format!("expected `m(<place>)`, found `{text}`")))?;
        let close = inner
            .find(')')
            .ok_or_else(|| NetFileError::parse(at, "missing `)`"))?;
        let place = &inner[..close];
        let rest = &inner[close + 1..];
        let (op, value) = if let Some(v) = rest.strip_prefix(">=") {
            (Comparison::AtLeast, v)
        } else if let Some(v) = rest.strip_prefix("<=") {
            (Comparison::AtMost, v)
        } else if let Some(v) = rest.strip_prefix('=') {
            (Comparison::Equal, v)
        } else {
            return Err(NetFileError::parse(at, format!("expected `>=`, `<=` or `=` in `{text}`")));
        };
        if value.starts_with('-') {
            return Err(NetFileError::semantic(at, format!("negative threshold in `{text}`")));
        }
        let value: u32 = value
            .parse()
            .map_err(|_| NetFileError::parse(at, format!("invalid threshold in `{text}`")))?;
        let p = net
            .place_index(place)
            .ok_or_else(|| NetFileError::semantic(at, format!("unknown place `{place}`")))?;
        atoms.push(Atom::new(p, op, value));
    }
    Ok(Clause(atoms))
}

/// Parses powered-support notation (`P1P4^2P5`, `P1 P4^2 P5`, `P3P3`)
/// into a full marking. `0` is the empty marking. Errors carry the column
/// offset inside `text`.
pub fn parse_powered_support(net: &PetriNet, text: &str) -> Result<Marking, (usize, String)> {
    let mut counts = vec![0u32; net.num_places()];
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(Marking::new(counts));
    }
    if trimmed.is_empty() {
        return Err((0, "expected a marking".to_string()));
    }
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let best = (0..net.num_places())
            .filter(|&p| rest.starts_with(net.place_name(p)))
            .max_by_key(|&p| net.place_name(p).len())
            .ok_or_else(|| (i, format!("unknown place at `{}`", rest.split_whitespace().next().unwrap_or(rest))))?;
        i += net.place_name(best).len();
        let mut k = 1;
        if text[i..].starts_with('^') {
            let digits: String = text[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
            k = digits
                .parse::<u32>()
                .map_err(|_| (i, "expected a token count after `^`".to_string()))?;
            i += 1 + digits.len();
        }
        counts[best] += k;
    }
    Ok(Marking::new(counts))
}

/// Same notation as [`parse_powered_support`], read as a sub-marking.
pub fn parse_sub_marking(net: &PetriNet, text: &str) -> Result<SubMarking, (usize, String)> {
    parse_powered_support(net, text).map(|m| m.support())
}

/// Canonical text form; `parse_net` of the output gives back the same net.
pub fn serialize_net(net: &PetriNet, spec: &ForbiddenSpec) -> String {
    let mut out = String::new();
    writeln!(out, "net {}", net.name()).unwrap();
    out.push('\n');
    for p in net.places() {
        writeln!(out, "place {} init={}", p.name, p.initial).unwrap();
    }
    out.push('\n');
    for t in net.transitions() {
        let kind = if t.controllable { "ctrl" } else { "unctrl" };
        match &t.event {
            Some(e) => writeln!(out, "trans {} {kind} event={e}", t.name).unwrap(),
            None => writeln!(out, "trans {} {kind}", t.name).unwrap(),
        }
    }
    out.push('\n');
    let weight = |w: u32| if w == 1 { String::new() } else { format!(" weight={w}") };
    for t in 0..net.num_transitions() {
        for p in 0..net.num_places() {
            let w = net.pre(p, t);
            if w > 0 {
                writeln!(out, "arc {} -> {}{}", net.place_name(p), net.transition_name(t), weight(w)).unwrap();
            }
        }
        for p in 0..net.num_places() {
            let w = net.post(t, p);
            if w > 0 {
                writeln!(out, "arc {} -> {}{}", net.transition_name(t), net.place_name(p), weight(w)).unwrap();
            }
        }
    }
    if !spec.is_empty() {
        out.push('\n');
    }
    for clause in &spec.clauses {
        let atoms: Vec<String> = clause
            .0
            .iter()
            .map(|a| format!("m({}){}{}", net.place_name(a.place), a.op.symbol(), a.value))
            .collect();
        writeln!(out, "forbid clause: {}", atoms.join(" & ")).unwrap();
    }
    for m in &spec.explicit {
        writeln!(out, "forbid marking: {}", spaced_support(net, m)).unwrap();
    }
    if spec.forbid_deadlocks {
        writeln!(out, "forbid deadlock").unwrap();
    }
    out
}

fn spaced_support(net: &PetriNet, m: &Marking) -> String {
    let s = m.support();
    if s.is_empty() {
        return "0".to_string();
    }
    s.iter()
        .map(|(p, k)| {
            if k == 1 {
                net.place_name(p).to_string()
            } else {
                format!("{}^{k}", net.place_name(p))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
