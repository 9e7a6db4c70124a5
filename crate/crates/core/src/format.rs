//! JSON schedule files.
//!
//! `{"length": 3, "variant": "plain", "steps": [{"moves": [{"op": "pebble", "i": 1}], "ghosts": []}, ...]}`
//! Indices are 1-based; site 0 never appears.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pebble::{Move, MoveKind, Schedule, TimeStep, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub reason: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        let reason = e.to_string();
        // serde_json appends its own " at line X column Y"
        let reason = match reason.rfind(" at line ") {
            Some(pos) => reason[..pos].to_string(),
            None => reason,
        };
        ParseError { line: e.line(), column: e.column(), reason }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Op {
    Pebble,
    Unpebble,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMove {
    op: Op,
    i: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFields {
    moves: Vec<RawMove>,
    #[serde(default)]
    ghosts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(try_from = "StepFields")]
struct RawStep {
    moves: Vec<RawMove>,
    ghosts: Vec<usize>,
}

impl TryFrom<StepFields> for RawStep {
    type Error = String;

    fn try_from(f: StepFields) -> Result<Self, String> {
        let mut seen = std::collections::BTreeSet::new();
        for m in &f.moves {
            if m.i == 0 {
                return Err("move index 0 (site 0 is implicit)".into());
            }
            if !seen.insert(m.i) {
                return Err(format!("duplicate move index {}", m.i));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &g in &f.ghosts {
            if g == 0 {
                return Err("ghost index 0 (site 0 is implicit)".into());
            }
            if !seen.insert(g) {
                return Err(format!("duplicate ghost index {g}"));
            }
        }
        Ok(RawStep { moves: f.moves, ghosts: f.ghosts })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(try_from = "usize")]
struct Length(usize);

impl TryFrom<usize> for Length {
    type Error = String;

    fn try_from(v: usize) -> Result<Self, String> {
        if v == 0 {
            Err("length must be at least 1".into())
        } else {
            Ok(Length(v))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    length: Length,
    variant: Variant,
    steps: Vec<RawStep>,
}

fn check_ranges(raw: RawSchedule) -> Result<Schedule, String> {
    let len = raw.length.0;
    let mut steps = Vec::with_capacity(raw.steps.len());
    for (t, rs) in raw.steps.into_iter().enumerate() {
        if let Some(i) = rs.moves.iter().map(|m| m.i).chain(rs.ghosts.iter().copied()).find(|&i| i > len) {
            return Err(format!("step {t}: index {i} outside [1, {len}]"));
        }
        let moves = rs
            .moves
            .into_iter()
            .map(|m| Move {
                kind: match m.op {
                    Op::Pebble => MoveKind::Pebble,
                    Op::Unpebble => MoveKind::Unpebble,
                },
                index: m.i,
            })
            .collect();
        steps.push(TimeStep { moves, ghosts: rs.ghosts });
    }
    Ok(Schedule { length: len, variant: raw.variant, steps })
}

fn to_raw(s: &Schedule) -> RawSchedule {
    RawSchedule {
        length: Length(s.length),
        variant: s.variant,
        steps: s
            .steps
            .iter()
            .map(|st| RawStep {
                moves: st
                    .moves
                    .iter()
                    .map(|m| RawMove {
                        op: match m.kind {
                            MoveKind::Unpebble => Op::Unpebble,
                            _ => Op::Pebble,
                        },
                        i: m.index,
                    })
                    .collect(),
                ghosts: st.ghosts.clone(),
            })
            .collect(),
    }
}

/// Compact single-line JSON.
pub fn serialize(s: &Schedule) -> String {
    serde_json::to_string(&to_raw(s)).expect("schedule serializes")
}

/// One step per line; still valid for [`parse`].
pub fn serialize_pretty(s: &Schedule) -> String {
    let raw = to_raw(s);
    let mut out = format!("{{\"length\": {}, \"variant\": \"{}\", \"steps\": [", raw.length.0, raw.variant);
    for (t, st) in raw.steps.iter().enumerate() {
        out.push_str(if t == 0 { "\n  " } else { ",\n  " });
        out.push_str(&serde_json::to_string(st).expect("step serializes"));
    }
    out.push_str(if raw.steps.is_empty() { "]}\n" } else { "\n]}\n" });
    out
}

pub fn parse(text: &str) -> Result<Schedule, ParseError> {
    let raw: RawSchedule = serde_json::from_str(text)?;
    check_ranges(raw).map_err(|reason| {
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count());
        ParseError { line, column, reason }
    })
}
