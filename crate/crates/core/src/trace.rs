//! Demonstration traces: timestamped hand/object samples plus contact events,
//! stored as JSON Lines with one frame per line.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Vec3};
use crate::ontology::{EnvironmentRegistry, HAND, THING, WOODEN_CUBE};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: malformed frame: {source}")]
    Malformed {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: unknown instance `{name}`")]
    UnknownInstance { line: usize, name: String },
    #[error("line {line}: `{name}` is not a {expected}")]
    WrongType {
        line: usize,
        name: String,
        expected: &'static str,
    },
    #[error("line {line}: timestamp {t} does not increase on {previous}")]
    NonMonotone { line: usize, t: f64, previous: f64 },
    #[error("line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("trace has {0} frames, at least 2 are required")]
    TooShort(usize),
    #[error("velocity needs a previous frame, index 0 has none")]
    NoPreviousFrame,
    #[error("frame index {index} out of range ({len} frames)")]
    OutOfRange { index: usize, len: usize },
    #[error("hand `{hand}` missing from frame {index}")]
    MissingHand { hand: String, index: usize },
    #[error("cannot read trace {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandSample {
    pub pos: Vec3,
    pub open: bool,
    /// Object enclosed by the closed fingers.
    pub held: Option<String>,
}

/// An unordered pair of instances, stored with the smaller name first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContactPair(String, String);

impl ContactPair {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            ContactPair(a, b)
        } else {
            ContactPair(b, a)
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0 == name || self.1 == name
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoFrame {
    pub t: f64,
    pub hands: BTreeMap<String, HandSample>,
    pub objects: BTreeMap<String, Vec3>,
    pub contacts: BTreeSet<ContactPair>,
}

impl DemoFrame {
    /// Position of a hand or object.
    pub fn position(&self, name: &str) -> Option<Vec3> {
        self.hands
            .get(name)
            .map(|h| h.pos)
            .or_else(|| self.objects.get(name).copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoTrace {
    pub frames: Vec<DemoFrame>,
    pub registry: EnvironmentRegistry,
    pub sample_rate_hz: f64,
}

impl DemoTrace {
    /// Validates frames against the registry and derives the sample rate.
    pub fn new(frames: Vec<DemoFrame>, registry: EnvironmentRegistry) -> Result<Self, TraceError> {
        let mut frames = frames;
        for (i, frame) in frames.iter_mut().enumerate() {
            let line = i + 1;
            frame.contacts = std::mem::take(&mut frame.contacts)
                .into_iter()
                .map(|ContactPair(a, b)| ContactPair::new(a, b))
                .collect();
            validate_frame(frame, &registry, line)?;
        }
        for i in 1..frames.len() {
            let (previous, t) = (frames[i - 1].t, frames[i].t);
            if t <= previous {
                return Err(TraceError::NonMonotone {
                    line: i + 1,
                    t,
                    previous,
                });
            }
        }
        if frames.len() < 2 {
            return Err(TraceError::TooShort(frames.len()));
        }
        let span = frames[frames.len() - 1].t - frames[0].t;
        let sample_rate_hz = (frames.len() - 1) as f64 / span;
        Ok(DemoTrace {
            frames,
            registry,
            sample_rate_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Serializes to JSON Lines, one frame per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for frame in &self.frames {
            out.push_str(&serde_json::to_string(frame).expect("frame serializes"));
            out.push('\n');
        }
        out
    }
}

fn validate_frame(
    frame: &DemoFrame,
    registry: &EnvironmentRegistry,
    line: usize,
) -> Result<(), TraceError> {
    let check = |name: &str, ty: &'static str| -> Result<(), TraceError> {
        if !registry.contains(name) {
            return Err(TraceError::UnknownInstance {
                line,
                name: name.to_string(),
            });
        }
        if !registry.is_instance_of(name, ty) {
            return Err(TraceError::WrongType {
                line,
                name: name.to_string(),
                expected: ty,
            });
        }
        Ok(())
    };
    let finite = |v: &Vec3| v.iter().all(|x| x.is_finite());

    if !frame.t.is_finite() {
        return Err(TraceError::NonFinite { line });
    }
    for (name, sample) in &frame.hands {
        check(name, HAND)?;
        if !finite(&sample.pos) {
            return Err(TraceError::NonFinite { line });
        }
        if let Some(held) = &sample.held {
            check(held, WOODEN_CUBE)?;
        }
    }
    for (name, pos) in &frame.objects {
        check(name, THING)?;
        if !finite(pos) {
            return Err(TraceError::NonFinite { line });
        }
    }
    for pair in &frame.contacts {
        check(pair.first(), THING)?;
        check(pair.second(), THING)?;
    }
    Ok(())
}

/// Parses JSON Lines text. Blank lines are skipped but still counted for
/// line numbers in errors.
pub fn parse_trace(text: &str, registry: &EnvironmentRegistry) -> Result<DemoTrace, TraceError> {
    let mut frames = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let frame: DemoFrame =
            serde_json::from_str(raw).map_err(|source| TraceError::Malformed {
                line: i + 1,
                source,
            })?;
        frames.push(frame);
        lines.push(i + 1);
    }
    DemoTrace::new(frames, registry.clone()).map_err(|e| remap_line(e, &lines))
}

// DemoTrace::new numbers frames from 1; translate back to file lines.
fn remap_line(err: TraceError, lines: &[usize]) -> TraceError {
    let fix = |line: usize| lines.get(line - 1).copied().unwrap_or(line);
    match err {
        TraceError::UnknownInstance { line, name } => TraceError::UnknownInstance {
            line: fix(line),
            name,
        },
        TraceError::WrongType {
            line,
            name,
            expected,
        } => TraceError::WrongType {
            line: fix(line),
            name,
            expected,
        },
        TraceError::NonMonotone { line, t, previous } => TraceError::NonMonotone {
            line: fix(line),
            t,
            previous,
        },
        TraceError::NonFinite { line } => TraceError::NonFinite { line: fix(line) },
        other => other,
    }
}

pub fn read_trace(
    path: impl AsRef<Path>,
    registry: &EnvironmentRegistry,
) -> Result<DemoTrace, TraceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_trace(&text, registry)
}

/// Backward finite difference of a hand's position at frame `index`.
pub fn hand_velocity(trace: &DemoTrace, hand: &str, index: usize) -> Result<Vec3, TraceError> {
    if index == 0 {
        return Err(TraceError::NoPreviousFrame);
    }
    if index >= trace.frames.len() {
        return Err(TraceError::OutOfRange {
            index,
            len: trace.frames.len(),
        });
    }
    let (prev, cur) = (&trace.frames[index - 1], &trace.frames[index]);
    let pos = |frame: &DemoFrame, i: usize| {
        frame
            .hands
            .get(hand)
            .map(|h| h.pos)
            .ok_or_else(|| TraceError::MissingHand {
                hand: hand.to_string(),
                index: i,
            })
    };
    let delta = geom::sub(pos(cur, index)?, pos(prev, index - 1)?);
    Ok(geom::scale(delta, 1.0 / (cur.t - prev.t)))
}
