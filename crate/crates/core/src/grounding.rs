//! Continuous frames to symbolic states.
//!
//! Hand variables are multi-valued here (`inHand(hand) = cube`); they are
//! binarized into predicates only when operators are extracted.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Vec3};
use crate::trace::{hand_velocity, ContactPair, DemoTrace, TraceError};

#[derive(Debug, Error)]
pub enum GroundingError {
    #[error("frame index 0 has no velocity estimate")]
    FirstFrame,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("invalid grounding config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundingConfig {
    pub acted_on_dist: f64,
    pub graspable_dist: f64,
    pub move_speed: f64,
    pub approach_cosine: f64,
}

impl Default for GroundingConfig {
    fn default() -> Self {
        GroundingConfig {
            acted_on_dist: 0.16,
            graspable_dist: 0.10,
            move_speed: 0.10,
            approach_cosine: 0.5,
        }
    }
}

impl GroundingConfig {
    pub fn validate(&self) -> Result<(), GroundingError> {
        let positive = [
            ("acted_on_dist", self.acted_on_dist),
            ("graspable_dist", self.graspable_dist),
            ("move_speed", self.move_speed),
        ];
        for (key, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GroundingError::Config(format!(
                    "{key} must be > 0, got {value}"
                )));
            }
        }
        if !(-1.0..=1.0).contains(&self.approach_cosine) {
            return Err(GroundingError::Config(format!(
                "approach_cosine must lie in [-1, 1], got {}",
                self.approach_cosine
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HandSymState {
    #[serde(rename = "handMove")]
    pub hand_move: bool,
    #[serde(rename = "handOpen")]
    pub hand_open: bool,
    #[serde(rename = "inHand")]
    pub in_hand: Option<String>,
    #[serde(rename = "actedOn")]
    pub acted_on: Option<String>,
    pub graspable: Option<String>,
}

impl HandSymState {
    /// `actedOn ⇒ handMove` and `inHand ⇒ ¬handOpen`.
    pub fn is_consistent(&self) -> bool {
        (self.acted_on.is_none() || self.hand_move) && (self.in_hand.is_none() || !self.hand_open)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnvSymState {
    #[serde(rename = "inTouch")]
    pub in_touch: BTreeSet<ContactPair>,
    /// Ordered pairs `(upper, lower)`.
    #[serde(rename = "onTop")]
    pub on_top: BTreeSet<(String, String)>,
}

impl EnvSymState {
    pub fn is_consistent(&self) -> bool {
        self.on_top.iter().all(|(a, b)| {
            self.in_touch
                .contains(&ContactPair::new(a.as_str(), b.as_str()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicState {
    pub frame: usize,
    pub t: f64,
    pub hands: BTreeMap<String, HandSymState>,
    pub env: EnvSymState,
    /// Positions of every hand and object at this frame; used to attribute
    /// environment changes to a hand.
    pub positions: BTreeMap<String, Vec3>,
}

pub fn ground_frame(
    trace: &DemoTrace,
    index: usize,
    config: &GroundingConfig,
) -> Result<SymbolicState, GroundingError> {
    if index == 0 {
        return Err(GroundingError::FirstFrame);
    }
    config.validate()?;
    let frame = trace.frames.get(index).ok_or(TraceError::OutOfRange {
        index,
        len: trace.frames.len(),
    })?;
    let registry = &trace.registry;
    let cubes: Vec<(&str, Vec3)> = registry
        .cubes()
        .into_iter()
        .filter_map(|c| frame.objects.get(c).map(|p| (c, *p)))
        .collect();

    let mut hands = BTreeMap::new();
    for (hand, sample) in &frame.hands {
        let velocity = hand_velocity(trace, hand, index)?;
        let hand_move = geom::norm(velocity) > config.move_speed;
        let held = sample.held.as_deref();
        let candidates = cubes.iter().filter(|(c, _)| Some(*c) != held);

        let graspable = nearest(
            candidates
                .clone()
                .filter(|(_, p)| geom::dist(*p, sample.pos) < config.graspable_dist),
            sample.pos,
        );
        let acted_on = if hand_move {
            nearest(
                candidates.filter(|(_, p)| {
                    let to_cube = geom::sub(*p, sample.pos);
                    geom::norm(to_cube) < config.acted_on_dist
                        && geom::cosine(velocity, to_cube)
                            .is_some_and(|cos| cos > config.approach_cosine)
                }),
                sample.pos,
            )
        } else {
            None
        };
        hands.insert(
            hand.clone(),
            HandSymState {
                hand_move,
                hand_open: sample.open,
                in_hand: sample.held.clone(),
                acted_on,
                graspable,
            },
        );
    }

    let in_touch = frame.contacts.clone();
    let mut on_top = BTreeSet::new();
    for pair in &in_touch {
        let (a, b) = (pair.first(), pair.second());
        if let (Some(pa), Some(pb)) = (frame.position(a), frame.position(b)) {
            if pa[2] > pb[2] {
                on_top.insert((a.to_string(), b.to_string()));
            } else if pb[2] > pa[2] {
                on_top.insert((b.to_string(), a.to_string()));
            }
        }
    }

    let mut positions: BTreeMap<String, Vec3> = frame.objects.clone();
    positions.extend(frame.hands.iter().map(|(h, s)| (h.clone(), s.pos)));

    Ok(SymbolicState {
        frame: index,
        t: frame.t,
        hands,
        env: EnvSymState { in_touch, on_top },
        positions,
    })
}

// Nearest candidate; ties go to the lexicographically smaller name.
fn nearest<'a>(
    candidates: impl Iterator<Item = &'a (&'a str, Vec3)>,
    from: Vec3,
) -> Option<String> {
    candidates
        .map(|(name, p)| (geom::dist(*p, from), *name))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .map(|(_, name)| name.to_string())
}

/// One state per frame index `1..len`, in order.
pub fn ground_trace(
    trace: &DemoTrace,
    config: &GroundingConfig,
) -> Result<Vec<SymbolicState>, GroundingError> {
    (1..trace.len())
        .map(|i| ground_frame(trace, i, config))
        .collect()
}
