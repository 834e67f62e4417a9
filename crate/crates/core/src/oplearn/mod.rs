//! Operator generation and collection from segmented demonstrations.
//!
//! Each activity transition of a hand opens a draft whose preconditions come
//! from the last state before the transition and whose effects track the
//! hand state until the activity ends. Environment changes are attached to
//! the draft of the hand that caused them. Finished drafts are reduced to
//! the relevant literals, lifted to typed variables and merged into the
//! library, where equal configurations accumulate counts.

mod cost;
mod generalize;
mod relevance;
mod repair;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geom;
use crate::grounding::{EnvSymState, HandSymState, SymbolicState};
use crate::model::{Atom, LearnedOperator, Literal, OperatorLibrary, Predicate};
use crate::ontology::EnvironmentRegistry;
use crate::segmentation::{ActivityLabel, ActivitySegment};

pub use cost::{assign_costs, operator_cost};
pub use generalize::{generalize, Generalized};
pub use relevance::filter_relevant;
pub use repair::repair_exclusivity;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("frame {frame}: environment changed but no hand can be held responsible")]
    Unattributable { frame: usize },
    #[error("frame {frame}: no activity label for hand `{hand}`")]
    MissingLabel { hand: String, frame: usize },
    #[error("no symbolic states to learn from")]
    NoStates,
    #[error("instance `{0}` is not in the demonstration registry")]
    UnknownInstance(String),
}

/// An operator under construction for one segment of one hand.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDraft {
    pub hand: String,
    pub activity: ActivityLabel,
    pub start_frame: usize,
    /// Last hand state before the activity started.
    pub pre_state: HandSymState,
    /// Latest hand state within the activity.
    pub eff_state: HandSymState,
    /// Hand literals that held in the pre-state and in every state since.
    pub constant: BTreeSet<Literal>,
    /// Attributed environment atoms: value before the first change, value now.
    pub env_changes: BTreeMap<Atom, (bool, bool)>,
}

impl OperatorDraft {
    fn open(
        hand: &str,
        activity: ActivityLabel,
        start_frame: usize,
        pre: &HandSymState,
        cur: &HandSymState,
    ) -> Self {
        let constant = hand_literals(hand, pre)
            .intersection(&hand_literals(hand, cur))
            .cloned()
            .collect();
        OperatorDraft {
            hand: hand.to_string(),
            activity,
            start_frame,
            pre_state: pre.clone(),
            eff_state: cur.clone(),
            constant,
            env_changes: BTreeMap::new(),
        }
    }

    fn update(&mut self, cur: &HandSymState) {
        let now = hand_literals(&self.hand, cur);
        self.constant.retain(|l| now.contains(l));
        self.eff_state = cur.clone();
    }

    fn add_env_change(&mut self, before: &BTreeSet<Atom>, after: &BTreeSet<Atom>) {
        for atom in before.symmetric_difference(after) {
            let now = after.contains(atom);
            self.env_changes
                .entry(atom.clone())
                .and_modify(|(_, a)| *a = now)
                .or_insert((!now, now));
        }
    }
}

/// True hand atoms of a multi-valued hand state.
pub fn hand_atoms(hand: &str, h: &HandSymState) -> BTreeSet<Atom> {
    let mut atoms = BTreeSet::new();
    if h.hand_move {
        atoms.insert(Atom::new(Predicate::HandMove, &[hand]));
    }
    if h.hand_open {
        atoms.insert(Atom::new(Predicate::HandOpen, &[hand]));
    }
    let valued = [
        (Predicate::InHand, &h.in_hand),
        (Predicate::ActedOn, &h.acted_on),
        (Predicate::Graspable, &h.graspable),
    ];
    for (pred, value) in valued {
        if let Some(obj) = value {
            atoms.insert(Atom::new(pred, &[hand, obj]));
        }
    }
    atoms
}

/// Literals that a hand state makes true, excluding the implicit negations
/// of multi-valued variables (`¬inHand(h, c)` for every other cube).
pub fn hand_literals(hand: &str, h: &HandSymState) -> BTreeSet<Literal> {
    let mut lits: BTreeSet<Literal> = hand_atoms(hand, h)
        .into_iter()
        .map(|a| Literal::from_atom(a, true))
        .collect();
    if !h.hand_move {
        lits.insert(Literal::neg(Predicate::HandMove, &[hand]));
    }
    if !h.hand_open {
        lits.insert(Literal::neg(Predicate::HandOpen, &[hand]));
    }
    lits
}

/// Environment atoms; `inTouch` is stored in both argument orders.
pub fn env_atoms(env: &EnvSymState) -> BTreeSet<Atom> {
    let mut atoms = BTreeSet::new();
    for pair in &env.in_touch {
        atoms.insert(Atom::new(
            Predicate::InTouch,
            &[pair.first(), pair.second()],
        ));
        atoms.insert(Atom::new(
            Predicate::InTouch,
            &[pair.second(), pair.first()],
        ));
    }
    for (a, b) in &env.on_top {
        atoms.insert(Atom::new(Predicate::OnTop, &[a, b]));
    }
    atoms
}

fn label_streams(
    states: &[SymbolicState],
    segments: &[ActivitySegment],
) -> Result<BTreeMap<String, Vec<ActivityLabel>>, LearnError> {
    let mut hands: BTreeSet<&String> = states.iter().flat_map(|s| s.hands.keys()).collect();
    hands.extend(segments.iter().map(|s| &s.hand));
    let mut streams = BTreeMap::new();
    for hand in hands {
        let mine: Vec<&ActivitySegment> = segments.iter().filter(|s| &s.hand == hand).collect();
        let stream = states
            .iter()
            .map(|s| {
                mine.iter()
                    .find(|seg| seg.start <= s.frame && s.frame <= seg.end)
                    .map(|seg| seg.label)
                    .ok_or_else(|| LearnError::MissingLabel {
                        hand: hand.clone(),
                        frame: s.frame,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        streams.insert(hand.clone(), stream);
    }
    Ok(streams)
}

/// The hand held responsible for an environment change at state `k`: the
/// only non-idle hand if there is one, otherwise the hand whose activity
/// changed most recently, then the hand nearest to a changed object.
fn responsible_hand(
    k: usize,
    state: &SymbolicState,
    streams: &BTreeMap<String, Vec<ActivityLabel>>,
    last_boundary: &BTreeMap<String, usize>,
    changed: &BTreeSet<Atom>,
) -> Option<String> {
    let active: Vec<&String> = streams
        .iter()
        .filter(|(_, labels)| labels[k] != ActivityLabel::IdleMotion)
        .map(|(h, _)| h)
        .collect();
    if active.len() == 1 {
        return Some(active[0].clone());
    }
    let candidates: Vec<&String> = if active.is_empty() {
        streams.keys().collect()
    } else {
        active
    };
    let objects: BTreeSet<&String> = changed.iter().flat_map(|a| a.args.iter()).collect();
    let proximity = |hand: &String| -> f64 {
        let Some(&hp) = state.positions.get(hand) else {
            return f64::INFINITY;
        };
        objects
            .iter()
            .filter_map(|o| state.positions.get(*o))
            .map(|p| geom::dist(hp, *p))
            .fold(f64::INFINITY, f64::min)
    };
    candidates
        .into_iter()
        .filter(|h| last_boundary.contains_key(*h))
        .min_by(|a, b| {
            last_boundary[*b]
                .cmp(&last_boundary[*a])
                .then_with(|| proximity(a).total_cmp(&proximity(b)))
                .then_with(|| a.cmp(b))
        })
        .cloned()
}

/// Runs the generation loop over one demonstration and returns the buffered
/// drafts in the order they were opened.
pub fn collect_drafts(
    states: &[SymbolicState],
    segments: &[ActivitySegment],
) -> Result<Vec<OperatorDraft>, LearnError> {
    if states.is_empty() {
        return Err(LearnError::NoStates);
    }
    let streams = label_streams(states, segments)?;
    let mut buffer: Vec<OperatorDraft> = Vec::new();
    let mut latest: BTreeMap<String, usize> = BTreeMap::new();
    let mut last_boundary: BTreeMap<String, usize> = BTreeMap::new();
    let idle_hand = HandSymState {
        hand_open: true,
        ..HandSymState::default()
    };

    for (k, state) in states.iter().enumerate() {
        for (hand, labels) in &streams {
            let cur = state.hands.get(hand).unwrap_or(&idle_hand);
            let prev = if k == 0 {
                cur
            } else {
                states[k - 1].hands.get(hand).unwrap_or(&idle_hand)
            };
            if k == 0 || labels[k] != labels[k - 1] {
                buffer.push(OperatorDraft::open(hand, labels[k], state.frame, prev, cur));
                latest.insert(hand.clone(), buffer.len() - 1);
                last_boundary.insert(hand.clone(), state.frame);
            } else if cur != prev {
                buffer[latest[hand]].update(cur);
            }
        }
        if k > 0 && state.env != states[k - 1].env {
            let before = env_atoms(&states[k - 1].env);
            let after = env_atoms(&state.env);
            let changed: BTreeSet<Atom> = before.symmetric_difference(&after).cloned().collect();
            let hand = responsible_hand(k, state, &streams, &last_boundary, &changed)
                .ok_or(LearnError::Unattributable { frame: state.frame })?;
            let idx = *latest
                .get(&hand)
                .ok_or(LearnError::Unattributable { frame: state.frame })?;
            buffer[idx].add_env_change(&before, &after);
        }
    }
    Ok(buffer)
}

/// Turns a finished draft into a lifted operator observed once.
pub fn finalize_draft(
    draft: &OperatorDraft,
    registry: &EnvironmentRegistry,
) -> Result<LearnedOperator, LearnError> {
    let (pre, eff) = filter_relevant(draft);
    let lifted = generalize(&pre, &eff, registry)?;
    Ok(LearnedOperator {
        activity: draft.activity,
        config_index: 0,
        params: lifted.params,
        pre: lifted.pre,
        eff: lifted.eff,
        count: Some(1),
        cost: None,
        revocations: Vec::new(),
    })
}

/// Extracts the operators of one demonstration and merges them into
/// `library`. Costs are not recomputed; see [`assign_costs`].
pub fn extract(
    states: &[SymbolicState],
    segments: &[ActivitySegment],
    registry: &EnvironmentRegistry,
    library: &mut OperatorLibrary,
) -> Result<(), LearnError> {
    let drafts = collect_drafts(states, segments)?;
    let mut learned = OperatorLibrary::new();
    for draft in &drafts {
        learned.observe(finalize_draft(draft, registry)?);
    }
    library.merge(learned);
    Ok(())
}
