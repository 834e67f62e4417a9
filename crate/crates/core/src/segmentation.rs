//! Activity classification from hand state and segmentation into runs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grounding::{HandSymState, SymbolicState};

pub const DEFAULT_DEBOUNCE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityLabel {
    IdleMotion,
    Reach,
    Put,
    Take,
    Stack,
}

impl ActivityLabel {
    pub const ALL: [ActivityLabel; 5] = [
        ActivityLabel::IdleMotion,
        ActivityLabel::Reach,
        ActivityLabel::Put,
        ActivityLabel::Take,
        ActivityLabel::Stack,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityLabel::IdleMotion => "IdleMotion",
            ActivityLabel::Reach => "Reach",
            ActivityLabel::Put => "Put",
            ActivityLabel::Take => "Take",
            ActivityLabel::Stack => "Stack",
        }
    }
}

impl fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivityLabel::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown activity `{s}`"))
    }
}

/// Decision rules over (handMove, actedOn, inHand).
pub fn classify(h: &HandSymState) -> ActivityLabel {
    let hand_move = if h.acted_on.is_some() && !h.hand_move {
        log::warn!("actedOn without handMove is not groundable; treating the hand as moving");
        true
    } else {
        h.hand_move
    };
    match (h.acted_on.is_some(), h.in_hand.is_some()) {
        (true, true) => ActivityLabel::Stack,
        (true, false) => ActivityLabel::Reach,
        (false, true) if hand_move => ActivityLabel::Put,
        (false, true) => ActivityLabel::Take,
        (false, false) => ActivityLabel::IdleMotion,
    }
}

/// A maximal labeled run for one hand. `start` and `end` are inclusive
/// trace frame indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivitySegment {
    pub hand: String,
    pub label: ActivityLabel,
    #[serde(rename = "start_frame")]
    pub start: usize,
    #[serde(rename = "end_frame")]
    pub end: usize,
}

impl ActivitySegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Merges a per-frame label stream into runs. A new label is committed only
/// when its raw run lasts at least `debounce` frames; shorter runs take the
/// label of the run before them. The first run is always committed.
pub fn segment_labels(
    hand: &str,
    frames: &[usize],
    labels: &[ActivityLabel],
    debounce: usize,
) -> Vec<ActivitySegment> {
    assert_eq!(frames.len(), labels.len());
    let debounce = debounce.max(1);
    let mut raw: Vec<(ActivityLabel, usize, usize)> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        match raw.last_mut() {
            Some((l, _, end)) if *l == label => *end = i,
            _ => raw.push((label, i, i)),
        }
    }

    let mut out: Vec<ActivitySegment> = Vec::new();
    for (label, start, end) in raw {
        let committed = match out.last_mut() {
            None => false,
            Some(last) if last.label == label || end - start + 1 < debounce => {
                last.end = frames[end];
                true
            }
            Some(_) => false,
        };
        if !committed {
            out.push(ActivitySegment {
                hand: hand.to_string(),
                label,
                start: frames[start],
                end: frames[end],
            });
        }
    }
    out
}

/// Per-hand segments, keyed by hand name.
pub fn segment(
    states: &[SymbolicState],
    debounce: usize,
) -> BTreeMap<String, Vec<ActivitySegment>> {
    let frames: Vec<usize> = states.iter().map(|s| s.frame).collect();
    let mut hands: Vec<&String> = states.iter().flat_map(|s| s.hands.keys()).collect();
    hands.sort();
    hands.dedup();
    hands
        .into_iter()
        .map(|hand| {
            let labels: Vec<ActivityLabel> = states
                .iter()
                .map(|s| {
                    s.hands
                        .get(hand)
                        .map(classify)
                        .unwrap_or(ActivityLabel::IdleMotion)
                })
                .collect();
            (
                hand.clone(),
                segment_labels(hand, &frames, &labels, debounce),
            )
        })
        .collect()
}

/// Segments of all hands, flattened in (hand, start) order.
pub fn flatten(segments: &BTreeMap<String, Vec<ActivitySegment>>) -> Vec<ActivitySegment> {
    segments.values().flatten().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ActivityLabel::*;

    fn hand(hand_move: bool, acted_on: bool, in_hand: bool) -> HandSymState {
        HandSymState {
            hand_move,
            hand_open: !in_hand,
            in_hand: in_hand.then(|| "Cube_x".to_string()),
            acted_on: acted_on.then(|| "Cube_y".to_string()),
            graspable: None,
        }
    }

    #[test]
    fn rule_table_columns() {
        assert_eq!(classify(&hand(false, false, true)), Take);
        assert_eq!(classify(&hand(true, true, true)), Stack);
        assert_eq!(classify(&hand(false, false, false)), IdleMotion);
        assert_eq!(classify(&hand(true, false, false)), IdleMotion);
        assert_eq!(classify(&hand(true, true, false)), Reach);
        assert_eq!(classify(&hand(true, false, true)), Put);
    }

    #[test]
    fn unreachable_combination_treated_as_moving() {
        assert_eq!(classify(&hand(false, true, false)), Reach);
        assert_eq!(classify(&hand(false, true, true)), Stack);
    }

    #[test]
    fn constant_stream_is_one_segment() {
        let frames: Vec<usize> = (1..=20).collect();
        let segs = segment_labels("h", &frames, &[Put; 20], 3);
        assert_eq!(
            segs,
            vec![ActivitySegment {
                hand: "h".into(),
                label: Put,
                start: 1,
                end: 20
            }]
        );
    }

    #[test]
    fn short_blip_absorbed() {
        let mut labels = vec![IdleMotion; 10];
        labels[5] = Reach;
        let frames: Vec<usize> = (1..=10).collect();
        let segs = segment_labels("h", &frames, &labels, 3);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].start, segs[0].end), (1, 10));

        let segs = segment_labels("h", &frames, &labels, 1);
        assert_eq!(segs.len(), 3);
    }

    #[test]
    fn change_committed_at_run_start() {
        let labels = [vec![IdleMotion; 4], vec![Reach; 3], vec![Take; 5]].concat();
        let frames: Vec<usize> = (1..=12).collect();
        let segs = segment_labels("h", &frames, &labels, 3);
        let spans: Vec<_> = segs.iter().map(|s| (s.label, s.start, s.end)).collect();
        assert_eq!(
            spans,
            vec![(IdleMotion, 1, 4), (Reach, 5, 7), (Take, 8, 12)]
        );
    }

    fn label_strategy() -> impl Strategy<Value = ActivityLabel> {
        prop::sample::select(ActivityLabel::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn debounce_one_reproduces_per_frame_labels(labels in prop::collection::vec(label_strategy(), 1..80)) {
            let frames: Vec<usize> = (1..=labels.len()).collect();
            let segs = segment_labels("h", &frames, &labels, 1);
            let expanded: Vec<ActivityLabel> =
                segs.iter().flat_map(|s| std::iter::repeat_n(s.label, s.len())).collect();
            prop_assert_eq!(expanded, labels);
        }

        #[test]
        fn segments_partition_frames(labels in prop::collection::vec(label_strategy(), 1..80), debounce in 1usize..6) {
            let frames: Vec<usize> = (1..=labels.len()).collect();
            let segs = segment_labels("h", &frames, &labels, debounce);
            prop_assert_eq!(segs[0].start, 1);
            prop_assert_eq!(segs.last().unwrap().end, labels.len());
            for pair in segs.windows(2) {
                prop_assert_eq!(pair[0].end + 1, pair[1].start);
                prop_assert_ne!(pair[0].label, pair[1].label);
            }
            for s in &segs[1..] {
                prop_assert!(s.len() >= debounce);
            }
        }
    }
}
