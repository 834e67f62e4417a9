//! Scripted stacking demonstrations with known activity labels.
//!
//! A script drives one hand through: rest, optional hesitant approaches to
//! distractor cubes, then per moved cube a reach down onto it, a grasp
//! (pausing or fluent), a lift and carry, a descent onto the current tower
//! top, and a release. The generator records the activity it is acting out
//! for every frame, which serves as the segmentation oracle.
//!
//! Layout: cubes sit on a 0.25 m grid on the table, hands rest well away
//! from all cubes, and every carry happens at a hover height that keeps the
//! hand more than 0.16 m above any cube it is not descending onto.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Vec3};
use crate::ontology::{EnvironmentRegistry, HAND, WOODEN_CUBE};
use crate::segmentation::{segment_labels, ActivityLabel, ActivitySegment};
use crate::trace::{ContactPair, DemoFrame, DemoTrace, HandSample, TraceError};

pub const SAMPLE_RATE_HZ: f64 = 30.0;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.0005;
/// Minimum approach speed; must exceed the 0.1 m/s motion threshold.
pub const MIN_APPROACH_SPEED: f64 = 0.1;

const CUBE_SIZE: f64 = 0.05;
/// Hand height above the centre of a grasped cube.
const GRIP_OFFSET: f64 = 0.04;
/// Vertical descent length onto a grasp or release point.
const DESCENT: f64 = 0.30;
/// Closest approach during a hesitation.
const HESITATION_DEPTH: f64 = 0.12;
/// Radius of the scripted approach zone around a target cube.
const APPROACH_ZONE: f64 = 0.16;
const GRID_SPACING: f64 = 0.25;
const TABLE_POS: Vec3 = [0.55, 0.0, -0.05];
const REST_FRAMES: usize = 10;
const PAUSE_FRAMES: usize = 15;
const RELEASE_FRAMES: usize = 3;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("`{0}` is not a Hand instance of the registry")]
    NotAHand(String),
    #[error("`{0}` is not a Wooden_cube instance of the registry")]
    NotACube(String),
    #[error("cube `{0}` is used more than once in the script")]
    RepeatedCube(String),
    #[error("script must stack at least one cube")]
    NothingToStack,
    #[error("approach speed {0} m/s must exceed {MIN_APPROACH_SPEED} m/s")]
    TooSlow(f64),
    #[error("noise sigma must be finite and non-negative, got {0}")]
    BadNoise(f64),
    #[error("choreography needs {needed} frames, more than the requested {requested}")]
    DurationTooShort { needed: usize, requested: usize },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoScript {
    pub seed: u64,
    pub hand: String,
    /// Cube the first moved cube is placed on.
    pub base: String,
    /// Cubes moved, in order; each lands on the previous one.
    pub cubes_to_stack: Vec<String>,
    pub pause_at_take: bool,
    /// m/s
    pub approach_speed: f64,
    /// m, standard deviation of positional jitter
    #[serde(default = "default_noise")]
    pub noise_sigma: f64,
    /// Distractor cubes approached and abandoned before the first real reach.
    #[serde(default)]
    pub hesitate_at: Vec<String>,
    /// Pads the end with resting frames up to this length.
    #[serde(default)]
    pub duration_s: Option<f64>,
}

fn default_noise() -> f64 {
    DEFAULT_NOISE_SIGMA
}

impl DemoScript {
    pub fn new(hand: &str, base: &str, cubes: &[&str]) -> Self {
        DemoScript {
            seed: 0,
            hand: hand.to_string(),
            base: base.to_string(),
            cubes_to_stack: cubes.iter().map(|c| c.to_string()).collect(),
            pause_at_take: true,
            approach_speed: 0.3,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            hesitate_at: Vec::new(),
            duration_s: None,
        }
    }

    fn validate(&self, registry: &EnvironmentRegistry) -> Result<(), SynthError> {
        if !registry.is_instance_of(&self.hand, HAND) {
            return Err(SynthError::NotAHand(self.hand.clone()));
        }
        if self.cubes_to_stack.is_empty() {
            return Err(SynthError::NothingToStack);
        }
        if self.approach_speed.is_nan() || self.approach_speed <= MIN_APPROACH_SPEED {
            return Err(SynthError::TooSlow(self.approach_speed));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(SynthError::BadNoise(self.noise_sigma));
        }
        let mut seen = BTreeSet::new();
        let all = std::iter::once(&self.base)
            .chain(&self.cubes_to_stack)
            .chain(&self.hesitate_at);
        for cube in all {
            if !registry.is_instance_of(cube, WOODEN_CUBE) {
                return Err(SynthError::NotACube(cube.clone()));
            }
            if !seen.insert(cube) {
                return Err(SynthError::RepeatedCube(cube.clone()));
            }
        }
        Ok(())
    }
}

/// A generated trace with the labels the script acted out.
#[derive(Debug, Clone)]
pub struct SyntheticDemo {
    pub script: DemoScript,
    pub trace: DemoTrace,
    /// Ground-truth segments for every hand over frames `1..len`.
    pub labels: Vec<ActivitySegment>,
}

impl SyntheticDemo {
    pub fn label_sequence(&self, hand: &str) -> Vec<ActivityLabel> {
        self.labels
            .iter()
            .filter(|s| s.hand == hand)
            .map(|s| s.label)
            .collect()
    }
}

/// Initial cube position on the table grid, by registry order.
pub fn cube_home(index: usize) -> Vec3 {
    [
        0.40 + GRID_SPACING * (index / 4) as f64,
        -0.375 + GRID_SPACING * (index % 4) as f64,
        CUBE_SIZE / 2.0,
    ]
}

pub fn hand_rest(index: usize) -> Vec3 {
    [0.10, -0.30 + 0.60 * index as f64, 0.35]
}

struct Snapshot {
    hand_pos: Vec3,
    open: bool,
    held: Option<String>,
    cubes: BTreeMap<String, Vec3>,
    contacts: BTreeSet<ContactPair>,
    label: ActivityLabel,
}

struct Stage {
    dt: f64,
    hand_pos: Vec3,
    open: bool,
    held: Option<String>,
    cubes: BTreeMap<String, Vec3>,
    contacts: BTreeSet<ContactPair>,
    timeline: Vec<Snapshot>,
}

impl Stage {
    fn push(&mut self, label: ActivityLabel) {
        self.timeline.push(Snapshot {
            hand_pos: self.hand_pos,
            open: self.open,
            held: self.held.clone(),
            cubes: self.cubes.clone(),
            contacts: self.contacts.clone(),
            label,
        });
    }

    fn hold(&mut self, frames: usize, label: ActivityLabel) {
        for _ in 0..frames {
            self.push(label);
        }
    }

    fn distance_to(&self, cube: &str) -> f64 {
        geom::dist(self.hand_pos, self.cubes[cube])
    }

    /// Straight move at (close to) `speed`, quantized to whole frames.
    fn move_to(
        &mut self,
        target: Vec3,
        speed: f64,
        label: impl Fn(&Stage) -> ActivityLabel,
        on_arrival: impl FnOnce(&mut Stage),
    ) {
        let start = self.hand_pos;
        let length = geom::dist(start, target);
        let steps = ((length / (speed * self.dt)).round() as usize).max(1);
        let mut on_arrival = Some(on_arrival);
        for k in 1..=steps {
            self.hand_pos = geom::add(
                start,
                geom::scale(geom::sub(target, start), k as f64 / steps as f64),
            );
            if let Some(cube) = self.held.clone() {
                self.cubes.insert(
                    cube.clone(),
                    geom::sub(self.hand_pos, [0.0, 0.0, GRIP_OFFSET]),
                );
                self.contacts.retain(|c| !c.contains(&cube));
            }
            if k == steps {
                if let Some(f) = on_arrival.take() {
                    f(self);
                }
            }
            let l = label(self);
            self.push(l);
        }
    }
}

fn above(p: Vec3, dz: f64) -> Vec3 {
    [p[0], p[1], p[2] + dz]
}

/// Deterministic in (script, registry).
pub fn generate(
    script: &DemoScript,
    registry: &EnvironmentRegistry,
) -> Result<SyntheticDemo, SynthError> {
    use ActivityLabel::*;

    script.validate(registry)?;
    let hands = registry.hands();
    let hand_index = hands
        .iter()
        .position(|h| *h == script.hand)
        .expect("validated");
    let table = registry.table().to_string();
    let cubes: BTreeMap<String, Vec3> = registry
        .cubes()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.to_string(), cube_home(i)))
        .collect();
    let contacts = cubes
        .keys()
        .map(|c| ContactPair::new(c.as_str(), table.as_str()))
        .collect();
    let mut stage = Stage {
        dt: 1.0 / SAMPLE_RATE_HZ,
        hand_pos: hand_rest(hand_index),
        open: true,
        held: None,
        cubes,
        contacts,
        timeline: Vec::new(),
    };
    let v = script.approach_speed;
    let idle = |_: &Stage| IdleMotion;

    stage.hold(REST_FRAMES, IdleMotion);

    for distractor in &script.hesitate_at {
        let grasp = above(stage.cubes[distractor], GRIP_OFFSET);
        stage.move_to(above(grasp, DESCENT), v, idle, |_| {});
        let d = distractor.clone();
        let low = above(stage.cubes[distractor], HESITATION_DEPTH);
        stage.move_to(
            low,
            v,
            move |s| {
                if s.distance_to(&d) < APPROACH_ZONE {
                    Reach
                } else {
                    IdleMotion
                }
            },
            |_| {},
        );
        stage.move_to(above(grasp, DESCENT), v, idle, |_| {});
    }

    let mut tower_top = script.base.clone();
    for cube in &script.cubes_to_stack {
        // reach down onto the cube
        let grasp = above(stage.cubes[cube], GRIP_OFFSET);
        stage.move_to(above(grasp, DESCENT), v, idle, |_| {});
        let c = cube.clone();
        let fluent = !script.pause_at_take;
        stage.move_to(
            grasp,
            v,
            move |s| {
                if s.held.is_some() {
                    Put
                } else if s.distance_to(&c) < APPROACH_ZONE {
                    Reach
                } else {
                    IdleMotion
                }
            },
            |s| {
                if fluent {
                    s.held = Some(cube.clone());
                    s.open = false;
                }
            },
        );
        if script.pause_at_take {
            stage.held = Some(cube.clone());
            stage.open = false;
            stage.hold(PAUSE_FRAMES, Take);
        }

        // lift, carry, and descend onto the tower
        let put = |_: &Stage| Put;
        stage.move_to(above(grasp, DESCENT), v, put, |_| {});
        let release = above(stage.cubes[&tower_top], CUBE_SIZE + GRIP_OFFSET);
        stage.move_to(above(release, DESCENT), v, put, |_| {});
        let target = tower_top.clone();
        let (held, under) = (cube.clone(), tower_top.clone());
        stage.move_to(
            release,
            v,
            move |s| {
                if s.distance_to(&target) < APPROACH_ZONE {
                    Stack
                } else {
                    Put
                }
            },
            move |s| {
                s.contacts.insert(ContactPair::new(held, under));
            },
        );

        // let go and back off
        stage.held = None;
        stage.open = true;
        stage.hold(RELEASE_FRAMES, IdleMotion);
        stage.move_to(above(release, DESCENT), v, idle, |_| {});
        tower_top = cube.clone();
    }

    stage.move_to(hand_rest(hand_index), v, idle, |_| {});
    stage.hold(REST_FRAMES, IdleMotion);

    if let Some(duration) = script.duration_s {
        let requested = (duration * SAMPLE_RATE_HZ).round() as usize;
        if stage.timeline.len() > requested {
            return Err(SynthError::DurationTooShort {
                needed: stage.timeline.len(),
                requested,
            });
        }
        let pad = requested - stage.timeline.len();
        stage.hold(pad, IdleMotion);
    }

    render(script, registry, &hands, hand_index, &table, stage.timeline)
}

fn render(
    script: &DemoScript,
    registry: &EnvironmentRegistry,
    hands: &[&str],
    hand_index: usize,
    table: &str,
    timeline: Vec<Snapshot>,
) -> Result<SyntheticDemo, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let normal = Normal::new(0.0, script.noise_sigma)
        .map_err(|_| SynthError::BadNoise(script.noise_sigma))?;
    let mut jitter = |p: Vec3| -> Vec3 {
        if script.noise_sigma == 0.0 {
            p
        } else {
            [
                p[0] + normal.sample(&mut rng),
                p[1] + normal.sample(&mut rng),
                p[2] + normal.sample(&mut rng),
            ]
        }
    };

    let mut frames = Vec::with_capacity(timeline.len());
    for (i, snap) in timeline.iter().enumerate() {
        let mut hand_samples = BTreeMap::new();
        for (j, hand) in hands.iter().enumerate() {
            let sample = if j == hand_index {
                HandSample {
                    pos: jitter(snap.hand_pos),
                    open: snap.open,
                    held: snap.held.clone(),
                }
            } else {
                HandSample {
                    pos: jitter(hand_rest(j)),
                    open: true,
                    held: None,
                }
            };
            hand_samples.insert(hand.to_string(), sample);
        }
        let mut objects: BTreeMap<String, Vec3> = snap
            .cubes
            .iter()
            .map(|(c, p)| (c.clone(), jitter(*p)))
            .collect();
        objects.insert(table.to_string(), TABLE_POS);
        frames.push(DemoFrame {
            t: i as f64 / SAMPLE_RATE_HZ,
            hands: hand_samples,
            objects,
            contacts: snap.contacts.clone(),
        });
    }
    let trace = DemoTrace::new(frames, registry.clone())?;

    let frame_ids: Vec<usize> = (1..timeline.len()).collect();
    let mut labels = Vec::new();
    for (j, hand) in hands.iter().enumerate() {
        let stream: Vec<ActivityLabel> = if j == hand_index {
            timeline[1..].iter().map(|s| s.label).collect()
        } else {
            vec![ActivityLabel::IdleMotion; frame_ids.len()]
        };
        labels.extend(segment_labels(hand, &frame_ids, &stream, 1));
    }
    labels.sort_by(|a, b| a.hand.cmp(&b.hand).then(a.start.cmp(&b.start)));
    Ok(SyntheticDemo {
        script: script.clone(),
        trace,
        labels,
    })
}

/// Demonstration style, mirroring differences between participants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoStyle {
    pub name: &'static str,
    pub pause_at_take: bool,
    pub approach_speed: f64,
    pub noise_sigma: f64,
    pub hesitations: usize,
}

pub const STYLES: [DemoStyle; 3] = [
    DemoStyle {
        name: "deliberate",
        pause_at_take: true,
        approach_speed: 0.30,
        noise_sigma: 0.0,
        hesitations: 0,
    },
    DemoStyle {
        name: "fluent",
        pause_at_take: false,
        approach_speed: 0.50,
        noise_sigma: DEFAULT_NOISE_SIGMA,
        hesitations: 0,
    },
    DemoStyle {
        name: "hesitant",
        pause_at_take: true,
        approach_speed: 0.25,
        noise_sigma: 0.00025,
        hesitations: 2,
    },
];

/// Twelve scripts: three styles times {one, two} cubes times {right, left}
/// hand. Cube choices are drawn from `seed`.
pub fn corpus_scripts(seed: u64, registry: &EnvironmentRegistry) -> Vec<DemoScript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hands = registry.hands();
    let cubes = registry.cubes();
    let mut scripts = Vec::new();
    for style in STYLES {
        for n_cubes in [1usize, 2] {
            for hand in hands.iter().take(2) {
                let mut pool: Vec<&str> = cubes.clone();
                pool.shuffle(&mut rng);
                let mut picks = pool.into_iter().map(str::to_string);
                let base = picks.next().expect("registry has cubes");
                let moved: Vec<String> = picks.by_ref().take(n_cubes).collect();
                let hesitate_at: Vec<String> = picks.take(style.hesitations).collect();
                scripts.push(DemoScript {
                    seed: seed.wrapping_mul(1000).wrapping_add(scripts.len() as u64),
                    hand: hand.to_string(),
                    base,
                    cubes_to_stack: moved,
                    pause_at_take: style.pause_at_take,
                    approach_speed: style.approach_speed,
                    noise_sigma: style.noise_sigma,
                    hesitate_at,
                    duration_s: None,
                });
            }
        }
    }
    scripts
}

pub fn generate_corpus(
    seed: u64,
    registry: &EnvironmentRegistry,
) -> Result<Vec<SyntheticDemo>, SynthError> {
    corpus_scripts(seed, registry)
        .iter()
        .map(|s| generate(s, registry))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::hand_velocity;
    use ActivityLabel::*;

    fn registry() -> EnvironmentRegistry {
        EnvironmentRegistry::demonstration()
    }

    #[test]
    fn pausing_single_cube_labels() {
        let demo = generate(
            &DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1"]),
            &registry(),
        )
        .unwrap();
        assert_eq!(
            demo.label_sequence("Right_hand"),
            vec![IdleMotion, Reach, Take, Put, Stack, IdleMotion]
        );
        assert_eq!(demo.label_sequence("Left_hand"), vec![IdleMotion]);
    }

    #[test]
    fn fluent_single_cube_omits_take() {
        let mut script = DemoScript::new("Left_hand", "Cube_blue2", &["Cube_yellow1"]);
        script.pause_at_take = false;
        let demo = generate(&script, &registry()).unwrap();
        assert_eq!(
            demo.label_sequence("Left_hand"),
            vec![IdleMotion, Reach, Put, Stack, IdleMotion]
        );
    }

    #[test]
    fn same_script_same_bytes() {
        let script = DemoScript {
            seed: 99,
            ..DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1", "Cube_blue1"])
        };
        let a = generate(&script, &registry()).unwrap();
        let b = generate(&script, &registry()).unwrap();
        assert_eq!(a.trace.to_jsonl(), b.trace.to_jsonl());
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn reach_descent_at_scripted_speed() {
        let mut script = DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1"]);
        script.noise_sigma = 0.0;
        let demo = generate(&script, &registry()).unwrap();
        let reach = demo
            .labels
            .iter()
            .find(|s| s.label == Reach)
            .expect("a reach segment");
        for i in reach.start..=reach.end {
            let v = hand_velocity(&demo.trace, "Right_hand", i).unwrap();
            assert!((geom::norm(v) - 0.3).abs() < 1e-9, "frame {i}: {v:?}");
        }
    }

    #[test]
    fn padded_to_thirty_seconds() {
        let script = DemoScript {
            duration_s: Some(30.0),
            ..DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1"])
        };
        let demo = generate(&script, &registry()).unwrap();
        assert_eq!(demo.trace.len(), 900);
        assert!((demo.trace.sample_rate_hz - 30.0).abs() < 1e-9);
    }

    #[test]
    fn script_errors() {
        let reg = registry();
        let bad_hand = DemoScript::new("Cube_red1", "Cube_green1", &["Cube_blue1"]);
        assert!(matches!(
            generate(&bad_hand, &reg),
            Err(SynthError::NotAHand(_))
        ));
        let empty = DemoScript::new("Right_hand", "Cube_green1", &[]);
        assert!(matches!(
            generate(&empty, &reg),
            Err(SynthError::NothingToStack)
        ));
        let slow = DemoScript {
            approach_speed: 0.05,
            ..DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1"])
        };
        assert!(matches!(generate(&slow, &reg), Err(SynthError::TooSlow(_))));
        let repeated = DemoScript::new("Right_hand", "Cube_green1", &["Cube_green1"]);
        assert!(matches!(
            generate(&repeated, &reg),
            Err(SynthError::RepeatedCube(_))
        ));
    }

    #[test]
    fn corpus_shape() {
        let reg = registry();
        let corpus = generate_corpus(7, &reg).unwrap();
        assert_eq!(corpus.len(), 12);
        for style in STYLES {
            let n = corpus
                .iter()
                .filter(|d| d.script.approach_speed == style.approach_speed)
                .count();
            assert_eq!(n, 4);
        }
        let sequences: Vec<Vec<ActivityLabel>> = corpus
            .iter()
            .map(|d| d.label_sequence(&d.script.hand))
            .collect();
        assert!(sequences.iter().any(|s| !s.contains(&Take)));
        assert!(sequences
            .iter()
            .any(|s| s.starts_with(&[IdleMotion, Reach, IdleMotion, Reach, IdleMotion])));
    }

    #[test]
    fn stacking_contacts_follow_choreography() {
        let mut script = DemoScript::new("Right_hand", "Cube_green1", &["Cube_red1"]);
        script.noise_sigma = 0.0;
        let demo = generate(&script, &registry()).unwrap();
        let first = &demo.trace.frames[0];
        let last = demo.trace.frames.last().unwrap();
        assert!(first
            .contacts
            .contains(&ContactPair::new("Cube_red1", "table1")));
        assert!(!last
            .contacts
            .contains(&ContactPair::new("Cube_red1", "table1")));
        assert!(last
            .contacts
            .contains(&ContactPair::new("Cube_red1", "Cube_green1")));
        assert!(last.objects["Cube_red1"][2] > last.objects["Cube_green1"][2]);
    }
}
