//! Compiles stacking demonstrations into PDDL planning domains.
//!
//! The pipeline: a [`trace::DemoTrace`] is grounded into symbolic states
//! ([`grounding`]), classified and segmented into activities
//! ([`segmentation`]), turned into lifted operators with observation counts
//! and costs ([`oplearn`]), written out as PDDL ([`pddl`]) and searched
//! ([`planner`]).

pub mod geom;
pub mod grounding;
pub mod model;
pub mod ontology;
pub mod oplearn;
pub mod pddl;
pub mod pipeline;
pub mod planner;
pub mod segmentation;
pub mod synthgen;
pub mod trace;
