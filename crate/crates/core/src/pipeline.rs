//! Trace-to-library glue shared by the command line and the tests.

use thiserror::Error;

use crate::grounding::{ground_trace, GroundingConfig, GroundingError, SymbolicState};
use crate::model::OperatorLibrary;
use crate::oplearn::{assign_costs, extract, repair_exclusivity, LearnError};
use crate::segmentation::{flatten, segment, ActivitySegment};
use crate::trace::DemoTrace;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("grounding: {0}")]
    Grounding(#[from] GroundingError),
    #[error("learning: {0}")]
    Learn(#[from] LearnError),
}

/// Symbolic states and segments of one trace.
pub fn analyze(
    trace: &DemoTrace,
    config: &GroundingConfig,
    debounce: usize,
) -> Result<(Vec<SymbolicState>, Vec<ActivitySegment>), GroundingError> {
    let states = ground_trace(trace, config)?;
    let segments = flatten(&segment(&states, debounce));
    Ok((states, segments))
}

/// Adds one demonstration's operators to `library`. Costs are left alone.
pub fn learn_demo(
    trace: &DemoTrace,
    config: &GroundingConfig,
    debounce: usize,
    library: &mut OperatorLibrary,
) -> Result<Vec<ActivitySegment>, PipelineError> {
    let (states, segments) = analyze(trace, config, debounce)?;
    extract(&states, &segments, &trace.registry, library)?;
    Ok(segments)
}

/// Library learned from all `traces`, with costs assigned and optionally
/// repaired.
pub fn learn_library<'a>(
    traces: impl IntoIterator<Item = &'a DemoTrace>,
    config: &GroundingConfig,
    debounce: usize,
    repair: bool,
) -> Result<OperatorLibrary, PipelineError> {
    let mut library = OperatorLibrary::new();
    for trace in traces {
        learn_demo(trace, config, debounce, &mut library)?;
    }
    assign_costs(&mut library);
    if repair {
        repair_exclusivity(&mut library);
    }
    Ok(library)
}
