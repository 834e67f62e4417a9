use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use demo2pddl::model::{load_goal, OperatorLibrary, PlanningProblem, WorldState};
use demo2pddl::ontology::EnvironmentRegistry;
use demo2pddl::oplearn::{assign_costs, repair_exclusivity};
use demo2pddl::pddl::{
    emit_domain, emit_problem, parse_domain, parse_problem, DEFAULT_DOMAIN_NAME,
};
use demo2pddl::pipeline::{analyze, learn_demo};
use demo2pddl::planner::{
    ground, solve, validate, Plan, PlannerError, SearchMode, Solution, ValidationReport,
};
use demo2pddl::segmentation::ActivitySegment;
use demo2pddl::synthgen::{corpus_scripts, generate, DemoScript, SyntheticDemo};
use demo2pddl::trace::{read_trace, DemoTrace};
use serde::{Deserialize, Serialize};

use crate::config::{require, PipelineConfig};
use crate::error::{CliError, CliResult};

/// Plan artifact. `validation` is the mutex replay when `mutex` is set,
/// the plain replay otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(flatten)]
    pub plan: Plan,
    pub mode: SearchMode,
    pub mutex: bool,
    pub validation: ValidationReport,
}

pub fn write_text(path: &Path, text: &str, stage: &'static str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Output {
            stage,
            message: format!("{}: {e}", dir.display()),
        })?;
    }
    fs::write(path, text).map_err(|e| CliError::Output {
        stage,
        message: format!("{}: {e}", path.display()),
    })
}

/// Writes to `path`, or to stdout without one.
pub fn emit_output(path: Option<&Path>, text: &str, stage: &'static str) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text, stage),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Output {
                    stage,
                    message: format!("stdout: {e}"),
                }),
                _ => Ok(()),
            }
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

fn read_input(path: &Path, stage: &'static str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(stage, format!("{}: {e}", path.display())))
}

pub fn load_trace(path: &Path, registry: &EnvironmentRegistry) -> CliResult<DemoTrace> {
    read_trace(path, registry).map_err(|e| CliError::input("trace", e))
}

pub fn load_library(path: &Path) -> CliResult<OperatorLibrary> {
    require(path)?;
    let lib = OperatorLibrary::from_json(&read_input(path, "library")?)
        .map_err(|e| CliError::input("library", format!("{}: {e}", path.display())))?;
    lib.validate().map_err(|e| CliError::input("library", e))?;
    Ok(lib)
}

pub fn load_script(path: &Path) -> CliResult<DemoScript> {
    require(path)?;
    serde_json::from_str(&read_input(path, "gen")?)
        .map_err(|e| CliError::input("gen", format!("{}: {e}", path.display())))
}

pub fn goal_problem(goal: &Path, registry: EnvironmentRegistry) -> CliResult<PlanningProblem> {
    require(goal)?;
    let lits =
        load_goal(goal).map_err(|e| CliError::input("goal", format!("{}: {e}", goal.display())))?;
    let init = WorldState::resting(&registry);
    PlanningProblem::new(registry, init, lits).map_err(|e| CliError::input("goal", e))
}

pub fn pddl_problem(
    path: &Path,
    library_hierarchy: &demo2pddl::ontology::TypeHierarchy,
) -> CliResult<PlanningProblem> {
    require(path)?;
    parse_problem(&read_input(path, "problem")?, library_hierarchy)
        .map(|p| p.problem)
        .map_err(|e| CliError::input("problem", format!("{}: {e}", path.display())))
}

pub fn pddl_library(
    path: &Path,
) -> CliResult<(OperatorLibrary, demo2pddl::ontology::TypeHierarchy)> {
    require(path)?;
    let parsed = parse_domain(&read_input(path, "domain")?)
        .map_err(|e| CliError::input("domain", format!("{}: {e}", path.display())))?;
    Ok((parsed.library, parsed.hierarchy))
}

pub fn generate_demo(
    script: &DemoScript,
    registry: &EnvironmentRegistry,
) -> CliResult<SyntheticDemo> {
    generate(script, registry).map_err(|e| CliError::input("gen", e))
}

/// Writes `<dir>/<stem>.jsonl` and `<dir>/<stem>.labels.json`.
pub fn write_demo(dir: &Path, stem: &str, demo: &SyntheticDemo) -> CliResult<PathBuf> {
    let trace = dir.join(format!("{stem}.jsonl"));
    write_text(&trace, &demo.trace.to_jsonl(), "gen")?;
    write_text(
        &dir.join(format!("{stem}.labels.json")),
        &to_json(&demo.labels),
        "gen",
    )?;
    Ok(trace)
}

pub fn corpus(
    seed: u64,
    registry: &EnvironmentRegistry,
) -> CliResult<Vec<(String, SyntheticDemo)>> {
    corpus_scripts(seed, registry)
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((format!("demo{i:02}"), generate_demo(s, registry)?)))
        .collect()
}

pub fn segments(trace: &DemoTrace, config: &PipelineConfig) -> CliResult<Vec<ActivitySegment>> {
    analyze(trace, &config.grounding, config.debounce)
        .map(|(_, s)| s)
        .map_err(|e| CliError::input("ground", e))
}

/// Adds every trace to `library`, then recomputes costs and optionally repairs.
pub fn learn_into<'a>(
    library: &mut OperatorLibrary,
    traces: impl IntoIterator<Item = (&'a str, &'a DemoTrace)>,
    config: &PipelineConfig,
) -> CliResult<Vec<(String, Vec<ActivitySegment>)>> {
    let mut all = Vec::new();
    for (name, trace) in traces {
        let segs = learn_demo(trace, &config.grounding, config.debounce, library)
            .map_err(|e| CliError::Learn(format!("{name}: {e}")))?;
        all.push((name.to_string(), segs));
    }
    assign_costs(library);
    if config.repair {
        repair_exclusivity(library);
    }
    Ok(all)
}

pub fn domain_text(library: &OperatorLibrary) -> CliResult<String> {
    emit_domain(library, DEFAULT_DOMAIN_NAME)
        .map(|d| d.text)
        .map_err(|e| CliError::input("emit", e))
}

pub fn problem_text(problem: &PlanningProblem, name: &str) -> CliResult<String> {
    emit_problem(problem, name, DEFAULT_DOMAIN_NAME)
        .map(|d| d.text)
        .map_err(|e| CliError::input("emit", e))
}

/// Plans and replays. Returns the artifact even when mutex validation
/// fails; the caller decides the exit status.
pub fn plan(
    library: &OperatorLibrary,
    problem: &PlanningProblem,
    mode: SearchMode,
    mutex: bool,
    max_expansions: Option<usize>,
) -> CliResult<PlanFile> {
    let actions = ground(library, &problem.registry);
    log::info!("{} ground actions", actions.len());
    let plan = match solve(problem, &actions, mode, max_expansions) {
        Ok(Solution::Plan(p)) => p,
        Ok(Solution::Unsolvable) | Err(PlannerError::Unsolvable(_)) => {
            return Err(CliError::Unsolvable)
        }
        Err(e @ PlannerError::ExpansionLimit(_)) => {
            return Err(CliError::SearchLimit(e.to_string()))
        }
        Err(e) => return Err(CliError::input("plan", e)),
    };
    let validation = replay(problem, &plan, mutex)?;
    Ok(PlanFile {
        plan,
        mode,
        mutex,
        validation,
    })
}

pub fn replay(problem: &PlanningProblem, plan: &Plan, mutex: bool) -> CliResult<ValidationReport> {
    validate(problem, plan, mutex).map_err(|e| CliError::input("validate", e))
}

/// Accepts a plan artifact; fields other than the steps are ignored and the
/// totals are recomputed.
pub fn load_plan(path: &Path) -> CliResult<Plan> {
    require(path)?;
    let plan: Plan = serde_json::from_str(&read_input(path, "validate")?)
        .map_err(|e| CliError::input("validate", format!("{}: {e}", path.display())))?;
    Ok(Plan::new(plan.steps))
}
