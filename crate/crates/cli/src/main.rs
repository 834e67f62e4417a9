//! `demo2pddl` command line: each stage of the demonstration compiler as a
//! subcommand, plus `pipeline` running all of them.

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use demo2pddl::grounding::ground_trace;
use demo2pddl::model::OperatorLibrary;
use demo2pddl::ontology::TypeHierarchy;

use commands::*;
use config::{load_grounding, require, Mode, PipelineConfig};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "demo2pddl",
    version,
    about = "Compile stacking demonstrations into PDDL domains and plan with them"
)]
struct Cli {
    /// JSON settings file; defaults to $DEMO2PDDL_CONFIG
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Demonstration registry JSON (built-in registry if omitted)
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Grounding thresholds JSON
    #[arg(long)]
    grounding: Option<PathBuf>,
    #[arg(long)]
    debounce: Option<usize>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Goal literals JSON; the initial state has every cube on the table
    #[arg(long, conflicts_with = "problem")]
    goal: Option<PathBuf>,
    /// PDDL problem file instead of a goal file
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Execution registry JSON (built-in registry if omitted)
    #[arg(long = "exec-registry")]
    exec_registry: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic demonstration traces with ground-truth labels
    Gen {
        /// Demo scripts JSON; without any, the seeded twelve-demo corpus is generated
        #[arg(long = "script")]
        scripts: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the positional noise of every script (m)
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Symbolic states of a trace
    Ground {
        trace: PathBuf,
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Labeled activity segments of a trace
    Segment {
        trace: PathBuf,
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn operators from traces
    Learn {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Library to extend in place (created if missing)
        #[arg(long, conflicts_with = "out", required_unless_present = "out")]
        append: Option<PathBuf>,
        /// Fresh library file
        #[arg(long)]
        out: Option<PathBuf>,
        /// Make actedOn and graspable exclusive per hand
        #[arg(long)]
        repair: bool,
        #[command(flatten)]
        shared: Shared,
    },
    /// PDDL domain (and optionally problem) of a library
    Emit {
        library: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        goal: Option<PathBuf>,
        #[arg(long = "exec-registry")]
        exec_registry: Option<PathBuf>,
        /// Where to write the problem for --goal
        #[arg(long = "problem-out", requires = "goal")]
        problem_out: Option<PathBuf>,
    },
    /// Search for a plan
    Plan {
        /// Library JSON
        #[arg(long, conflicts_with = "domain", required_unless_present = "domain")]
        library: Option<PathBuf>,
        /// PDDL domain instead of a library
        #[arg(long)]
        domain: Option<PathBuf>,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Replay under exclusive actedOn/graspable; exit 6 if the plan breaks
        #[arg(long = "mutex-validate")]
        mutex_validate: bool,
        /// Also write domain.pddl and problem.pddl here
        #[arg(long = "export-pddl")]
        export_pddl: Option<PathBuf>,
        #[arg(long = "max-expansions")]
        max_expansions: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a plan file against a problem
    Validate {
        plan: PathBuf,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        mutex: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every stage and write all artifacts to one directory
    Pipeline {
        /// Learn from the generated corpus instead of trace files
        #[arg(long = "synth-corpus", conflicts_with = "traces")]
        synth_corpus: bool,
        traces: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        goal: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "demo-registry")]
        demo_registry: Option<PathBuf>,
        #[arg(long = "exec-registry")]
        exec_registry: Option<PathBuf>,
        #[arg(long)]
        grounding: Option<PathBuf>,
        #[arg(long)]
        debounce: Option<usize>,
        #[arg(long)]
        repair: bool,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long = "mutex-validate")]
        mutex_validate: bool,
        #[arg(long = "max-expansions")]
        max_expansions: Option<usize>,
    },
}

fn apply_shared(mut config: PipelineConfig, shared: &Shared) -> CliResult<PipelineConfig> {
    if let Some(r) = &shared.registry {
        config.demo_registry = Some(r.clone());
    }
    config.grounding = load_grounding(shared.grounding.as_deref(), config.grounding)?;
    if let Some(d) = shared.debounce {
        config.debounce = d;
    }
    Ok(config)
}

fn problem_from(
    args: &ProblemArgs,
    config: &PipelineConfig,
    hierarchy: &TypeHierarchy,
) -> CliResult<demo2pddl::model::PlanningProblem> {
    let mut config = config.clone();
    if let Some(r) = &args.exec_registry {
        config.exec_registry = Some(r.clone());
    }
    match (&args.problem, args.goal.as_ref().or(config.goal.as_ref())) {
        (Some(p), _) => pddl_problem(p, hierarchy),
        (None, Some(g)) => goal_problem(g, config.exec_registry()?),
        (None, None) => Err(CliError::Config(
            "a goal file or a PDDL problem is required".into(),
        )),
    }
}

fn goal_name(goal: Option<&Path>) -> String {
    goal.and_then(|g| g.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into())
}

fn run(cli: Cli) -> CliResult<()> {
    let config = PipelineConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Gen {
            scripts,
            seed,
            noise,
            registry,
            out,
        } => {
            let mut config = config;
            if registry.is_some() {
                config.demo_registry = registry;
            }
            let reg = config.demo_registry()?;
            let mut named: Vec<(String, demo2pddl::synthgen::DemoScript)> = if scripts.is_empty() {
                demo2pddl::synthgen::corpus_scripts(seed.unwrap_or(config.seed), &reg)
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| (format!("demo{i:02}"), s))
                    .collect()
            } else {
                scripts
                    .iter()
                    .map(|p| Ok((goal_name(Some(p)), load_script(p)?)))
                    .collect::<CliResult<_>>()?
            };
            for (name, script) in &mut named {
                if let Some(sigma) = noise {
                    script.noise_sigma = sigma;
                }
                if !scripts.is_empty() {
                    if let Some(s) = seed {
                        script.seed = s;
                    }
                }
                let demo = generate_demo(script, &reg)?;
                let path = write_demo(&out, name, &demo)?;
                emit_output(None, &format!("{}\n", path.display()), "gen")?;
            }
            Ok(())
        }
        Command::Ground { trace, shared, out } => {
            let config = apply_shared(config, &shared)?;
            let t = load_trace(&trace, &config.demo_registry()?)?;
            let states =
                ground_trace(&t, &config.grounding).map_err(|e| CliError::input("ground", e))?;
            emit_output(out.as_deref(), &to_json(&states), "ground")
        }
        Command::Segment { trace, shared, out } => {
            let config = apply_shared(config, &shared)?;
            let t = load_trace(&trace, &config.demo_registry()?)?;
            emit_output(out.as_deref(), &to_json(&segments(&t, &config)?), "segment")
        }
        Command::Learn {
            traces,
            append,
            out,
            repair,
            shared,
        } => {
            let mut config = apply_shared(config, &shared)?;
            config.repair |= repair;
            let reg = config.demo_registry()?;
            let loaded: Vec<(String, _)> = traces
                .iter()
                .map(|p| Ok((p.display().to_string(), load_trace(p, &reg)?)))
                .collect::<CliResult<_>>()?;
            let (path, mut library) = match (append, out) {
                (Some(p), _) if p.exists() => {
                    let lib = load_library(&p)?;
                    (p, lib)
                }
                (Some(p), _) | (None, Some(p)) => (p, OperatorLibrary::new()),
                (None, None) => unreachable!("clap requires --append or --out"),
            };
            learn_into(
                &mut library,
                loaded.iter().map(|(n, t)| (n.as_str(), t)),
                &config,
            )?;
            write_text(&path, &(library.to_json() + "\n"), "learn")?;
            log::info!("{} operators in {}", library.len(), path.display());
            Ok(())
        }
        Command::Emit {
            library,
            out,
            goal,
            exec_registry,
            problem_out,
        } => {
            let lib = load_library(&library)?;
            emit_output(out.as_deref(), &domain_text(&lib)?, "emit")?;
            if let Some(g) = goal {
                let mut config = config;
                if exec_registry.is_some() {
                    config.exec_registry = exec_registry;
                }
                let problem = goal_problem(&g, config.exec_registry()?)?;
                let text = problem_text(&problem, &goal_name(Some(&g)))?;
                emit_output(problem_out.as_deref(), &text, "emit")?;
            }
            Ok(())
        }
        Command::Plan {
            library,
            domain,
            problem,
            mode,
            mutex_validate,
            export_pddl,
            max_expansions,
            out,
        } => {
            let (lib, hierarchy) = match (library, domain) {
                (Some(l), _) => (load_library(&l)?, TypeHierarchy::default()),
                (None, Some(d)) => pddl_library(&d)?,
                (None, None) => unreachable!("clap requires --library or --domain"),
            };
            let p = problem_from(&problem, &config, &hierarchy)?;
            if let Some(dir) = &export_pddl {
                write_text(&dir.join("domain.pddl"), &domain_text(&lib)?, "emit")?;
                let name = goal_name(problem.goal.as_deref().or(problem.problem.as_deref()));
                write_text(&dir.join("problem.pddl"), &problem_text(&p, &name)?, "emit")?;
            }
            let mode = mode.unwrap_or(config.mode).into();
            let mutex = mutex_validate || config.mutex_validate;
            let file = plan(
                &lib,
                &p,
                mode,
                mutex,
                max_expansions.or(config.max_expansions),
            )?;
            emit_output(out.as_deref(), &to_json(&file), "plan")?;
            check_report(&file.validation)
        }
        Command::Validate {
            plan,
            problem,
            mutex,
            out,
        } => {
            let p = problem_from(&problem, &config, &TypeHierarchy::default())?;
            let report = replay(&p, &load_plan(&plan)?, mutex)?;
            emit_output(out.as_deref(), &to_json(&report), "validate")?;
            check_report(&report)
        }
        Command::Pipeline {
            synth_corpus,
            traces,
            seed,
            goal,
            out,
            demo_registry,
            exec_registry,
            grounding,
            debounce,
            repair,
            mode,
            mutex_validate,
            max_expansions,
        } => {
            let mut config = config;
            config.demo_registry = demo_registry.or(config.demo_registry);
            config.exec_registry = exec_registry.or(config.exec_registry);
            config.grounding = load_grounding(grounding.as_deref(), config.grounding)?;
            config.debounce = debounce.unwrap_or(config.debounce);
            config.repair |= repair;
            config.mode = mode.unwrap_or(config.mode);
            config.goal = goal.or(config.goal);
            config.out = out.or(config.out);
            config.seed = seed.unwrap_or(config.seed);
            config.mutex_validate |= mutex_validate;
            config.max_expansions = max_expansions.or(config.max_expansions);
            run_pipeline(&config, synth_corpus, &traces)
        }
    }
}

fn check_report(report: &demo2pddl::planner::ValidationReport) -> CliResult<()> {
    if report.valid {
        Ok(())
    } else {
        Err(CliError::Validation(report.reason.clone()))
    }
}

#[derive(serde::Serialize)]
struct DemoSegments<'a> {
    trace: &'a str,
    segments: &'a [demo2pddl::segmentation::ActivitySegment],
}

#[derive(serde::Serialize)]
struct Validation<'a> {
    domain: &'a demo2pddl::planner::ValidationReport,
    mutex: &'a demo2pddl::planner::ValidationReport,
}

fn run_pipeline(config: &PipelineConfig, synth_corpus: bool, traces: &[PathBuf]) -> CliResult<()> {
    let goal = config
        .goal
        .clone()
        .ok_or_else(|| CliError::Config("--goal is required".into()))?;
    require(&goal)?;
    let out = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("demo2pddl-out"));
    let demo_reg = config.demo_registry()?;
    let problem = goal_problem(&goal, config.exec_registry()?)?;

    let named: Vec<(String, demo2pddl::trace::DemoTrace)> = if synth_corpus {
        let mut named = Vec::new();
        for (name, demo) in corpus(config.seed, &demo_reg)? {
            write_demo(&out.join("traces"), &name, &demo)?;
            named.push((name, demo.trace));
        }
        named
    } else if traces.is_empty() {
        return Err(CliError::Config(
            "give trace files or --synth-corpus".into(),
        ));
    } else {
        traces
            .iter()
            .map(|p| Ok((p.display().to_string(), load_trace(p, &demo_reg)?)))
            .collect::<CliResult<_>>()?
    };

    let mut library = OperatorLibrary::new();
    let segs = learn_into(
        &mut library,
        named.iter().map(|(n, t)| (n.as_str(), t)),
        config,
    )?;
    let segs: Vec<DemoSegments> = segs
        .iter()
        .map(|(n, s)| DemoSegments {
            trace: n,
            segments: s,
        })
        .collect();
    write_text(&out.join("segments.json"), &to_json(&segs), "segment")?;
    write_text(
        &out.join("library.json"),
        &(library.to_json() + "\n"),
        "learn",
    )?;
    write_text(&out.join("domain.pddl"), &domain_text(&library)?, "emit")?;
    write_text(
        &out.join("problem.pddl"),
        &problem_text(&problem, &goal_name(Some(&goal)))?,
        "emit",
    )?;

    let file = plan(
        &library,
        &problem,
        config.mode.into(),
        config.mutex_validate,
        config.max_expansions,
    )?;
    let plain = replay(&problem, &file.plan, false)?;
    let mutex = replay(&problem, &file.plan, true)?;
    write_text(&out.join("plan.json"), &to_json(&file), "plan")?;
    write_text(
        &out.join("validation.json"),
        &to_json(&Validation {
            domain: &plain,
            mutex: &mutex,
        }),
        "validate",
    )?;
    let mut summary = format!(
        "{} operators, plan of {} steps, cost {}, mutex-valid: {}\n",
        library.len(),
        file.plan.total_length,
        file.plan.total_cost,
        mutex.valid
    );
    for label in file.plan.labels() {
        summary.push_str(&format!("  {label}\n"));
    }
    emit_output(None, &summary, "pipeline")?;
    check_report(&file.validation)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
