use std::path::{Path, PathBuf};

use clap::ValueEnum;
use demo2pddl::grounding::GroundingConfig;
use demo2pddl::ontology::{load_registry, EnvironmentRegistry};
use demo2pddl::planner::SearchMode;
use demo2pddl::segmentation::DEFAULT_DEBOUNCE;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "DEMO2PDDL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Cost,
    Length,
    Greedy,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Cost => SearchMode::MinCost,
            Mode::Length => SearchMode::MinLength,
            Mode::Greedy => SearchMode::Greedy,
        }
    }
}

/// Settings shared by all subcommands. Loaded from `--config` or the
/// `DEMO2PDDL_CONFIG` file; command line flags take precedence.
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub demo_registry: Option<PathBuf>,
    pub exec_registry: Option<PathBuf>,
    pub grounding: GroundingConfig,
    pub debounce: usize,
    pub repair: bool,
    pub mode: Mode,
    pub goal: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub mutex_validate: bool,
    pub max_expansions: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            demo_registry: None,
            exec_registry: None,
            grounding: GroundingConfig::default(),
            debounce: DEFAULT_DEBOUNCE,
            repair: false,
            mode: Mode::Cost,
            goal: None,
            out: None,
            seed: 7,
            mutex_validate: false,
            max_expansions: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(explicit: Option<&Path>) -> CliResult<Self> {
        let from_env = std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        let Some(path) = explicit.map(Path::to_path_buf).or(from_env) else {
            return Ok(PipelineConfig::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.demo_registry,
            &mut config.exec_registry,
            &mut config.goal,
            &mut config.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config
            .grounding
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn demo_registry(&self) -> CliResult<EnvironmentRegistry> {
        registry(
            self.demo_registry.as_deref(),
            EnvironmentRegistry::demonstration,
        )
    }

    pub fn exec_registry(&self) -> CliResult<EnvironmentRegistry> {
        registry(
            self.exec_registry.as_deref(),
            EnvironmentRegistry::execution,
        )
    }
}

fn registry(
    path: Option<&Path>,
    builtin: fn() -> EnvironmentRegistry,
) -> CliResult<EnvironmentRegistry> {
    match path {
        None => Ok(builtin()),
        Some(p) => {
            require(p)?;
            load_registry(p).map_err(|e| CliError::input("registry", e))
        }
    }
}

/// Files named by configuration must exist; a missing one is a config error.
pub fn require(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{} does not exist",
            path.display()
        )))
    }
}

pub fn load_grounding(
    path: Option<&Path>,
    fallback: GroundingConfig,
) -> CliResult<GroundingConfig> {
    let Some(path) = path else {
        return Ok(fallback);
    };
    require(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(e.to_string()))?;
    let config: GroundingConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}
