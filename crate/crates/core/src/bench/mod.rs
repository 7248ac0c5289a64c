//! Batch runner: one episode per seed, in parallel, merged in seed order.

mod config;
mod table;

pub use config::{parse_seeds, BenchConfig, ConfigError, PolicyKind, PolicySpec, ScenarioSource};
pub use table::{
    emit_table, parse_csv, Aggregate, ResultRow, ResultTable, Status, TableError, TableFormat,
    COLUMNS,
};

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::domain::Scenario;
use crate::env::{idle_action, run_episode_with_limit, EnvError, Policy};
use crate::prior::PriorPolicy;
use crate::scenario::{generate_preset, load_scenario, ScenarioFileError};
use crate::solvers::{NearestPolicy, RhConfig, RollingHorizonPolicy, StaticSolver};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("cannot read scenario: {0}")]
    Scenario(#[from] ScenarioFileError),
    #[error("seed {seed}: {source}")]
    Episode { seed: u64, source: EnvError },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl BenchError {
    /// Whether the error comes from the inputs (settings or scenario file)
    /// rather than from running episodes.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            BenchError::Config(_) | BenchError::UnknownPreset(_) | BenchError::Scenario(_)
        )
    }
}

/// Builds the policy for one episode; `scenario` names the dataset for
/// rolling horizon presets.
pub fn make_policy(spec: &PolicySpec, scenario: &str, seed: u64) -> Box<dyn Policy + Send> {
    let rolling = || {
        spec.rolling
            .or_else(|| RhConfig::preset(scenario))
            .unwrap_or_default()
    };
    match spec.kind {
        PolicyKind::Idle => Box::new(|s: &crate::domain::WorldState| idle_action(s)),
        PolicyKind::Nearest => Box::new(NearestPolicy),
        PolicyKind::Prior => Box::new(PriorPolicy::new(spec.prior, seed)),
        PolicyKind::SaRh => Box::new(RollingHorizonPolicy::new(
            StaticSolver::Sa(spec.sa),
            rolling(),
            seed,
        )),
        PolicyKind::GaRh => Box::new(RollingHorizonPolicy::new(
            StaticSolver::Ga(spec.ga),
            rolling(),
            seed,
        )),
        PolicyKind::ExactRh => Box::new(RollingHorizonPolicy::new(
            StaticSolver::Exact(spec.exact),
            rolling(),
            seed,
        )),
    }
}

fn run_seed(
    config: &BenchConfig,
    file: Option<&Arc<Scenario>>,
    label: &str,
    seed: u64,
) -> Result<ResultRow, BenchError> {
    let scenario = match (file, &config.source) {
        (Some(s), _) => s.clone(),
        (None, ScenarioSource::Preset(name)) => Arc::new(
            generate_preset(name, seed).ok_or_else(|| BenchError::UnknownPreset(name.clone()))?,
        ),
        (None, ScenarioSource::File(_)) => unreachable!("file scenarios are loaded up front"),
    };
    let mut policy = make_policy(&config.policy, label, seed);
    let (summary, timed_out) =
        run_episode_with_limit(scenario, policy.as_mut(), seed, config.time_limit)
            .map_err(|source| BenchError::Episode { seed, source })?;
    Ok(ResultRow {
        scenario: label.to_string(),
        seed,
        policy: config.policy.kind.name().to_string(),
        obj: summary.objective,
        comp: summary.completion_rate,
        seconds: summary.wall_time,
        status: if timed_out {
            Status::TimedOut
        } else {
            Status::Ok
        },
    })
}

/// Runs one episode per seed. Presets are regenerated with each seed; a file
/// scenario is shared and the seed only drives the policy.
pub fn run_benchmark(config: &BenchConfig) -> Result<ResultTable, BenchError> {
    config.validate()?;
    let label = config.source.label();
    let file = match &config.source {
        ScenarioSource::File(path) => Some(Arc::new(load_scenario(path)?)),
        ScenarioSource::Preset(name) => {
            if generate_preset(name, 0).is_none() {
                return Err(BenchError::UnknownPreset(name.clone()));
            }
            None
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    // indexed collect keeps seed order whatever the completion order
    let rows = pool.install(|| {
        config
            .seeds
            .par_iter()
            .map(|&seed| run_seed(config, file.as_ref(), &label, seed))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(ResultTable { rows })
}
