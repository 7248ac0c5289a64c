use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::prior::PriorConfig;
use crate::solvers::{ExactLimits, GAParams, ParamError, RhConfig, SAParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown policy `{0}` (expected idle, nearest, prior, sa-rh, ga-rh or exact-rh)")]
    UnknownPolicy(String),
    #[error("no seeds given")]
    NoSeeds,
    #[error("bad seed range `{0}` (expected a..b or a single seed)")]
    SeedRange(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("rolling horizon window and replan interval must be positive")]
    Rolling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// Defers every request and keeps every vehicle where it is.
    Idle,
    Nearest,
    Prior,
    SaRh,
    GaRh,
    ExactRh,
}

impl PolicyKind {
    pub const NAMES: [&'static str; 6] = ["idle", "nearest", "prior", "sa-rh", "ga-rh", "exact-rh"];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Idle => "idle",
            PolicyKind::Nearest => "nearest",
            PolicyKind::Prior => "prior",
            PolicyKind::SaRh => "sa-rh",
            PolicyKind::GaRh => "ga-rh",
            PolicyKind::ExactRh => "exact-rh",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "idle" => PolicyKind::Idle,
            "nearest" => PolicyKind::Nearest,
            "prior" => PolicyKind::Prior,
            "sa-rh" => PolicyKind::SaRh,
            "ga-rh" => PolicyKind::GaRh,
            "exact-rh" => PolicyKind::ExactRh,
            other => return Err(ConfigError::UnknownPolicy(other.to_string())),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A policy name with every tunable parameter. Only the ones the policy
/// uses matter.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub prior: PriorConfig,
    pub sa: SAParams,
    pub ga: GAParams,
    pub exact: ExactLimits,
    /// `None` picks the dataset preset, or the default for unknown names.
    pub rolling: Option<RhConfig>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            prior: PriorConfig::default(),
            sa: SAParams::default(),
            ga: GAParams::default(),
            exact: ExactLimits::default(),
            rolling: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sa.validate()?;
        self.ga.validate()?;
        if self
            .rolling
            .is_some_and(|r| r.horizon == 0 || r.replan == 0)
        {
            return Err(ConfigError::Rolling);
        }
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped.
    ///
    /// Keys: `beta`, `pickup_coefficient`, `sa.initial_temp`,
    /// `sa.final_temp`, `sa.cooling`, `sa.max_iters`, `ga.population`,
    /// `ga.generations`, `ga.mutation_rate`, `ga.fitness_scale`,
    /// `exact.max_stations`, `exact.max_vehicles`, `exact.max_requests`,
    /// `exact.max_horizon`, `rh.horizon`, `rh.replan`. Returns
    /// `time_limit` (seconds) separately when present.
    pub fn apply_config(&mut self, text: &str) -> Result<Option<Duration>, ConfigError> {
        let mut time_limit = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Line {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || value.parse::<f64>().map_err(|e| err(format!("{key}: {e}")));
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|e| err(format!("{key}: {e}")))
            };
            match key {
                "beta" => self.prior.beta = float()?,
                "pickup_coefficient" => self.prior.pickup_coefficient = float()?,
                "sa.initial_temp" => self.sa.initial_temp = float()?,
                "sa.final_temp" => self.sa.final_temp = float()?,
                "sa.cooling" => self.sa.cooling = float()?,
                "sa.max_iters" => self.sa.max_iters = int()?,
                "ga.population" => self.ga.population = int()?,
                "ga.generations" => self.ga.generations = int()?,
                "ga.mutation_rate" => self.ga.mutation_rate = float()?,
                "ga.fitness_scale" => self.ga.fitness_scale = Some(float()?),
                "exact.max_stations" => self.exact.max_stations = int()?,
                "exact.max_vehicles" => self.exact.max_vehicles = int()?,
                "exact.max_requests" => self.exact.max_requests = int()?,
                "exact.max_horizon" => self.exact.max_horizon = int()? as u32,
                "rh.horizon" => {
                    self.rolling.get_or_insert_with(RhConfig::default).horizon = int()? as u32
                }
                "rh.replan" => {
                    self.rolling.get_or_insert_with(RhConfig::default).replan = int()? as u32
                }
                "time_limit" => time_limit = Some(Duration::from_secs_f64(float()?)),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        self.validate()?;
        Ok(time_limit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioSource {
    File(PathBuf),
    /// A synthetic preset, regenerated for every seed.
    Preset(String),
}

impl ScenarioSource {
    /// Name used in the result table and for rolling horizon presets.
    pub fn label(&self) -> String {
        match self {
            ScenarioSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            ScenarioSource::Preset(name) => name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub source: ScenarioSource,
    pub policy: PolicySpec,
    pub seeds: Vec<u64>,
    /// Episodes running longer are cut short and marked timed out.
    pub time_limit: Option<Duration>,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        self.policy.validate()
    }
}

/// Parses `a..b` (half open), `a..=b` or a single seed.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError::SeedRange(text.to_string());
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = text.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        vec![num(text)?]
    };
    if seeds.is_empty() {
        return Err(ConfigError::NoSeeds);
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap(), [0, 1, 2]);
        assert_eq!(parse_seeds("5..=6").unwrap(), [5, 6]);
        assert_eq!(parse_seeds("42").unwrap(), [42]);
        assert_eq!(parse_seeds("3..3"), Err(ConfigError::NoSeeds));
        assert!(matches!(
            parse_seeds("a..b"),
            Err(ConfigError::SeedRange(_))
        ));
    }

    #[test]
    fn policy_names_round_trip() {
        for name in PolicyKind::NAMES {
            assert_eq!(name.parse::<PolicyKind>().unwrap().name(), name);
        }
        assert_eq!(
            "mapt".parse::<PolicyKind>(),
            Err(ConfigError::UnknownPolicy("mapt".into()))
        );
    }

    #[test]
    fn config_lines() {
        let mut spec = PolicySpec::new(PolicyKind::SaRh);
        let text = "# tuning\nbeta = 0.05\nsa.cooling=0.95\n\nga.population=12\ntime_limit=2.5 # seconds\n";
        let limit = spec.apply_config(text).unwrap();
        assert_eq!(spec.prior.beta, 0.05);
        assert_eq!(spec.sa.cooling, 0.95);
        assert_eq!(spec.ga.population, 12);
        assert_eq!(spec.rolling, None);
        assert_eq!(limit, Some(Duration::from_millis(2500)));

        spec.apply_config("rh.horizon=8\nrh.replan=4").unwrap();
        assert_eq!(
            spec.rolling,
            Some(RhConfig {
                horizon: 8,
                replan: 4
            })
        );
    }

    #[test]
    fn config_errors() {
        let mut spec = PolicySpec::new(PolicyKind::SaRh);
        assert!(matches!(
            spec.apply_config("beta"),
            Err(ConfigError::Line { line: 1, .. })
        ));
        assert!(matches!(
            spec.apply_config("\nfoo=1"),
            Err(ConfigError::Line { line: 2, .. })
        ));
        assert!(matches!(
            spec.apply_config("sa.cooling=x"),
            Err(ConfigError::Line { .. })
        ));
        assert_eq!(
            spec.apply_config("sa.cooling=1.5"),
            Err(ConfigError::Param(ParamError::Cooling))
        );
        assert_eq!(
            PolicySpec::new(PolicyKind::SaRh).apply_config("rh.replan=0"),
            Err(ConfigError::Rolling)
        );
    }
}
