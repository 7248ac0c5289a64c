use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    FleetEntry, MatrixError, ProfitMode, Request, Scenario, ScenarioError, StationGraph,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported scenario file version {found} (expected {FORMAT_VERSION})")]
    Version { found: u64 },
    #[error("field `stations.distance`: {0}")]
    Matrix(#[from] MatrixError),
    #[error("field `stations.distance`: expected {expected} entries, found {found}")]
    MatrixLength { expected: usize, found: usize },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
}

impl From<serde_json::Error> for ScenarioFileError {
    fn from(e: serde_json::Error) -> Self {
        ScenarioFileError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StationsFile {
    count: usize,
    /// Row-major I*I travel times.
    distance: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    stations: StationsFile,
    fleet: Vec<FleetEntry>,
    requests: Vec<Request>,
    horizon: u32,
    cost_rate: f64,
    #[serde(default = "default_profit")]
    profit: ProfitMode,
}

fn default_profit() -> ProfitMode {
    ProfitMode::Distance
}

#[derive(Deserialize)]
struct VersionProbe {
    version: Option<u64>,
}

pub fn to_json_string(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        version: FORMAT_VERSION,
        stations: StationsFile {
            count: scenario.station_count(),
            distance: scenario.graph.matrix().iter().flatten().copied().collect(),
        },
        fleet: scenario.fleet.clone(),
        requests: scenario.requests.clone(),
        horizon: scenario.horizon,
        cost_rate: scenario.cost_rate,
        profit: scenario.profit_mode,
    };
    serde_json::to_string_pretty(&file).expect("scenario serializes")
}

pub fn from_json_str(text: &str) -> Result<Scenario, ScenarioFileError> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    match probe.version {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(found) => return Err(ScenarioFileError::Version { found }),
        None => {
            return Err(ScenarioFileError::Parse {
                line: 1,
                column: 1,
                message: "missing field `version`".into(),
            })
        }
    }
    let file: ScenarioFile = serde_json::from_str(text)?;
    from_file(file)
}

/// Parses the in-memory JSON value form of a scenario (used for inline
/// scenarios on the wire).
pub fn from_json_value(value: serde_json::Value) -> Result<Scenario, ScenarioFileError> {
    from_json_str(&value.to_string())
}

fn from_file(file: ScenarioFile) -> Result<Scenario, ScenarioFileError> {
    let n = file.stations.count;
    if file.stations.distance.len() != n * n {
        return Err(ScenarioFileError::MatrixLength {
            expected: n * n,
            found: file.stations.distance.len(),
        });
    }
    let rows: Vec<Vec<u32>> = if n == 0 {
        Vec::new()
    } else {
        file.stations
            .distance
            .chunks(n)
            .map(<[u32]>::to_vec)
            .collect()
    };
    let graph = StationGraph::new(rows)?;
    let scenario = Scenario {
        graph,
        fleet: file.fleet,
        requests: file.requests,
        horizon: file.horizon,
        cost_rate: file.cost_rate,
        profit_mode: file.profit,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioFileError> {
    let path = path.as_ref();
    let mut text = to_json_string(scenario);
    text.push('\n');
    fs::write(path, text).map_err(|source| ScenarioFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json_str(&text)
}
