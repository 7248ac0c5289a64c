use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::StationGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfitMode {
    /// Request value equals the travel time between its origin and destination.
    Distance,
    /// Every request carries the same fixed value.
    Fixed,
}

/// Initial placement and capacity of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FleetEntry {
    pub station: usize,
    pub capacity: u32,
}

/// Static description of one request. Its runtime state lives in
/// [`WorldState`](super::WorldState).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub from: usize,
    pub to: usize,
    pub val: f64,
    pub vol: u32,
    /// First time slice at which the request is visible.
    pub time: u32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("fleet is empty")]
    EmptyFleet,
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("cost rate {0} must be finite and non-negative")]
    BadCostRate(f64),
    #[error("vehicle {vehicle}: station {station} out of range")]
    VehicleStation { vehicle: usize, station: usize },
    #[error("vehicle {vehicle}: capacity must be positive")]
    VehicleCapacity { vehicle: usize },
    #[error("request {request}: station {station} out of range")]
    RequestStation { request: usize, station: usize },
    #[error("request {request}: appearance time {time} outside [1, {horizon}]")]
    RequestTime {
        request: usize,
        time: u32,
        horizon: u32,
    },
    #[error("request {request}: volume must be positive")]
    RequestVolume { request: usize },
    #[error("request {request}: value {value} must be finite and non-negative")]
    RequestValue { request: usize, value: f64 },
}

/// Immutable problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub graph: StationGraph,
    pub fleet: Vec<FleetEntry>,
    pub requests: Vec<Request>,
    pub horizon: u32,
    pub cost_rate: f64,
    pub profit_mode: ProfitMode,
}

impl Scenario {
    pub fn station_count(&self) -> usize {
        self.graph.station_count()
    }

    pub fn vehicle_count(&self) -> usize {
        self.fleet.len()
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }

    /// Checks every instance invariant and reports the first one violated.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let stations = self.station_count();
        if self.fleet.is_empty() {
            return Err(ScenarioError::EmptyFleet);
        }
        if self.horizon == 0 {
            return Err(ScenarioError::ZeroHorizon);
        }
        if !(self.cost_rate.is_finite() && self.cost_rate >= 0.0) {
            return Err(ScenarioError::BadCostRate(self.cost_rate));
        }
        for (k, v) in self.fleet.iter().enumerate() {
            if v.station >= stations {
                return Err(ScenarioError::VehicleStation {
                    vehicle: k,
                    station: v.station,
                });
            }
            if v.capacity == 0 {
                return Err(ScenarioError::VehicleCapacity { vehicle: k });
            }
        }
        for (m, r) in self.requests.iter().enumerate() {
            for station in [r.from, r.to] {
                if station >= stations {
                    return Err(ScenarioError::RequestStation {
                        request: m,
                        station,
                    });
                }
            }
            if r.time == 0 || r.time > self.horizon {
                return Err(ScenarioError::RequestTime {
                    request: m,
                    time: r.time,
                    horizon: self.horizon,
                });
            }
            if r.vol == 0 {
                return Err(ScenarioError::RequestVolume { request: m });
            }
            if !(r.val.is_finite() && r.val >= 0.0) {
                return Err(ScenarioError::RequestValue {
                    request: m,
                    value: r.val,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Scenario {
        Scenario {
            graph: StationGraph::new(vec![vec![0, 2], vec![2, 0]]).unwrap(),
            fleet: vec![FleetEntry {
                station: 0,
                capacity: 3,
            }],
            requests: vec![Request {
                from: 0,
                to: 1,
                val: 2.0,
                vol: 1,
                time: 1,
            }],
            horizon: 5,
            cost_rate: 0.0,
            profit_mode: ProfitMode::Distance,
        }
    }

    #[test]
    fn valid_scenario_passes() {
        tiny().validate().unwrap();
    }

    #[test]
    fn reports_first_violation() {
        let mut s = tiny();
        s.fleet.clear();
        assert_eq!(s.validate(), Err(ScenarioError::EmptyFleet));

        let mut s = tiny();
        s.requests[0].time = 0;
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::RequestTime { request: 0, .. })
        ));

        let mut s = tiny();
        s.requests[0].to = 7;
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::RequestStation { station: 7, .. })
        ));
    }
}
