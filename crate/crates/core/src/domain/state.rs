use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vehicle {
    pub capacity: u32,
    /// Free space, `capacity` minus the volume currently on board.
    pub space: u32,
    /// Station the vehicle is at (when `remaining == 0`) or heading to.
    pub destination: usize,
    /// Slices left until arrival; zero means the vehicle is at a station.
    pub remaining: u32,
}

impl Vehicle {
    #[inline]
    pub fn at_station(&self) -> bool {
        self.remaining == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestState {
    Unassigned,
    Picked,
    Delivered,
}

/// Runtime status of one request. `carrier` is set exactly when the request
/// has left the unassigned state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RequestStatus {
    pub state: RequestState,
    pub carrier: Option<usize>,
}

impl RequestStatus {
    pub const UNASSIGNED: RequestStatus = RequestStatus {
        state: RequestState::Unassigned,
        carrier: None,
    };
}

/// Per-request decision: load onto a vehicle, or defer to a later slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RequestAction {
    Assign(usize),
    Defer,
}

impl RequestAction {
    /// Wire encoding: vehicle index, or -1 for defer.
    pub fn to_wire(self) -> i64 {
        match self {
            RequestAction::Assign(k) => k as i64,
            RequestAction::Defer => -1,
        }
    }

    pub fn from_wire(code: i64) -> Option<Self> {
        match code {
            -1 => Some(RequestAction::Defer),
            k if k >= 0 => Some(RequestAction::Assign(k as usize)),
            _ => None,
        }
    }
}

impl Serialize for RequestAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_wire())
    }
}

impl<'de> Deserialize<'de> for RequestAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let code = i64::deserialize(d)?;
        RequestAction::from_wire(code)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid request action {code}")))
    }
}

/// One slice worth of decisions. Keys must be exactly the decidable
/// requests and vehicles of the state it is applied to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointAction {
    pub request_actions: BTreeMap<usize, RequestAction>,
    pub vehicle_actions: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("request {0} is not decidable (invisible, already assigned, or out of range)")]
    NotDecidable(usize),
    #[error("vehicle index {0} out of range")]
    InvalidVehicle(usize),
    #[error("inconsistent state: {0}")]
    Inconsistent(String),
}

/// Mutable simulation state at slice `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    scenario: Arc<Scenario>,
    pub(crate) seed: u64,
    pub(crate) t: u32,
    pub(crate) vehicles: Vec<Vehicle>,
    pub(crate) requests: Vec<RequestStatus>,
    pub(crate) cumulative_objective: f64,
    pub(crate) delivered_count: usize,
}

impl WorldState {
    /// Fresh state at t = 0. The scenario is assumed to be valid.
    pub(crate) fn initial(scenario: Arc<Scenario>, seed: u64) -> Self {
        let vehicles = scenario
            .fleet
            .iter()
            .map(|f| Vehicle {
                capacity: f.capacity,
                space: f.capacity,
                destination: f.station,
                remaining: 0,
            })
            .collect();
        let requests = vec![RequestStatus::UNASSIGNED; scenario.request_count()];
        Self {
            scenario,
            seed,
            t: 0,
            vehicles,
            requests,
            cumulative_objective: 0.0,
            delivered_count: 0,
        }
    }

    /// Rebuilds a mid-episode state from its parts, checking the load and
    /// carrier invariants. The objective accumulated so far is `objective`.
    pub fn restore(
        scenario: Arc<Scenario>,
        t: u32,
        vehicles: Vec<Vehicle>,
        requests: Vec<RequestStatus>,
        objective: f64,
    ) -> Result<Self, DomainError> {
        if vehicles.len() != scenario.vehicle_count() {
            return Err(DomainError::Inconsistent(format!(
                "{} vehicles given, scenario has {}",
                vehicles.len(),
                scenario.vehicle_count()
            )));
        }
        if requests.len() != scenario.request_count() {
            return Err(DomainError::Inconsistent(format!(
                "{} request states given, scenario has {}",
                requests.len(),
                scenario.request_count()
            )));
        }
        let delivered_count = requests
            .iter()
            .filter(|r| r.state == RequestState::Delivered)
            .count();
        let state = Self {
            scenario,
            seed: 0,
            t,
            vehicles,
            requests,
            cumulative_objective: objective,
            delivered_count,
        };
        state.check_invariants()?;
        Ok(state)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn scenario_arc(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn request_status(&self) -> &[RequestStatus] {
        &self.requests
    }

    pub fn cumulative_objective(&self) -> f64 {
        self.cumulative_objective
    }

    pub fn delivered_count(&self) -> usize {
        self.delivered_count
    }

    pub fn is_done(&self) -> bool {
        self.t >= self.scenario.horizon
    }

    #[inline]
    pub fn is_visible(&self, m: usize) -> bool {
        self.scenario.requests[m].time <= self.t
    }

    /// R^t: visible unassigned requests in ascending index order.
    pub fn decidable_requests(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.requests.len()).filter(move |&m| {
            self.is_visible(m) && self.requests[m].state == RequestState::Unassigned
        })
    }

    /// V^t: vehicles sitting at a station, ascending.
    pub fn decidable_vehicles(&self) -> impl Iterator<Item = usize> + '_ {
        self.vehicles
            .iter()
            .enumerate()
            .filter(|(_, v)| v.at_station())
            .map(|(k, _)| k)
    }

    pub fn visible_requests(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.requests.len()).filter(move |&m| self.is_visible(m))
    }

    pub fn is_decidable_request(&self, m: usize) -> bool {
        m < self.requests.len()
            && self.is_visible(m)
            && self.requests[m].state == RequestState::Unassigned
    }

    /// Requests on board vehicle `k`.
    pub fn onboard(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.requests
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.state == RequestState::Picked && s.carrier == Some(k))
            .map(|(m, _)| m)
    }

    /// Feasible choices for request `m`; defer is always last.
    pub fn feasible_request_actions(&self, m: usize) -> Result<Vec<RequestAction>, DomainError> {
        if !self.is_decidable_request(m) {
            return Err(DomainError::NotDecidable(m));
        }
        let req = &self.scenario.requests[m];
        let mut out: Vec<RequestAction> = self
            .vehicles
            .iter()
            .enumerate()
            .filter(|(_, v)| v.at_station() && v.destination == req.from && v.space >= req.vol)
            .map(|(k, _)| RequestAction::Assign(k))
            .collect();
        out.push(RequestAction::Defer);
        Ok(out)
    }

    /// All stations when the vehicle is at a station, nothing while en route.
    pub fn feasible_vehicle_destinations(&self, k: usize) -> Result<Vec<usize>, DomainError> {
        let v = self.vehicles.get(k).ok_or(DomainError::InvalidVehicle(k))?;
        if v.at_station() {
            Ok((0..self.scenario.station_count()).collect())
        } else {
            Ok(Vec::new())
        }
    }

    /// Load conservation and carrier consistency.
    pub fn check_invariants(&self) -> Result<(), DomainError> {
        let mut load = vec![0u64; self.vehicles.len()];
        for (m, s) in self.requests.iter().enumerate() {
            match (s.state, s.carrier) {
                (RequestState::Unassigned, None) => {}
                (RequestState::Unassigned, Some(_)) => {
                    return Err(DomainError::Inconsistent(format!(
                        "request {m} unassigned but has a carrier"
                    )))
                }
                (_, None) => {
                    return Err(DomainError::Inconsistent(format!(
                        "request {m} has no carrier"
                    )))
                }
                (state, Some(k)) => {
                    if k >= self.vehicles.len() {
                        return Err(DomainError::Inconsistent(format!(
                            "request {m} carried by unknown vehicle {k}"
                        )));
                    }
                    if state == RequestState::Picked {
                        load[k] += self.scenario.requests[m].vol as u64;
                    }
                }
            }
        }
        for (k, v) in self.vehicles.iter().enumerate() {
            if v.space > v.capacity || load[k] + v.space as u64 != v.capacity as u64 {
                return Err(DomainError::Inconsistent(format!(
                    "vehicle {k}: space {} + load {} != capacity {}",
                    v.space, load[k], v.capacity
                )));
            }
            if v.destination >= self.scenario.station_count() {
                return Err(DomainError::Inconsistent(format!(
                    "vehicle {k}: destination out of range"
                )));
            }
        }
        Ok(())
    }
}
