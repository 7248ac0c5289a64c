use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::domain::{RequestState, Scenario, StationGraph, WorldState};

/// A vehicle as seen by a static solver. `id` is its index in the world.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticVehicle {
    pub id: usize,
    pub start: usize,
    pub capacity: u32,
    /// First window slice at which the vehicle can act. A positive value
    /// means it is still travelling to `start` and unloads there at slice
    /// `join_time - 1`.
    pub join_time: u32,
    /// Local indices of requests already on board.
    pub preload: Vec<usize>,
}

/// A request as seen by a static solver. `id` is its index in the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRequest {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub val: f64,
    pub vol: u32,
    /// Local index of the carrying vehicle for preloaded requests.
    pub carrier: Option<usize>,
}

/// Frozen subproblem over window slices `0..horizon`. Every request is
/// available from slice 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticInstance {
    pub graph: Arc<StationGraph>,
    pub horizon: u32,
    pub vehicles: Vec<StaticVehicle>,
    pub requests: Vec<StaticRequest>,
    pub cost_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("vehicle {0}: join time beyond the window")]
    JoinTime(usize),
    #[error("vehicle {0}: preloaded volume exceeds capacity")]
    Overloaded(usize),
    #[error("vehicle {0}: preload list disagrees with request carriers")]
    Preload(usize),
    #[error("request {0}: station out of range")]
    Station(usize),
    #[error("request {0}: origin equals destination")]
    SelfLoop(usize),
    #[error("vehicle {0}: at its station with cargo destined there")]
    Undelivered(usize),
}

impl StaticInstance {
    pub fn check(&self) -> Result<(), InstanceError> {
        let n = self.graph.station_count();
        for (m, r) in self.requests.iter().enumerate() {
            if r.from >= n || r.to >= n {
                return Err(InstanceError::Station(m));
            }
            if r.from == r.to && r.carrier.is_none() {
                return Err(InstanceError::SelfLoop(m));
            }
        }
        for (k, v) in self.vehicles.iter().enumerate() {
            if v.join_time > self.horizon {
                return Err(InstanceError::JoinTime(k));
            }
            let mut load = 0;
            for &m in &v.preload {
                let r = self.requests.get(m).ok_or(InstanceError::Preload(k))?;
                if r.carrier != Some(k) {
                    return Err(InstanceError::Preload(k));
                }
                if v.join_time == 0 && r.to == v.start {
                    return Err(InstanceError::Undelivered(k));
                }
                load += r.vol;
            }
            if load > v.capacity {
                return Err(InstanceError::Overloaded(k));
            }
        }
        let carried = self.requests.iter().filter(|r| r.carrier.is_some()).count();
        let listed: usize = self.vehicles.iter().map(|v| v.preload.len()).sum();
        if carried != listed {
            return Err(InstanceError::Preload(self.vehicles.len()));
        }
        Ok(())
    }

    /// Requests still waiting to be picked up.
    pub fn open_requests(&self) -> impl Iterator<Item = usize> + '_ {
        self.requests
            .iter()
            .enumerate()
            .filter(|(_, r)| r.carrier.is_none())
            .map(|(m, _)| m)
    }

    pub fn mean_value(&self) -> f64 {
        if self.requests.is_empty() {
            0.0
        } else {
            self.requests.iter().map(|r| r.val).sum::<f64>() / self.requests.len() as f64
        }
    }
}

/// Freezes `state` into a static subproblem of `horizon` slices.
///
/// En-route vehicles join at their destination once they arrive; vehicles
/// that cannot arrive within the window are left out, together with their
/// cargo. Visible unassigned requests are available from slice 0. Requests
/// whose origin equals their destination are left out (they cost nothing to
/// serve and are handled by the driver).
pub fn build_static_window(state: &WorldState, horizon: u32) -> StaticInstance {
    let scenario: &Scenario = state.scenario();
    let mut vehicles = Vec::new();
    let mut requests = Vec::new();
    for (k, v) in state.vehicles().iter().enumerate() {
        if v.remaining > horizon {
            continue;
        }
        let local = vehicles.len();
        let mut preload = Vec::new();
        for m in state.onboard(k) {
            let r = &scenario.requests[m];
            preload.push(requests.len());
            requests.push(StaticRequest {
                id: m,
                from: r.from,
                to: r.to,
                val: r.val,
                vol: r.vol,
                carrier: Some(local),
            });
        }
        vehicles.push(StaticVehicle {
            id: k,
            start: v.destination,
            capacity: v.capacity,
            join_time: v.remaining,
            preload,
        });
    }
    for m in state.visible_requests() {
        let r = &scenario.requests[m];
        if state.request_status()[m].state == RequestState::Unassigned && r.from != r.to {
            requests.push(StaticRequest {
                id: m,
                from: r.from,
                to: r.to,
                val: r.val,
                vol: r.vol,
                carrier: None,
            });
        }
    }
    StaticInstance {
        graph: Arc::new(scenario.graph.clone()),
        horizon,
        vehicles,
        requests,
        cost_rate: scenario.cost_rate,
    }
}

/// Draws a small instance for solver cross-checks: symmetric distances in
/// `1..=3` closed under shortest paths, unit volumes, capacities 1 or 2,
/// integer values in `1..=6`, cost rate 0, 0.3 or 0.5. Some vehicles start
/// en route and some carry one request.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    stations: usize,
    vehicles: usize,
    requests: usize,
    horizon: u32,
) -> StaticInstance {
    assert!(stations >= 2 && vehicles >= 1);
    let mut raw = vec![vec![0i64; stations]; stations];
    for i in 0..stations {
        for j in i + 1..stations {
            let d = rng.gen_range(1..=3);
            raw[i][j] = d;
            raw[j][i] = d;
        }
    }
    let graph = StationGraph::closed(&raw).expect("well formed");
    let mut inst = StaticInstance {
        graph: Arc::new(graph),
        horizon,
        vehicles: Vec::new(),
        requests: Vec::new(),
        cost_rate: [0.0, 0.3, 0.5][rng.gen_range(0..3)],
    };
    let draw_request = |rng: &mut R| {
        let from = rng.gen_range(0..stations);
        let mut to = rng.gen_range(0..stations - 1);
        if to >= from {
            to += 1;
        }
        (from, to, rng.gen_range(1..=6) as f64)
    };
    for k in 0..vehicles {
        let start = rng.gen_range(0..stations);
        let join_time = if rng.gen_bool(0.3) {
            rng.gen_range(1..=2.min(horizon.max(1)))
        } else {
            0
        };
        let mut v = StaticVehicle {
            id: k,
            start,
            capacity: rng.gen_range(1..=2),
            join_time,
            preload: Vec::new(),
        };
        if inst.requests.len() < requests && rng.gen_bool(0.25) {
            let (from, mut to, val) = draw_request(rng);
            if join_time == 0 && to == start {
                to = (start + 1) % stations;
            }
            v.preload.push(inst.requests.len());
            inst.requests.push(StaticRequest {
                id: inst.requests.len(),
                from,
                to,
                val,
                vol: 1,
                carrier: Some(k),
            });
        }
        inst.vehicles.push(v);
    }
    while inst.requests.len() < requests {
        let (from, to, val) = draw_request(rng);
        inst.requests.push(StaticRequest {
            id: inst.requests.len(),
            from,
            to,
            val,
            vol: 1,
            carrier: None,
        });
    }
    inst
}
