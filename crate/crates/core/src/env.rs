//! The per-slice scheduler: assign, dispatch, move, unload.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    JointAction, RequestAction, RequestState, RequestStatus, Scenario, ScenarioError, SliceRecord,
    WorldState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "index", rename_all = "lowercase")]
pub enum Entity {
    Request(usize),
    Vehicle(usize),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Request(m) => write!(f, "request {m}"),
            Entity::Vehicle(k) => write!(f, "vehicle {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("rejected action for {entity}: {reason}")]
    Rejected { entity: Entity, reason: String },
    #[error("episode already finished at t={0}")]
    Finished(u32),
    #[error("policy action rejected at step {step}: {source}")]
    Policy {
        step: u32,
        #[source]
        source: Box<EnvError>,
    },
}

impl EnvError {
    fn rejected(entity: Entity, reason: impl Into<String>) -> Self {
        EnvError::Rejected {
            entity,
            reason: reason.into(),
        }
    }

    /// The entity blamed for a rejected action, if any.
    pub fn offending_entity(&self) -> Option<Entity> {
        match self {
            EnvError::Rejected { entity, .. } => Some(*entity),
            EnvError::Policy { source, .. } => source.offending_entity(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Pickup {
        t: u32,
        request: usize,
        vehicle: usize,
    },
    Dispatch {
        t: u32,
        vehicle: usize,
        from: usize,
        to: usize,
        distance: u32,
    },
    Arrival {
        t: u32,
        vehicle: usize,
        station: usize,
    },
    Delivery {
        t: u32,
        request: usize,
        vehicle: usize,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub next_state: WorldState,
    pub reward: f64,
    pub done: bool,
    pub events: Vec<Event>,
    pub record: SliceRecord,
}

/// Feasibility masks. Request rows are indexed by vehicle with defer as the
/// final column; every vehicle gets a station row (all false while en route).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionMasks {
    pub requests: BTreeMap<usize, Vec<bool>>,
    pub vehicles: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub objective: f64,
    pub completion_rate: f64,
    pub wall_time: f64,
    pub seed: u64,
    pub rewards: Vec<f64>,
    pub history: Vec<SliceRecord>,
    pub delivered: usize,
}

/// Anything that maps a state to a joint action.
pub trait Policy {
    fn act(&mut self, state: &WorldState) -> JointAction;
}

impl<F> Policy for F
where
    F: FnMut(&WorldState) -> JointAction,
{
    fn act(&mut self, state: &WorldState) -> JointAction {
        self(state)
    }
}

pub fn reset(scenario: Arc<Scenario>, seed: u64) -> Result<WorldState, EnvError> {
    scenario.validate()?;
    Ok(WorldState::initial(scenario, seed))
}

/// Pure step: validates, then returns the successor. `state` is untouched.
pub fn step(state: &WorldState, action: &JointAction) -> Result<StepResult, EnvError> {
    let mut next = state.clone();
    let (reward, events, record) = step_in_place(&mut next, action)?;
    let done = next.is_done();
    Ok(StepResult {
        next_state: next,
        reward,
        done,
        events,
        record,
    })
}

/// Checks every entry of `action` against `state` without mutating anything.
pub fn validate_action(state: &WorldState, action: &JointAction) -> Result<(), EnvError> {
    if state.is_done() {
        return Err(EnvError::Finished(state.t()));
    }
    let scenario = state.scenario();
    let vehicles = state.vehicles();

    for &m in action.request_actions.keys() {
        if !state.is_decidable_request(m) {
            return Err(EnvError::rejected(
                Entity::Request(m),
                "not a decidable request",
            ));
        }
    }
    for m in state.decidable_requests() {
        if !action.request_actions.contains_key(&m) {
            return Err(EnvError::rejected(
                Entity::Request(m),
                "missing request action",
            ));
        }
    }
    for &k in action.vehicle_actions.keys() {
        if k >= vehicles.len() || !vehicles[k].at_station() {
            return Err(EnvError::rejected(
                Entity::Vehicle(k),
                "not a decidable vehicle",
            ));
        }
    }
    for k in state.decidable_vehicles() {
        if !action.vehicle_actions.contains_key(&k) {
            return Err(EnvError::rejected(
                Entity::Vehicle(k),
                "missing vehicle action",
            ));
        }
    }

    // cumulative capacity in ascending request order
    let mut space: Vec<u32> = vehicles.iter().map(|v| v.space).collect();
    for (&m, &a) in &action.request_actions {
        if let RequestAction::Assign(k) = a {
            let req = &scenario.requests[m];
            let Some(v) = vehicles.get(k) else {
                return Err(EnvError::rejected(
                    Entity::Request(m),
                    format!("unknown vehicle {k}"),
                ));
            };
            if !v.at_station() || v.destination != req.from {
                return Err(EnvError::rejected(
                    Entity::Request(m),
                    format!("vehicle {k} is not at origin station {}", req.from),
                ));
            }
            if space[k] < req.vol {
                return Err(EnvError::rejected(
                    Entity::Request(m),
                    format!(
                        "vehicle {k} has {} free space, request needs {}",
                        space[k], req.vol
                    ),
                ));
            }
            space[k] -= req.vol;
        }
    }
    let stations = scenario.station_count();
    for (&k, &dest) in &action.vehicle_actions {
        if dest >= stations {
            return Err(EnvError::rejected(
                Entity::Vehicle(k),
                format!("station {dest} out of range"),
            ));
        }
    }
    Ok(())
}

/// Validates then applies `action`, returning (reward, events, record).
/// On error the state is left exactly as it was.
pub fn step_in_place(
    state: &mut WorldState,
    action: &JointAction,
) -> Result<(f64, Vec<Event>, SliceRecord), EnvError> {
    validate_action(state, action)?;

    let scenario = state.scenario_arc().clone();
    let graph = &scenario.graph;
    let t = state.t;
    let mut events = Vec::new();
    let mut record = SliceRecord::default();

    // 1: assign
    for (&m, &a) in &action.request_actions {
        if let RequestAction::Assign(k) = a {
            state.requests[m] = RequestStatus {
                state: RequestState::Picked,
                carrier: Some(k),
            };
            state.vehicles[k].space -= scenario.requests[m].vol;
            events.push(Event::Pickup {
                t,
                request: m,
                vehicle: k,
            });
        }
    }

    // vehicles en route at the start of the slice; only these move in phase 3
    let en_route: Vec<bool> = state.vehicles.iter().map(|v| !v.at_station()).collect();

    // 2: dispatch
    for (&k, &dest) in &action.vehicle_actions {
        let v = &mut state.vehicles[k];
        let from = v.destination;
        let distance = graph.distance(from, dest);
        v.destination = dest;
        v.remaining = distance;
        record.leg_distances.push(distance);
        if dest != from {
            events.push(Event::Dispatch {
                t,
                vehicle: k,
                from,
                to: dest,
                distance,
            });
            if distance == 0 {
                events.push(Event::Arrival {
                    t,
                    vehicle: k,
                    station: dest,
                });
            }
        }
    }

    // 3: move
    for (k, v) in state.vehicles.iter_mut().enumerate() {
        if en_route[k] {
            v.remaining -= 1;
            if v.remaining == 0 {
                events.push(Event::Arrival {
                    t,
                    vehicle: k,
                    station: v.destination,
                });
            }
        }
    }

    // 4: unload
    for m in 0..state.requests.len() {
        let status = state.requests[m];
        if status.state != RequestState::Picked {
            continue;
        }
        let k = status.carrier.expect("picked request has a carrier");
        let v = state.vehicles[k];
        let req = &scenario.requests[m];
        if v.at_station() && v.destination == req.to {
            state.requests[m].state = RequestState::Delivered;
            state.vehicles[k].space += req.vol;
            state.delivered_count += 1;
            record.delivered_values.push(req.val);
            events.push(Event::Delivery {
                t,
                request: m,
                vehicle: k,
                value: req.val,
            });
        }
    }

    let reward = record.reward(scenario.cost_rate);
    state.cumulative_objective += reward;
    state.t += 1;
    Ok((reward, events, record))
}

pub fn action_masks(state: &WorldState) -> ActionMasks {
    let k_count = state.vehicles().len();
    let stations = state.scenario().station_count();
    let mut requests = BTreeMap::new();
    for m in state.decidable_requests() {
        let mut row = vec![false; k_count + 1];
        for a in state.feasible_request_actions(m).expect("decidable") {
            match a {
                RequestAction::Assign(k) => row[k] = true,
                RequestAction::Defer => row[k_count] = true,
            }
        }
        requests.insert(m, row);
    }
    let vehicles = state
        .vehicles()
        .iter()
        .map(|v| vec![v.at_station(); stations])
        .collect();
    ActionMasks { requests, vehicles }
}

/// Joint action that defers every request and keeps every idle vehicle
/// where it is.
pub fn idle_action(state: &WorldState) -> JointAction {
    JointAction {
        request_actions: state
            .decidable_requests()
            .map(|m| (m, RequestAction::Defer))
            .collect(),
        vehicle_actions: state
            .decidable_vehicles()
            .map(|k| (k, state.vehicles()[k].destination))
            .collect(),
    }
}

pub fn completion_rate(state: &WorldState) -> f64 {
    let total = state.scenario().request_count();
    if total == 0 {
        1.0
    } else {
        state.delivered_count() as f64 / total as f64
    }
}

pub fn run_episode<P: Policy + ?Sized>(
    scenario: Arc<Scenario>,
    policy: &mut P,
    seed: u64,
) -> Result<EpisodeSummary, EnvError> {
    run_episode_with_limit(scenario, policy, seed, None).map(|(summary, _)| summary)
}

/// Like [`run_episode`] but stops early once `limit` has elapsed; the flag
/// reports whether that happened.
pub fn run_episode_with_limit<P: Policy + ?Sized>(
    scenario: Arc<Scenario>,
    policy: &mut P,
    seed: u64,
    limit: Option<Duration>,
) -> Result<(EpisodeSummary, bool), EnvError> {
    run_from(reset(scenario, seed)?, policy, limit)
}

/// Drives `state` to the end of its horizon. Rewards and history cover the
/// slices played here; the objective includes whatever `state` had already
/// accumulated.
pub fn run_from<P: Policy + ?Sized>(
    mut state: WorldState,
    policy: &mut P,
    limit: Option<Duration>,
) -> Result<(EpisodeSummary, bool), EnvError> {
    let start = Instant::now();
    let remaining = state.scenario().horizon.saturating_sub(state.t()) as usize;
    let mut rewards = Vec::with_capacity(remaining);
    let mut history = Vec::with_capacity(remaining);
    let mut timed_out = false;
    while !state.is_done() {
        if limit.is_some_and(|l| start.elapsed() > l) {
            timed_out = true;
            break;
        }
        let action = policy.act(&state);
        let step = state.t();
        let (reward, _, record) =
            step_in_place(&mut state, &action).map_err(|e| EnvError::Policy {
                step,
                source: Box::new(e),
            })?;
        rewards.push(reward);
        history.push(record);
    }
    let summary = EpisodeSummary {
        objective: state.cumulative_objective(),
        completion_rate: completion_rate(&state),
        wall_time: start.elapsed().as_secs_f64(),
        seed: state.seed(),
        rewards,
        history,
        delivered: state.delivered_count(),
    };
    Ok((summary, timed_out))
}
