//! Hand-computed action weights: load balancing for vehicle selection and
//! distance-scaled attraction for destination selection. Used both as a
//! multiplicative prior by learning clients and as a standalone sampling
//! policy.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{JointAction, RequestAction, RequestState, WorldState};
use crate::env::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    /// Weight of the defer action.
    pub beta: f64,
    /// Scale of the pickup-station attraction relative to the mean distance.
    pub pickup_coefficient: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            beta: 0.03,
            pickup_coefficient: 0.1,
        }
    }
}

/// Unnormalized weights over the feasible choices of request `m`.
/// `committed[k]` is the volume already loaded onto vehicle `k` earlier in
/// the same slice. Defer is always last.
pub fn vehicle_selection_prior(
    state: &WorldState,
    m: usize,
    committed: &[u32],
    config: &PriorConfig,
) -> Vec<(RequestAction, f64)> {
    let req = &state.scenario().requests[m];
    let mut out: Vec<(RequestAction, f64)> = state
        .vehicles()
        .iter()
        .enumerate()
        .filter_map(|(k, v)| {
            let space = v
                .space
                .saturating_sub(committed.get(k).copied().unwrap_or(0));
            (v.at_station() && v.destination == req.from && space >= req.vol)
                .then(|| (RequestAction::Assign(k), space as f64 / v.capacity as f64))
        })
        .collect();
    out.push((RequestAction::Defer, config.beta));
    out
}

/// Unnormalized weight of each station as the next destination of vehicle
/// `k`. `assigned` holds request decisions already taken this slice: loads
/// onto `k` count as on board, and any assigned request is no longer a
/// pickup target. A waiting request only attracts `k` if it fits in the
/// space left after this slice's loads; otherwise a full vehicle parked next
/// to a waiting request would keep choosing to stay.
pub fn destination_prior(
    state: &WorldState,
    k: usize,
    assigned: &BTreeMap<usize, RequestAction>,
    config: &PriorConfig,
) -> Vec<f64> {
    let scenario = state.scenario();
    let graph = &scenario.graph;
    let n = scenario.station_count();
    let here = state.vehicles()[k].destination;
    let mean = graph.mean_distance();

    let mut deliver = vec![false; n];
    let mut pickup = vec![false; n];
    let mut space = state.vehicles()[k].space as i64;
    for (m, a) in assigned {
        if *a == RequestAction::Assign(k) {
            space -= scenario.requests[*m].vol as i64;
        }
    }
    for m in state.visible_requests() {
        let req = &scenario.requests[m];
        let status = state.request_status()[m];
        match (status.state, assigned.get(&m)) {
            (RequestState::Picked, _) if status.carrier == Some(k) => deliver[req.to] = true,
            (RequestState::Unassigned, Some(RequestAction::Assign(c))) if *c == k => {
                deliver[req.to] = true
            }
            (RequestState::Unassigned, Some(RequestAction::Assign(_))) => {}
            (RequestState::Unassigned, _) if space >= req.vol as i64 => pickup[req.from] = true,
            _ => {}
        }
    }

    let mut weights: Vec<f64> = (0..n)
        .map(|i| {
            if deliver[i] {
                1.0
            } else if pickup[i] {
                let e = graph.distance(here, i);
                if e == 0 {
                    1.0
                } else {
                    (config.pickup_coefficient * mean / e as f64).min(1.0)
                }
            } else {
                0.0
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights.iter_mut().for_each(|w| *w = 1.0);
    }
    weights
}

/// Draws an index with probability proportional to `weights`. Returns
/// `None` when there is no positive mass.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    WeightedIndex::new(weights).ok().map(|d| d.sample(rng))
}

/// Samples a full joint action from the priors: requests in ascending index
/// with capacity committed as it goes, then vehicles in ascending index.
pub fn prior_act<R: Rng + ?Sized>(
    state: &WorldState,
    config: &PriorConfig,
    rng: &mut R,
) -> JointAction {
    let mut committed = vec![0u32; state.vehicles().len()];
    let mut request_actions = BTreeMap::new();
    for m in state.decidable_requests() {
        let choices = vehicle_selection_prior(state, m, &committed, config);
        let weights: Vec<f64> = choices.iter().map(|(_, w)| *w).collect();
        // beta = 0 with no feasible vehicle leaves no mass; defer is the only legal move then
        let action = sample_index(&weights, rng).map_or(RequestAction::Defer, |i| choices[i].0);
        if let RequestAction::Assign(k) = action {
            committed[k] += state.scenario().requests[m].vol;
        }
        request_actions.insert(m, action);
    }
    let vehicle_actions = state
        .decidable_vehicles()
        .map(|k| {
            let weights = destination_prior(state, k, &request_actions, config);
            (
                k,
                sample_index(&weights, rng).expect("destination prior has positive mass"),
            )
        })
        .collect();
    JointAction {
        request_actions,
        vehicle_actions,
    }
}

/// Standalone policy sampling from the informative priors.
#[derive(Debug, Clone)]
pub struct PriorPolicy {
    pub config: PriorConfig,
    rng: ChaCha8Rng,
}

impl PriorPolicy {
    pub fn new(config: PriorConfig, seed: u64) -> Self {
        Self {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for PriorPolicy {
    fn act(&mut self, state: &WorldState) -> JointAction {
        prior_act(state, &self.config, &mut self.rng)
    }
}
