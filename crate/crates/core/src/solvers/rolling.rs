use std::collections::BTreeMap;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::exact::{exact_solve, ExactLimits};
use super::ga::{ga_solve, GAParams};
use super::plan::Plan;
use super::sa::{sa_solve, SAParams};
use super::window::{build_static_window, StaticInstance};
use crate::domain::{JointAction, RequestAction, WorldState};
use crate::env::{Entity, Policy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticSolver {
    Sa(SAParams),
    Ga(GAParams),
    Exact(ExactLimits),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhConfig {
    /// Longest window handed to the solver.
    pub horizon: u32,
    /// Slices between two solves.
    pub replan: u32,
}

impl RhConfig {
    /// Window and replan interval per dataset name.
    pub fn preset(name: &str) -> Option<Self> {
        let (horizon, replan) = match name {
            "synth-S" | "synth-S-cost" => (20, 10),
            "synth-L" | "synth-L-cost" => (60, 30),
            "synth-XL" => (40, 20),
            "dhrd-se" | "dhrd-tpe" | "dhrd-sg" => (30, 15),
            _ => return None,
        };
        Some(Self { horizon, replan })
    }
}

impl Default for RhConfig {
    fn default() -> Self {
        Self {
            horizon: 20,
            replan: 10,
        }
    }
}

/// A planned action that could not be carried out and was replaced by
/// defer (requests) or stay (vehicles).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degradation {
    pub t: u32,
    pub entity: Entity,
    pub reason: String,
}

struct Cached {
    start: u32,
    instance: StaticInstance,
    plan: Plan,
}

/// Solves a static window every `replan` slices and follows the cached plan
/// in between.
pub struct RollingHorizonPolicy {
    pub solver: StaticSolver,
    pub config: RhConfig,
    rng: ChaCha8Rng,
    cached: Option<Cached>,
    solves: usize,
    degradations: Vec<Degradation>,
}

impl RollingHorizonPolicy {
    pub fn new(solver: StaticSolver, config: RhConfig, seed: u64) -> Self {
        Self {
            solver,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cached: None,
            solves: 0,
            degradations: Vec::new(),
        }
    }

    /// Number of static solves so far.
    pub fn solve_count(&self) -> usize {
        self.solves
    }

    pub fn degradations(&self) -> &[Degradation] {
        &self.degradations
    }

    /// Plan currently being followed, with the slice it was made at.
    pub fn current_plan(&self) -> Option<(u32, &StaticInstance, &Plan)> {
        self.cached
            .as_ref()
            .map(|c| (c.start, &c.instance, &c.plan))
    }

    fn needs_plan(&self, t: u32) -> bool {
        match &self.cached {
            None => true,
            Some(c) => {
                t >= c.start + self.config.replan.max(1) || t >= c.start + c.instance.horizon
            }
        }
    }

    fn solve(&mut self, state: &WorldState) {
        let t = state.t();
        let horizon = self.config.horizon.min(state.scenario().horizon - t).max(1);
        let instance = build_static_window(state, horizon);
        let plan = match &self.solver {
            StaticSolver::Sa(p) => sa_solve(&instance, p, &mut self.rng),
            StaticSolver::Ga(p) => ga_solve(&instance, p, &mut self.rng),
            StaticSolver::Exact(limits) => exact_solve(&instance, limits).unwrap_or_else(|e| {
                debug!("t={t}: {e}; holding position until the next replan");
                Plan::idle(&instance)
            }),
        };
        self.solves += 1;
        self.cached = Some(Cached {
            start: t,
            instance,
            plan,
        });
    }

    fn degrade(&mut self, t: u32, entity: Entity, reason: String) {
        debug!("t={t}: {entity:?} {reason}");
        self.degradations.push(Degradation { t, entity, reason });
    }
}

impl Policy for RollingHorizonPolicy {
    fn act(&mut self, state: &WorldState) -> JointAction {
        let t = state.t();
        if self.needs_plan(t) {
            self.solve(state);
        }
        let scenario = state.scenario();
        let vehicles = state.vehicles();
        let mut request_actions: BTreeMap<usize, RequestAction> = state
            .decidable_requests()
            .map(|m| (m, RequestAction::Defer))
            .collect();
        let mut vehicle_actions: BTreeMap<usize, usize> = state
            .decidable_vehicles()
            .map(|k| (k, vehicles[k].destination))
            .collect();
        let mut space: Vec<u32> = vehicles.iter().map(|v| v.space).collect();
        let mut problems = Vec::new();

        let cached = self.cached.as_ref().expect("a plan exists after solving");
        let tau = t - cached.start;
        for (local, route) in cached.plan.routes.iter().enumerate() {
            let k = cached.instance.vehicles[local].id;
            if !vehicle_actions.contains_key(&k) {
                continue;
            }
            let Some(i) = route.iter().rposition(|s| s.time <= tau) else {
                continue;
            };
            let stop = &route[i];
            if vehicles[k].destination != stop.location {
                problems.push((
                    Entity::Vehicle(k),
                    format!("expected at station {}", stop.location),
                ));
                continue;
            }
            if Plan::depart(&cached.instance, route, i) != Some(tau) {
                continue;
            }
            let mut pickups: Vec<usize> = stop
                .pickups
                .iter()
                .map(|&m| cached.instance.requests[m].id)
                .collect();
            pickups.sort_unstable();
            for m in pickups {
                let r = &scenario.requests[m];
                if state.is_decidable_request(m) && r.from == stop.location && space[k] >= r.vol {
                    space[k] -= r.vol;
                    request_actions.insert(m, RequestAction::Assign(k));
                } else {
                    problems.push((
                        Entity::Request(m),
                        format!("planned pickup by vehicle {k} not possible"),
                    ));
                }
            }
            vehicle_actions.insert(k, route[i + 1].location);
        }

        // loads that start and end at the same station are free for any vehicle staying there
        for (&m, action) in request_actions.iter_mut() {
            let r = &scenario.requests[m];
            if r.from != r.to || *action != RequestAction::Defer {
                continue;
            }
            let stay = vehicle_actions.iter().find(|(&k, &dest)| {
                dest == r.from && vehicles[k].destination == r.from && space[k] >= r.vol
            });
            if let Some((&k, _)) = stay {
                space[k] -= r.vol;
                *action = RequestAction::Assign(k);
            }
        }

        for (entity, reason) in problems {
            self.degrade(t, entity, reason);
        }
        JointAction {
            request_actions,
            vehicle_actions,
        }
    }
}
