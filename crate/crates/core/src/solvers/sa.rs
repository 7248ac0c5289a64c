use rand::Rng;
use thiserror::Error;

use super::plan::Plan;
use super::routing::{decode, Genome};
use super::window::StaticInstance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("temperatures must be positive with initial >= final")]
    Temperature,
    #[error("cooling factor must lie in (0, 1)")]
    Cooling,
    #[error("population must be at least 2")]
    Population,
    #[error("fitness scale must be positive")]
    Scale,
    #[error("mutation rate must lie in [0, 1]")]
    Mutation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SAParams {
    pub initial_temp: f64,
    pub final_temp: f64,
    pub cooling: f64,
    pub max_iters: usize,
}

impl Default for SAParams {
    fn default() -> Self {
        Self {
            initial_temp: 1000.0,
            final_temp: 1.0,
            cooling: 0.99,
            max_iters: 5000,
        }
    }
}

impl SAParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.final_temp > 0.0
            && self.initial_temp >= self.final_temp
            && self.initial_temp.is_finite())
        {
            return Err(ParamError::Temperature);
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(ParamError::Cooling);
        }
        Ok(())
    }
}

/// Simulated annealing over task lists; returns the best plan seen.
pub fn sa_solve<R: Rng + ?Sized>(
    instance: &StaticInstance,
    params: &SAParams,
    rng: &mut R,
) -> Plan {
    sa_solve_traced(instance, params, rng).0
}

/// Like [`sa_solve`], also returning the best objective after each iteration.
///
/// The neighbour move takes one request out and puts it back on a random
/// vehicle (or leaves it unserved) at random positions with random slack.
/// The temperature is multiplied by `cooling` every iteration and held at
/// `final_temp` once it gets there.
pub fn sa_solve_traced<R: Rng + ?Sized>(
    instance: &StaticInstance,
    params: &SAParams,
    rng: &mut R,
) -> (Plan, Vec<f64>) {
    let mut current = Genome::random(instance, rng);
    let mut current_plan = decode(instance, &current);
    let mut best = current_plan.clone();
    let mut trace = Vec::with_capacity(params.max_iters);
    let n = instance.requests.len();
    let mut temp = params.initial_temp;

    for _ in 0..params.max_iters {
        if n == 0 {
            trace.push(best.objective);
            continue;
        }
        let mut candidate = current.clone();
        let m = rng.gen_range(0..n);
        if instance.requests[m].carrier.is_some() && rng.gen_bool(0.5) {
            candidate.perturb_wait(rng);
        } else {
            candidate.reinsert(instance, m, rng);
        }
        let plan = decode(instance, &candidate);
        let delta = plan.objective - current_plan.objective;
        if delta >= 0.0 || rng.gen::<f64>() < (delta / temp).exp() {
            current = candidate;
            current_plan = plan;
            if current_plan.objective > best.objective {
                best = current_plan.clone();
            }
        }
        temp = (temp * params.cooling).max(params.final_temp);
        trace.push(best.objective);
    }
    (best, trace)
}
