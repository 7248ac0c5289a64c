use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::plan::Plan;
use super::routing::{decode, Genome};
use super::sa::ParamError;
use super::window::StaticInstance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GAParams {
    pub population: usize,
    pub generations: usize,
    /// Fitness is `exp(objective / scale)`; `None` uses the instance's mean
    /// request value, at least 1.
    pub fitness_scale: Option<f64>,
    pub mutation_rate: f64,
}

impl Default for GAParams {
    fn default() -> Self {
        Self {
            population: 10,
            generations: 500,
            fitness_scale: None,
            mutation_rate: 0.3,
        }
    }
}

impl GAParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.population < 2 {
            return Err(ParamError::Population);
        }
        if self
            .fitness_scale
            .is_some_and(|s| !(s > 0.0 && s.is_finite()))
        {
            return Err(ParamError::Scale);
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ParamError::Mutation);
        }
        Ok(())
    }
}

pub fn ga_solve<R: Rng + ?Sized>(
    instance: &StaticInstance,
    params: &GAParams,
    rng: &mut R,
) -> Plan {
    evolve(instance, params, rng, |_| {}).0
}

/// Like [`ga_solve`], also returning the best objective after each generation.
pub fn ga_solve_traced<R: Rng + ?Sized>(
    instance: &StaticInstance,
    params: &GAParams,
    rng: &mut R,
) -> (Plan, Vec<f64>) {
    evolve(instance, params, rng, |_| {})
}

/// Runs the generational loop, handing each decoded population to `inspect`.
pub(crate) fn evolve<R: Rng + ?Sized>(
    instance: &StaticInstance,
    params: &GAParams,
    rng: &mut R,
    mut inspect: impl FnMut(&[Plan]),
) -> (Plan, Vec<f64>) {
    let scale = params
        .fitness_scale
        .unwrap_or_else(|| instance.mean_value().max(1.0));
    let n = instance.requests.len();
    let mut genomes: Vec<Genome> = (0..params.population)
        .map(|_| Genome::random(instance, rng))
        .collect();
    let mut plans: Vec<Plan> = genomes.iter().map(|g| decode(instance, g)).collect();
    inspect(&plans);
    let mut best_i = argmax(&plans);
    let mut best = plans[best_i].clone();
    let mut trace = Vec::with_capacity(params.generations);

    for _ in 0..params.generations {
        // shifting by the maximum keeps exp() finite without changing proportions
        let top = plans[best_i].objective;
        let fitness: Vec<f64> = plans
            .iter()
            .map(|p| ((p.objective - top) / scale).exp())
            .collect();
        let roulette = WeightedIndex::new(&fitness).expect("the best individual has fitness 1");

        let mut next = vec![genomes[best_i].clone()];
        while next.len() < params.population {
            let a = &genomes[roulette.sample(rng)];
            let b = &genomes[roulette.sample(rng)];
            let mut child = a.clone();
            if n > 0 {
                child.adopt(b, rng.gen_range(0..n));
                if rng.gen_bool(params.mutation_rate) {
                    if rng.gen_bool(0.5) {
                        child.reinsert(instance, rng.gen_range(0..n), rng);
                    } else {
                        child.perturb_wait(rng);
                    }
                }
            }
            next.push(child);
        }
        genomes = next;
        plans = genomes.iter().map(|g| decode(instance, g)).collect();
        inspect(&plans);
        best_i = argmax(&plans);
        if plans[best_i].objective > best.objective {
            best = plans[best_i].clone();
        }
        trace.push(best.objective);
    }
    (best, trace)
}

fn argmax(plans: &[Plan]) -> usize {
    let mut b = 0;
    for (i, p) in plans.iter().enumerate() {
        if p.objective > plans[b].objective {
            b = i;
        }
    }
    b
}
