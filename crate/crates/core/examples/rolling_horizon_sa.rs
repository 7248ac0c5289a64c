//! Rolling horizon with simulated annealing and with the genetic algorithm
//! on one synth-S day, against a policy that never moves.

use std::sync::Arc;

use dpdp::env::{idle_action, run_episode};
use dpdp::scenario::generate_preset;
use dpdp::solvers::{GAParams, RhConfig, RollingHorizonPolicy, SAParams, StaticSolver};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 4;
    let scenario = Arc::new(generate_preset("synth-S", seed).unwrap());
    let config = RhConfig::preset("synth-S").unwrap();

    let mut null = |s: &dpdp::domain::WorldState| idle_action(s);
    let idle = run_episode(scenario.clone(), &mut null, seed)?;
    println!("null policy: obj {}", idle.objective);

    let mut sa = RollingHorizonPolicy::new(StaticSolver::Sa(SAParams::default()), config, seed);
    let s = run_episode(scenario.clone(), &mut sa, seed)?;
    println!(
        "rh-sa: obj {:.1} comp {:.3} in {:.2} s, {} solves, {} degraded actions",
        s.objective,
        s.completion_rate,
        s.wall_time,
        sa.solve_count(),
        sa.degradations().len()
    );

    let mut ga = RollingHorizonPolicy::new(StaticSolver::Ga(GAParams::default()), config, seed);
    let g = run_episode(scenario, &mut ga, seed)?;
    println!(
        "rh-ga: obj {:.1} comp {:.3} in {:.2} s",
        g.objective, g.completion_rate, g.wall_time
    );
    Ok(())
}
