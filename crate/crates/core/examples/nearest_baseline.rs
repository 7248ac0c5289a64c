//! Nearest-vehicle baseline on synth-S and synth-S-cost.

use std::sync::Arc;

use dpdp::env::run_episode;
use dpdp::scenario::generate_preset;
use dpdp::solvers::NearestPolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for preset in ["synth-S", "synth-S-cost"] {
        let (mut obj, mut comp) = (0.0, 0.0);
        let seeds = 20;
        for seed in 0..seeds {
            let scenario = Arc::new(generate_preset(preset, seed).unwrap());
            let s = run_episode(scenario, &mut NearestPolicy, seed)?;
            obj += s.objective;
            comp += s.completion_rate;
        }
        println!(
            "{preset}: mean obj {:.1}, mean comp {:.3}",
            obj / seeds as f64,
            comp / seeds as f64
        );
    }
    Ok(())
}
