//! Inspects the informative priors at one state, then runs the prior-sampling
//! policy over a few synth-S seeds.

use std::collections::BTreeMap;
use std::sync::Arc;

use dpdp::env::{idle_action, reset, run_episode, step_in_place};
use dpdp::prior::{destination_prior, vehicle_selection_prior, PriorConfig, PriorPolicy};
use dpdp::scenario::generate_preset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = PriorConfig::default();
    let scenario = Arc::new(generate_preset("synth-S", 1).ok_or("unknown preset")?);
    let mut state = reset(scenario.clone(), 1)?;
    while state.decidable_requests().next().is_none() {
        let idle = idle_action(&state);
        step_in_place(&mut state, &idle)?;
    }
    let m = state.decidable_requests().next().unwrap();
    let committed = vec![0; state.vehicles().len()];
    println!(
        "t={} request {m}: {:?}",
        state.t(),
        vehicle_selection_prior(&state, m, &committed, &config)
    );
    let weights = destination_prior(&state, 0, &BTreeMap::new(), &config);
    let best = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    println!("vehicle 0 destination weights peak at station {best:?}");

    for seed in 0..5 {
        let sc = Arc::new(generate_preset("synth-S", seed).unwrap());
        let summary = run_episode(sc, &mut PriorPolicy::new(config, seed), seed)?;
        println!(
            "seed {seed}: obj {:.1} comp {:.3}",
            summary.objective, summary.completion_rate
        );
    }
    Ok(())
}
