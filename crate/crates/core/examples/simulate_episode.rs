//! Drives one synth-S episode by hand with the nearest-vehicle rule and
//! checks that the step rewards add up to the final objective.

use std::sync::Arc;

use dpdp::env::{reset, step_in_place, Event};
use dpdp::scenario::generate_preset;
use dpdp::solvers::nearest_act;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Arc::new(generate_preset("synth-S", 7).ok_or("unknown preset")?);
    let mut state = reset(scenario.clone(), 7)?;
    let mut total = 0.0;
    while !state.is_done() {
        let action = nearest_act(&state);
        let (reward, events, _) = step_in_place(&mut state, &action)?;
        total += reward;
        let delivered = events
            .iter()
            .filter(|e| matches!(e, Event::Delivery { .. }))
            .count();
        if delivered > 0 || reward != 0.0 {
            println!(
                "t={:>2} reward={reward:>6.2} delivered={delivered}",
                state.t()
            );
        }
    }
    state.check_invariants()?;
    println!(
        "sum of rewards {total}, objective {}, {}/{} delivered",
        state.cumulative_objective(),
        state.delivered_count(),
        scenario.requests.len()
    );
    assert!((total - state.cumulative_objective()).abs() < 1e-9);
    Ok(())
}
