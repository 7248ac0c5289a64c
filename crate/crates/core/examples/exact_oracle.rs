//! Solves a tiny static instance exactly and compares with SA and GA.

use dpdp::solvers::{
    exact_solve, ga_solve, random_instance, sa_solve, ExactLimits, GAParams, SAParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let instance = random_instance(&mut rng, 3, 2, 2, 6);
    instance.check()?;
    for r in &instance.requests {
        println!(
            "request {}: {} -> {} value {} volume {}",
            r.id, r.from, r.to, r.val, r.vol
        );
    }

    let exact = exact_solve(&instance, &ExactLimits::default())?;
    exact.validate(&instance)?;
    println!("exact optimum {}", exact.objective);
    for (k, route) in exact.routes.iter().enumerate() {
        let stops: Vec<String> = route
            .iter()
            .map(|s| format!("{}@{}", s.location, s.time))
            .collect();
        println!("  vehicle {k}: {}", stops.join(" -> "));
    }

    let sa = sa_solve(&instance, &SAParams::default(), &mut rng);
    let ga = ga_solve(&instance, &GAParams::default(), &mut rng);
    println!("sa {} ga {}", sa.objective, ga.objective);
    Ok(())
}
