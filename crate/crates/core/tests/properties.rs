mod common;

use std::sync::Arc;

use dpdp::domain::{JointAction, RequestAction, RequestState};
use dpdp::env::{action_masks, reset, step, validate_action};
use dpdp::scenario::{from_json_str, generate_synthetic, to_json_string, SyntheticSpec};
use dpdp::server::observe;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec() -> impl Strategy<Value = SyntheticSpec> {
    (
        2usize..12,
        0usize..40,
        1usize..5,
        2u32..30,
        1u32..6,
        1u32..4,
        0u32..4,
        prop::sample::select(vec![0.0, 0.3, 1.5]),
    )
        .prop_map(|(n, m, k, h, cap, lo, extra, cost)| SyntheticSpec {
            station_count: n,
            request_count: m,
            vehicle_count: k,
            horizon: h,
            capacity: cap,
            distance_lower_bound: lo,
            distance_upper_bound: lo + extra,
            cost_rate: cost,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_file_round_trip(spec in spec(), seed in any::<u64>()) {
        let scenario = generate_synthetic(&spec, seed).unwrap();
        prop_assert_eq!(from_json_str(&to_json_string(&scenario)).unwrap(), scenario);
    }

    #[test]
    fn generator_is_deterministic(spec in spec(), seed in any::<u64>()) {
        prop_assert_eq!(generate_synthetic(&spec, seed).unwrap(), generate_synthetic(&spec, seed).unwrap());
    }

    /// Masks agree with validation: every masked-in single choice is accepted
    /// on top of an otherwise idle action, every masked-out one rejected.
    #[test]
    fn masks_match_validation(seed in any::<u64>(), steps in 0usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = reset(Arc::new(common::random_scenario(&mut rng)), seed).unwrap();
        for _ in 0..steps {
            if state.is_done() { break; }
            let a = common::random_action(&state, &mut rng);
            state = step(&state, &a).unwrap().next_state;
        }
        prop_assume!(!state.is_done());
        let masks = action_masks(&state);
        let idle = dpdp::env::idle_action(&state);
        for (&m, row) in &masks.requests {
            for (c, &allowed) in row.iter().enumerate() {
                let choice = if c == row.len() - 1 { RequestAction::Defer } else { RequestAction::Assign(c) };
                let mut a = idle.clone();
                a.request_actions.insert(m, choice);
                prop_assert_eq!(validate_action(&state, &a).is_ok(), allowed, "request {} choice {:?}", m, choice);
            }
        }
        for (k, row) in masks.vehicles.iter().enumerate() {
            for (i, &allowed) in row.iter().enumerate() {
                let mut a = idle.clone();
                a.vehicle_actions.insert(k, i);
                prop_assert_eq!(validate_action(&state, &a).is_ok(), allowed, "vehicle {} station {}", k, i);
            }
        }
    }

    /// A rejected action leaves the state untouched and names an entity.
    #[test]
    fn rejection_is_atomic(seed in any::<u64>(), victim in any::<prop::sample::Index>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = reset(Arc::new(common::random_scenario(&mut rng)), seed).unwrap();
        while !state.is_done() && state.decidable_vehicles().next().is_none() {
            let a = common::random_action(&state, &mut rng);
            state = step(&state, &a).unwrap().next_state;
        }
        prop_assume!(!state.is_done());
        let mut bad: JointAction = common::random_action(&state, &mut rng);
        let ks: Vec<usize> = bad.vehicle_actions.keys().copied().collect();
        let k = ks[victim.index(ks.len())];
        bad.vehicle_actions.insert(k, state.scenario().station_count());
        let before = state.clone();
        let err = dpdp::env::step_in_place(&mut state, &bad).unwrap_err();
        prop_assert!(err.offending_entity().is_some());
        prop_assert_eq!(state, before);
    }

    /// Observation counters agree with the request list it carries.
    #[test]
    fn observation_counts(seed in any::<u64>(), steps in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = reset(Arc::new(common::random_scenario(&mut rng)), seed).unwrap();
        for _ in 0..steps {
            if state.is_done() { break; }
            let a = common::random_action(&state, &mut rng);
            state = step(&state, &a).unwrap().next_state;
        }
        let obs = observe(&state);
        let waiting = obs.requests.iter().filter(|r| r.state == RequestState::Unassigned).count();
        let open = obs.requests.iter().filter(|r| r.state != RequestState::Delivered).count();
        prop_assert_eq!(obs.ori.iter().sum::<u32>() as usize, waiting);
        prop_assert_eq!(obs.dest.iter().sum::<u32>() as usize, open);
        prop_assert_eq!(obs.m_t, obs.masks.requests.len());
        prop_assert!(obs.requests.iter().all(|r| r.time <= obs.t));
    }
}
