#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use dpdp::domain::{
    FleetEntry, JointAction, ProfitMode, Request, RequestAction, RequestState, RequestStatus,
    Scenario, Vehicle, WorldState,
};
use dpdp::env::step;
use dpdp::solvers::StaticInstance;
use rand::seq::SliceRandom;
use rand::Rng;

/// Slice at which the world built from an instance starts; window slice `τ`
/// is world slice `START + τ`.
pub const START: u32 = 1;

/// A world whose remaining episode is the static instance: every request
/// visible at `START`, vehicles travelling `join_time` slices to `start`,
/// preloads on board.
pub fn world_from_instance(inst: &StaticInstance) -> WorldState {
    let scenario = Scenario {
        graph: (*inst.graph).clone(),
        fleet: inst
            .vehicles
            .iter()
            .map(|v| FleetEntry {
                station: v.start,
                capacity: v.capacity,
            })
            .collect(),
        requests: inst
            .requests
            .iter()
            .map(|r| Request {
                from: r.from,
                to: r.to,
                val: r.val,
                vol: r.vol,
                time: START,
            })
            .collect(),
        horizon: START + inst.horizon,
        cost_rate: inst.cost_rate,
        profit_mode: ProfitMode::Fixed,
    };
    let vehicles = inst
        .vehicles
        .iter()
        .map(|v| {
            let load: u32 = v.preload.iter().map(|&m| inst.requests[m].vol).sum();
            Vehicle {
                capacity: v.capacity,
                space: v.capacity - load,
                destination: v.start,
                remaining: v.join_time,
            }
        })
        .collect();
    let requests = inst
        .requests
        .iter()
        .map(|r| match r.carrier {
            Some(k) => RequestStatus {
                state: RequestState::Picked,
                carrier: Some(k),
            },
            None => RequestStatus::UNASSIGNED,
        })
        .collect();
    WorldState::restore(Arc::new(scenario), START, vehicles, requests, 0.0)
        .expect("instance maps to a valid world")
}

/// Every joint action the simulator accepts at `state`, found by trying the
/// full product of per-entity choices.
pub fn all_joint_actions(state: &WorldState) -> Vec<JointAction> {
    let k_count = state.vehicles().len();
    let n = state.scenario().station_count();
    let requests: Vec<usize> = state.decidable_requests().collect();
    let vehicles: Vec<usize> = state.decidable_vehicles().collect();
    let mut out = Vec::new();
    let choices_r = k_count + 1;
    let total_r = choices_r.pow(requests.len() as u32);
    let total_v = n.pow(vehicles.len() as u32);
    for a in 0..total_r {
        let mut code = a;
        let mut request_actions = BTreeMap::new();
        for &m in &requests {
            let c = code % choices_r;
            code /= choices_r;
            request_actions.insert(
                m,
                if c == k_count {
                    RequestAction::Defer
                } else {
                    RequestAction::Assign(c)
                },
            );
        }
        for b in 0..total_v {
            let mut code = b;
            let mut vehicle_actions = BTreeMap::new();
            for &k in &vehicles {
                vehicle_actions.insert(k, code % n);
                code /= n;
            }
            let action = JointAction {
                request_actions: request_actions.clone(),
                vehicle_actions,
            };
            if dpdp::env::validate_action(state, &action).is_ok() {
                out.push(action);
            }
        }
    }
    out
}

/// (delivered value bits, distance) pairs reachable from `state` to the end
/// of the episode.
fn reachable(
    state: &WorldState,
    memo: &mut HashMap<String, BTreeSet<(u64, u64)>>,
) -> BTreeSet<(u64, u64)> {
    if state.is_done() {
        return BTreeSet::from([(0f64.to_bits(), 0)]);
    }
    let key = format!(
        "{}|{:?}|{:?}",
        state.t(),
        state.vehicles(),
        state.request_status()
    );
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out = BTreeSet::new();
    for action in all_joint_actions(state) {
        let s = step(state, &action).expect("validated action");
        let value: f64 = s.record.delivered_values.iter().sum();
        let distance: u64 = s.record.leg_distances.iter().map(|&d| d as u64).sum();
        for (v, d) in reachable(&s.next_state, memo) {
            out.insert(((value + f64::from_bits(v)).to_bits(), distance + d));
        }
    }
    memo.insert(key, out.clone());
    out
}

/// Best objective over every action sequence of the simulator, scored as
/// total value minus cost rate times total distance.
pub fn brute_force_optimum(inst: &StaticInstance) -> f64 {
    let world = world_from_instance(inst);
    reachable(&world, &mut HashMap::new())
        .into_iter()
        .map(|(v, d)| f64::from_bits(v) - inst.cost_rate * d as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Uniformly random feasible joint action: requests in ascending order pick
/// defer or any vehicle with room left, vehicles pick any station.
pub fn random_action<R: Rng + ?Sized>(state: &WorldState, rng: &mut R) -> JointAction {
    let scenario = state.scenario();
    let vehicles = state.vehicles();
    let mut space: Vec<u32> = vehicles.iter().map(|v| v.space).collect();
    let mut request_actions = BTreeMap::new();
    for m in state.decidable_requests() {
        let r = &scenario.requests[m];
        let mut options = vec![RequestAction::Defer];
        for (k, v) in vehicles.iter().enumerate() {
            if v.at_station() && v.destination == r.from && space[k] >= r.vol {
                options.push(RequestAction::Assign(k));
            }
        }
        let a = *options.choose(rng).unwrap();
        if let RequestAction::Assign(k) = a {
            space[k] -= r.vol;
        }
        request_actions.insert(m, a);
    }
    let n = scenario.station_count();
    let vehicle_actions = state
        .decidable_vehicles()
        .map(|k| (k, rng.gen_range(0..n)))
        .collect();
    JointAction {
        request_actions,
        vehicle_actions,
    }
}

/// Random small scenario with mixed volumes, self loops and a cost rate.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    let n = rng.gen_range(2..=6);
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i][j] = rng.gen_range(1..=5);
            }
        }
    }
    let horizon = rng.gen_range(5..=25);
    let fleet = (0..rng.gen_range(1..=4))
        .map(|_| FleetEntry {
            station: rng.gen_range(0..n),
            capacity: rng.gen_range(1..=5),
        })
        .collect();
    let requests = (0..rng.gen_range(0..=30))
        .map(|_| Request {
            from: rng.gen_range(0..n),
            to: rng.gen_range(0..n),
            val: rng.gen_range(1..=10) as f64,
            vol: rng.gen_range(1..=3),
            time: rng.gen_range(1..=horizon),
        })
        .collect();
    Scenario {
        graph: dpdp::domain::StationGraph::closed(&d).unwrap(),
        fleet,
        requests,
        horizon,
        cost_rate: [0.0, 0.1, 0.3, 1.0][rng.gen_range(0..4)],
        profit_mode: ProfitMode::Fixed,
    }
}
