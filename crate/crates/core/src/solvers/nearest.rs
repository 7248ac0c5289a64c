use std::collections::BTreeMap;

use crate::domain::{JointAction, RequestAction, RequestState, WorldState};
use crate::env::Policy;

/// Greedy rule: load every request onto the lowest-index co-located vehicle
/// with room, then send each idle vehicle to the closest station where it can
/// either drop cargo or pick up a waiting request it has room for.
///
/// Distance ties prefer deliveries over pickups, then the lower station
/// index. A vehicle with no target stays put.
pub fn nearest_act(state: &WorldState) -> JointAction {
    let scenario = state.scenario();
    let graph = &scenario.graph;
    let vehicles = state.vehicles();

    let mut space: Vec<u32> = vehicles.iter().map(|v| v.space).collect();
    let mut request_actions = BTreeMap::new();
    for m in state.decidable_requests() {
        let req = &scenario.requests[m];
        let pick = vehicles
            .iter()
            .enumerate()
            .find(|(k, v)| v.at_station() && v.destination == req.from && space[*k] >= req.vol)
            .map(|(k, _)| k);
        let action = match pick {
            Some(k) => {
                space[k] -= req.vol;
                RequestAction::Assign(k)
            }
            None => RequestAction::Defer,
        };
        request_actions.insert(m, action);
    }

    let mut vehicle_actions = BTreeMap::new();
    for k in state.decidable_vehicles() {
        let here = vehicles[k].destination;
        // (distance, kind, station) with kind 0 = delivery, 1 = pickup
        let mut best: Option<(u32, u8, usize)> = None;
        let mut consider = |candidate: (u32, u8, usize)| {
            if best.is_none_or(|b| candidate < b) {
                best = Some(candidate);
            }
        };
        for m in state.visible_requests() {
            let req = &scenario.requests[m];
            let status = state.request_status()[m];
            let loaded_now = request_actions.get(&m) == Some(&RequestAction::Assign(k));
            let onboard = status.state == RequestState::Picked && status.carrier == Some(k);
            if onboard || loaded_now {
                consider((graph.distance(here, req.to), 0, req.to));
            } else if status.state == RequestState::Unassigned
                && !matches!(request_actions.get(&m), Some(RequestAction::Assign(_)))
                && space[k] >= req.vol
            {
                consider((graph.distance(here, req.from), 1, req.from));
            }
        }
        vehicle_actions.insert(k, best.map_or(here, |(_, _, station)| station));
    }
    JointAction {
        request_actions,
        vehicle_actions,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NearestPolicy;

impl Policy for NearestPolicy {
    fn act(&mut self, state: &WorldState) -> JointAction {
        nearest_act(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{FleetEntry, ProfitMode, Request, Scenario, StationGraph};
    use crate::env::{idle_action, reset, step_in_place};
    use std::sync::Arc;

    /// Star-ish graph: vehicle at 0; distances from 0 given by `from0`.
    fn graph(from0: &[u32]) -> StationGraph {
        let n = from0.len();
        let d = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0
                        } else if i == 0 {
                            from0[j]
                        } else if j == 0 {
                            from0[i]
                        } else {
                            from0[i] + from0[j]
                        }
                    })
                    .collect()
            })
            .collect();
        StationGraph::new(d).unwrap()
    }

    fn state(from0: &[u32], requests: Vec<Request>) -> WorldState {
        let sc = Arc::new(Scenario {
            graph: graph(from0),
            fleet: vec![FleetEntry {
                station: 0,
                capacity: 3,
            }],
            requests,
            horizon: 30,
            cost_rate: 0.0,
            profit_mode: ProfitMode::Fixed,
        });
        let mut s = reset(sc, 0).unwrap();
        {
            let a = idle_action(&s);
            step_in_place(&mut s, &a).unwrap();
        }
        s
    }

    fn req(from: usize, to: usize) -> Request {
        Request {
            from,
            to,
            val: 1.0,
            vol: 1,
            time: 1,
        }
    }

    #[test]
    fn picks_closer_candidate() {
        let s = state(&[0, 2, 5], vec![req(2, 0), req(1, 0)]);
        assert_eq!(nearest_act(&s).vehicle_actions[&0], 1);
    }

    #[test]
    fn tie_goes_to_lower_station() {
        let s = state(&[0, 9, 9, 9, 3, 9, 9, 3], vec![req(7, 0), req(4, 0)]);
        assert_eq!(nearest_act(&s).vehicle_actions[&0], 4);
    }

    #[test]
    fn delivery_beats_pickup_on_tie() {
        // request 0 loaded here now, destined to station 2 at distance 1; pickup waiting at station 1 also at 1
        let s = state(&[0, 1, 1], vec![req(0, 2), req(1, 0)]);
        let a = nearest_act(&s);
        assert_eq!(a.request_actions[&0], RequestAction::Assign(0));
        assert_eq!(a.vehicle_actions[&0], 2);
    }

    #[test]
    fn no_target_stays() {
        let s = state(&[0, 1, 1], vec![]);
        assert_eq!(nearest_act(&s).vehicle_actions[&0], 0);
    }

    #[test]
    fn full_episode_is_feasible() {
        let sc = Arc::new(crate::scenario::generate_preset("synth-S-cost", 1).unwrap());
        crate::env::run_episode(sc, &mut NearestPolicy, 1).unwrap();
    }
}
