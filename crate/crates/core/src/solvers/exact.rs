use std::collections::HashMap;

use thiserror::Error;

use super::plan::{Plan, PlanStop, Totals};
use super::window::StaticInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_stations: usize,
    pub max_vehicles: usize,
    pub max_requests: usize,
    pub max_horizon: u32,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_stations: 4,
            max_vehicles: 2,
            max_requests: 3,
            max_horizon: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("instance too large for exact search: {what} = {value} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Req {
    Open,
    On(u8),
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    t: u32,
    /// (location or destination, slices remaining)
    vehicles: Vec<(u8, u32)>,
    requests: Vec<Req>,
}

/// Per-vehicle choice at one slice: pickups (bit mask over requests) and
/// the next station. Vehicles that are travelling carry `None`.
type Joint = Vec<Option<(u32, u8)>>;

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    distance: u64,
    action: Option<Joint>,
}

impl Best {
    fn objective(&self, cost: f64) -> f64 {
        Totals {
            value: self.value,
            distance: self.distance,
        }
        .objective(cost)
    }
}

struct Search<'a> {
    inst: &'a StaticInstance,
    memo: HashMap<Node, Best>,
}

/// Optimal plan by exhaustive search over per-slice joint actions (pickup
/// sets and destinations for every vehicle at a station), memoized on the
/// full state. Children whose immediate gain plus all undelivered value
/// cannot beat the best sibling so far are skipped.
pub fn exact_solve(instance: &StaticInstance, limits: &ExactLimits) -> Result<Plan, ExactError> {
    let checks = [
        (
            "stations",
            instance.graph.station_count(),
            limits.max_stations,
        ),
        ("vehicles", instance.vehicles.len(), limits.max_vehicles),
        ("requests", instance.requests.len(), limits.max_requests),
        (
            "horizon",
            instance.horizon as usize,
            limits.max_horizon as usize,
        ),
    ];
    for (what, value, limit) in checks {
        if value > limit {
            return Err(ExactError::TooLarge { what, value, limit });
        }
    }
    // pickup sets are bit masks and stations are bytes
    assert!(instance.requests.len() <= 32 && instance.graph.station_count() <= 256);

    let root = Node {
        t: 0,
        vehicles: instance
            .vehicles
            .iter()
            .map(|v| (v.start as u8, v.join_time))
            .collect(),
        requests: instance
            .requests
            .iter()
            .map(|r| r.carrier.map_or(Req::Open, |k| Req::On(k as u8)))
            .collect(),
    };
    let mut search = Search {
        inst: instance,
        memo: HashMap::new(),
    };
    search.solve(&root);

    let mut actions = Vec::new();
    let mut node = root;
    while let Some(action) = search.memo[&node].action.clone() {
        node = apply(instance, &node, &action).0;
        actions.push(action);
    }
    Ok(to_plan(instance, &actions))
}

impl Search<'_> {
    fn solve(&mut self, node: &Node) -> (f64, u64) {
        if let Some(b) = self.memo.get(node) {
            return (b.value, b.distance);
        }
        let best = if node.t >= self.inst.horizon {
            Best {
                value: 0.0,
                distance: 0,
                action: None,
            }
        } else {
            self.expand(node)
        };
        let out = (best.value, best.distance);
        self.memo.insert(node.clone(), best);
        out
    }

    fn expand(&mut self, node: &Node) -> Best {
        let cost = self.inst.cost_rate;
        let mut joints = Vec::new();
        enumerate(self.inst, node, 0, &mut Vec::new(), 0, &mut joints);
        let mut best: Option<Best> = None;
        for joint in joints {
            let (child, gain, dist) = apply(self.inst, node, &joint);
            let open_value: f64 = child
                .requests
                .iter()
                .zip(&self.inst.requests)
                .filter(|(s, _)| **s != Req::Done)
                .map(|(_, r)| r.val)
                .sum();
            if let Some(b) = &best {
                let bound = Totals {
                    value: gain + open_value,
                    distance: dist,
                }
                .objective(cost);
                if bound <= b.objective(cost) {
                    continue;
                }
            }
            let (v, d) = self.solve(&child);
            let cand = Best {
                value: gain + v,
                distance: dist + d,
                action: Some(joint),
            };
            if best
                .as_ref()
                .is_none_or(|b| cand.objective(cost) > b.objective(cost))
            {
                best = Some(cand);
            }
        }
        best.expect("there is always at least the all-stay action")
    }
}

/// All joint actions: vehicles in index order, each picking a subset of the
/// open requests at its station that fits (and was not taken by an earlier
/// vehicle), then any destination.
fn enumerate(
    inst: &StaticInstance,
    node: &Node,
    k: usize,
    partial: &mut Joint,
    taken: u32,
    out: &mut Vec<Joint>,
) {
    if k == node.vehicles.len() {
        out.push(partial.clone());
        return;
    }
    let (loc, rem) = node.vehicles[k];
    if rem > 0 {
        partial.push(None);
        enumerate(inst, node, k + 1, partial, taken, out);
        partial.pop();
        return;
    }
    let capacity = inst.vehicles[k].capacity;
    let load: u32 = node
        .requests
        .iter()
        .zip(&inst.requests)
        .filter(|(s, _)| **s == Req::On(k as u8))
        .map(|(_, r)| r.vol)
        .sum();
    let here: Vec<usize> = (0..inst.requests.len())
        .filter(|&m| {
            taken & (1 << m) == 0
                && node.requests[m] == Req::Open
                && inst.requests[m].from == loc as usize
        })
        .collect();
    for subset in 0u32..(1 << here.len()) {
        let mut mask = 0u32;
        let mut vol = 0;
        for (b, &m) in here.iter().enumerate() {
            if subset & (1 << b) != 0 {
                mask |= 1 << m;
                vol += inst.requests[m].vol;
            }
        }
        if load + vol > capacity {
            continue;
        }
        for dest in 0..inst.graph.station_count() {
            partial.push(Some((mask, dest as u8)));
            enumerate(inst, node, k + 1, partial, taken | mask, out);
            partial.pop();
        }
    }
}

/// One slice of the static dynamics: load, dispatch, move, unload.
/// Returns the next node, the value delivered and the distance dispatched.
fn apply(inst: &StaticInstance, node: &Node, joint: &Joint) -> (Node, f64, u64) {
    let mut next = node.clone();
    let mut dist = 0u64;
    for (k, choice) in joint.iter().enumerate() {
        let Some((mask, dest)) = *choice else {
            continue;
        };
        for m in 0..inst.requests.len() {
            if mask & (1 << m) != 0 {
                next.requests[m] = Req::On(k as u8);
            }
        }
        let e = inst
            .graph
            .distance(node.vehicles[k].0 as usize, dest as usize);
        next.vehicles[k] = (dest, e);
        dist += e as u64;
    }
    for (k, v) in next.vehicles.iter_mut().enumerate() {
        if node.vehicles[k].1 > 0 {
            v.1 -= 1;
        }
    }
    let mut value = 0.0;
    for m in 0..inst.requests.len() {
        if let Req::On(k) = next.requests[m] {
            let (loc, rem) = next.vehicles[k as usize];
            if rem == 0 && loc as usize == inst.requests[m].to {
                next.requests[m] = Req::Done;
                value += inst.requests[m].val;
            }
        }
    }
    next.t += 1;
    (next, value, dist)
}

/// Rebuilds stop lists from an action trajectory. Loads taken while the
/// vehicle waits are attached to the stop it eventually leaves from; loads
/// never carried away are dropped, as are final visits that deliver nothing.
fn to_plan(inst: &StaticInstance, actions: &[Joint]) -> Plan {
    let mut routes: Vec<Vec<PlanStop>> = inst
        .vehicles
        .iter()
        .map(|v| {
            let mut stop = PlanStop::at(v.join_time, v.start);
            if v.join_time > 0 && v.join_time <= inst.horizon {
                stop.deliveries = v
                    .preload
                    .iter()
                    .copied()
                    .filter(|&m| inst.requests[m].to == v.start)
                    .collect();
            }
            vec![stop]
        })
        .collect();
    let mut waiting: Vec<Vec<usize>> = vec![Vec::new(); inst.vehicles.len()];
    let mut node = Node {
        t: 0,
        vehicles: inst
            .vehicles
            .iter()
            .map(|v| (v.start as u8, v.join_time))
            .collect(),
        requests: inst
            .requests
            .iter()
            .map(|r| r.carrier.map_or(Req::Open, |k| Req::On(k as u8)))
            .collect(),
    };
    for joint in actions {
        let t = node.t;
        let (next, _, _) = apply(inst, &node, joint);
        for (k, choice) in joint.iter().enumerate() {
            let Some((mask, dest)) = *choice else {
                continue;
            };
            waiting[k].extend((0..inst.requests.len()).filter(|m| mask & (1 << m) != 0));
            let loc = node.vehicles[k].0;
            if dest != loc {
                let e = inst.graph.distance(loc as usize, dest as usize);
                routes[k].last_mut().unwrap().pickups = std::mem::take(&mut waiting[k]);
                routes[k].push(PlanStop::at(t + e + 1, dest as usize));
            }
        }
        for m in 0..inst.requests.len() {
            if node.requests[m] != Req::Done && next.requests[m] == Req::Done {
                let route = &mut routes[carrier(node.requests[m], joint, m)];
                // preloads unloaded at the join point are already listed
                if !route.last().unwrap().deliveries.contains(&m) {
                    route.last_mut().unwrap().deliveries.push(m);
                }
            }
        }
        node = next;
    }
    for route in &mut routes {
        while route.len() > 1 && route.last().unwrap().deliveries.is_empty() {
            route.pop();
        }
        route.last_mut().unwrap().pickups.clear();
        for stop in route.iter_mut() {
            stop.deliveries.sort_unstable();
        }
    }
    let mut plan = Plan {
        routes,
        objective: 0.0,
    };
    plan.objective = plan.totals(inst).objective(inst.cost_rate);
    plan
}

/// Vehicle that delivered request `m` during the slice: its carrier before
/// the slice, or the vehicle that loaded it in the slice.
fn carrier(before: Req, joint: &Joint, m: usize) -> usize {
    match before {
        Req::On(k) => k as usize,
        _ => joint
            .iter()
            .position(|c| c.is_some_and(|(mask, _)| mask & (1 << m) != 0))
            .expect("delivered request was loaded"),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::domain::StationGraph;
    use crate::solvers::window::{random_instance, StaticRequest, StaticVehicle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_station(val: f64, cost: f64, horizon: u32) -> StaticInstance {
        StaticInstance {
            graph: Arc::new(StationGraph::new(vec![vec![0, 1], vec![1, 0]]).unwrap()),
            horizon,
            vehicles: vec![StaticVehicle {
                id: 0,
                start: 0,
                capacity: 1,
                join_time: 0,
                preload: vec![],
            }],
            requests: vec![StaticRequest {
                id: 0,
                from: 0,
                to: 1,
                val,
                vol: 1,
                carrier: None,
            }],
            cost_rate: cost,
        }
    }

    #[test]
    fn single_request_optimum() {
        let plan = exact_solve(&two_station(5.0, 0.3, 3), &ExactLimits::default()).unwrap();
        plan.validate(&two_station(5.0, 0.3, 3)).unwrap();
        assert_eq!(plan.objective, 4.7);
    }

    #[test]
    fn unprofitable_request_is_skipped() {
        let inst = two_station(0.2, 0.3, 3);
        let plan = exact_solve(&inst, &ExactLimits::default()).unwrap();
        assert_eq!(plan, Plan::idle(&inst));
    }

    #[test]
    fn one_slice_window_is_too_short() {
        // leaving at slice 0 arrives at slice 1
        let inst = two_station(5.0, 0.0, 1);
        assert_eq!(
            exact_solve(&inst, &ExactLimits::default())
                .unwrap()
                .objective,
            0.0
        );
    }

    #[test]
    fn no_requests_with_cost() {
        let mut inst = two_station(5.0, 0.5, 4);
        inst.requests.clear();
        assert_eq!(
            exact_solve(&inst, &ExactLimits::default())
                .unwrap()
                .objective,
            0.0
        );
    }

    #[test]
    fn too_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let inst = random_instance(&mut rng, 5, 1, 1, 4);
        assert_eq!(
            exact_solve(&inst, &ExactLimits::default()),
            Err(ExactError::TooLarge {
                what: "stations",
                value: 5,
                limit: 4
            })
        );
    }

    #[test]
    fn plans_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let inst = random_instance(&mut rng, 3, 2, 3, 6);
            let plan = exact_solve(&inst, &ExactLimits::default()).unwrap();
            plan.validate(&inst).unwrap();
        }
    }
}
