//! Task-list encoding shared by the metaheuristics. A genome lists, per
//! vehicle, the order in which it visits pickups and deliveries; timing is
//! recovered by decoding with earliest departures plus per-task slack.

use rand::seq::SliceRandom;
use rand::Rng;

use super::plan::{Plan, PlanStop};
use super::window::StaticInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Pickup,
    Deliver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub kind: TaskKind,
    pub request: usize,
    /// Extra slices to wait before leaving for this task's station.
    pub wait: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genome {
    pub tasks: Vec<Vec<Task>>,
}

impl Genome {
    pub fn empty(instance: &StaticInstance) -> Self {
        let mut tasks = vec![Vec::new(); instance.vehicles.len()];
        for (k, v) in instance.vehicles.iter().enumerate() {
            tasks[k] = v
                .preload
                .iter()
                .map(|&m| Task {
                    kind: TaskKind::Deliver,
                    request: m,
                    wait: 0,
                })
                .collect();
        }
        Genome { tasks }
    }

    /// Every open request on a random vehicle (or none), at random positions.
    pub fn random<R: Rng + ?Sized>(instance: &StaticInstance, rng: &mut R) -> Self {
        let mut g = Genome::empty(instance);
        for k in 0..g.tasks.len() {
            g.tasks[k].shuffle(rng);
        }
        for m in instance.open_requests() {
            g.reinsert(instance, m, rng);
        }
        g
    }

    /// Vehicle whose list mentions request `m`.
    pub fn owner(&self, m: usize) -> Option<usize> {
        self.tasks
            .iter()
            .position(|list| list.iter().any(|t| t.request == m))
    }

    pub fn remove(&mut self, m: usize) {
        for list in &mut self.tasks {
            list.retain(|t| t.request != m);
        }
    }

    /// Removes `m` and places it again: preloads go back into their
    /// carrier's list, open requests go to a uniformly drawn vehicle or stay
    /// unserved.
    pub fn reinsert<R: Rng + ?Sized>(&mut self, instance: &StaticInstance, m: usize, rng: &mut R) {
        self.remove(m);
        if self.tasks.is_empty() {
            return;
        }
        match instance.requests[m].carrier {
            Some(k) => {
                let pos = rng.gen_range(0..=self.tasks[k].len());
                self.tasks[k].insert(
                    pos,
                    Task {
                        kind: TaskKind::Deliver,
                        request: m,
                        wait: draw_wait(rng),
                    },
                );
            }
            None => {
                let k = rng.gen_range(0..=self.tasks.len());
                if k < self.tasks.len() {
                    self.insert_pair(k, m, rng);
                }
            }
        }
    }

    /// Inserts pickup then delivery of `m` into vehicle `k` at random positions.
    pub fn insert_pair<R: Rng + ?Sized>(&mut self, k: usize, m: usize, rng: &mut R) {
        let list = &mut self.tasks[k];
        let p = rng.gen_range(0..=list.len());
        list.insert(
            p,
            Task {
                kind: TaskKind::Pickup,
                request: m,
                wait: draw_wait(rng),
            },
        );
        let q = rng.gen_range(p + 1..=list.len());
        list.insert(
            q,
            Task {
                kind: TaskKind::Deliver,
                request: m,
                wait: draw_wait(rng),
            },
        );
    }

    /// Changes the slack of one random task.
    pub fn perturb_wait<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let total: usize = self.tasks.iter().map(Vec::len).sum();
        if total == 0 {
            return;
        }
        let mut i = rng.gen_range(0..total);
        for list in &mut self.tasks {
            if i < list.len() {
                list[i].wait = draw_wait(rng);
                return;
            }
            i -= list.len();
        }
    }

    /// Copies request `m`'s placement from `other`, keeping everything else.
    pub fn adopt(&mut self, other: &Genome, m: usize) {
        self.remove(m);
        if let Some(k) = other.owner(m) {
            let src = &other.tasks[k];
            for (i, t) in src.iter().enumerate().filter(|(_, t)| t.request == m) {
                let pos = i.min(self.tasks[k].len());
                self.tasks[k].insert(pos, *t);
            }
            // keep pickup ahead of delivery after clamping
            let list = &mut self.tasks[k];
            let p = list
                .iter()
                .position(|t| t.request == m && t.kind == TaskKind::Pickup);
            let d = list
                .iter()
                .position(|t| t.request == m && t.kind == TaskKind::Deliver);
            if let (Some(p), Some(d)) = (p, d) {
                if d < p {
                    list.swap(p, d);
                }
            }
        }
    }
}

fn draw_wait<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    if rng.gen_bool(0.75) {
        0
    } else {
        rng.gen_range(1..=3)
    }
}

/// Turns a genome into a feasible plan. Tasks that cannot be honoured
/// (window end, capacity, cargo already unloaded) are skipped; pickups that
/// end up undelivered are dropped and the genome decoded again, so the plan
/// never pays for cargo it does not deliver.
pub fn decode(instance: &StaticInstance, genome: &Genome) -> Plan {
    let mut banned = vec![false; instance.requests.len()];
    loop {
        let routes: Vec<Vec<PlanStop>> = (0..instance.vehicles.len())
            .map(|k| decode_route(instance, k, &genome.tasks[k], &banned))
            .collect();
        let mut delivered = vec![false; instance.requests.len()];
        for m in routes.iter().flatten().flat_map(|s| s.deliveries.iter()) {
            delivered[*m] = true;
        }
        let mut changed = false;
        for m in routes.iter().flatten().flat_map(|s| s.pickups.iter()) {
            if !delivered[*m] {
                banned[*m] = true;
                changed = true;
            }
        }
        if !changed {
            let mut plan = Plan {
                routes,
                objective: 0.0,
            };
            plan.objective = plan.totals(instance).objective(instance.cost_rate);
            return plan;
        }
    }
}

fn decode_route(
    instance: &StaticInstance,
    k: usize,
    tasks: &[Task],
    banned: &[bool],
) -> Vec<PlanStop> {
    let graph = &instance.graph;
    let h = instance.horizon;
    let vehicle = &instance.vehicles[k];
    let requests = &instance.requests;

    let mut first = PlanStop::at(vehicle.join_time, vehicle.start);
    let mut onboard: Vec<usize> = vehicle.preload.clone();
    if vehicle.join_time > 0 {
        first.deliveries = onboard
            .iter()
            .copied()
            .filter(|&m| requests[m].to == vehicle.start)
            .collect();
        onboard.retain(|&m| requests[m].to != vehicle.start);
    }
    let mut load: u32 = onboard.iter().map(|&m| requests[m].vol).sum();
    let mut route = vec![first];

    for task in tasks {
        let m = task.request;
        let r = &requests[m];
        let here = route.last().expect("route has a first stop");
        let (target, pickup) = match task.kind {
            TaskKind::Pickup => {
                if banned[m] || r.carrier.is_some() {
                    continue;
                }
                (r.from, true)
            }
            TaskKind::Deliver => {
                if !onboard.contains(&m) {
                    continue;
                }
                (r.to, false)
            }
        };

        if target == here.location && pickup {
            // loading where we stand: we must still be able to leave afterwards
            if here.time < h && load + r.vol <= vehicle.capacity {
                route.last_mut().unwrap().pickups.push(m);
                onboard.push(m);
                load += r.vol;
            }
            continue;
        }
        if target == here.location {
            continue;
        }

        let arrive = here.time + task.wait + graph.distance(here.location, target) + 1;
        let unloading: Vec<usize> = onboard
            .iter()
            .copied()
            .filter(|&m| requests[m].to == target)
            .collect();
        let load_after: u32 = load - unloading.iter().map(|&m| requests[m].vol).sum::<u32>();
        let feasible = if pickup {
            arrive < h && load_after + r.vol <= vehicle.capacity
        } else {
            arrive <= h
        };
        if !feasible {
            continue;
        }
        let mut stop = PlanStop::at(arrive, target);
        onboard.retain(|m| !unloading.contains(m));
        stop.deliveries = unloading;
        load = load_after;
        if pickup {
            stop.pickups.push(m);
            onboard.push(m);
            load += r.vol;
        }
        route.push(stop);
    }

    // trailing visits that deliver nothing only cost distance
    while route.len() > 1 && route.last().is_some_and(|s| s.deliveries.is_empty()) {
        route.pop();
    }
    route
}

/// Objective of the decoded genome.
pub fn evaluate(instance: &StaticInstance, genome: &Genome) -> f64 {
    decode(instance, genome).objective
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::window::random_instance;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn decoded_plans_are_valid(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, 5, 3, 6, 12);
            let mut g = Genome::random(&inst, &mut rng);
            for _ in 0..20 {
                let plan = decode(&inst, &g);
                prop_assert_eq!(plan.validate(&inst), Ok(()));
                let m = rng.gen_range(0..inst.requests.len().max(1));
                if !inst.requests.is_empty() {
                    g.reinsert(&inst, m, &mut rng);
                }
                g.perturb_wait(&mut rng);
            }
        }
    }

    #[test]
    fn empty_genome_is_idle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = random_instance(&mut rng, 4, 2, 3, 8);
        let plan = decode(
            &inst,
            &Genome {
                tasks: vec![Vec::new(); inst.vehicles.len()],
            },
        );
        assert_eq!(plan, Plan::idle(&inst));
    }

    #[test]
    fn adopt_copies_placement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = random_instance(&mut rng, 4, 2, 3, 8);
        let a = Genome::random(&inst, &mut rng);
        let mut b = Genome::empty(&inst);
        for m in inst.open_requests() {
            b.adopt(&a, m);
        }
        for m in inst.open_requests() {
            assert_eq!(a.owner(m), b.owner(m));
        }
    }
}
