use thiserror::Error;

use super::window::StaticInstance;

/// One visit of a vehicle to a station.
///
/// `time` is the first slice at which the vehicle can act there. Cargo
/// destined to `location` is unloaded on arrival, one slice earlier, and is
/// listed in `deliveries`. `pickups` are loaded on the slice the vehicle
/// leaves, which is `next.time - e - 1` for a leg of length `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStop {
    pub time: u32,
    pub location: usize,
    pub deliveries: Vec<usize>,
    pub pickups: Vec<usize>,
}

/// Per-vehicle schedules in local indices of a [`StaticInstance`]. The first
/// stop of each route is the vehicle's join point.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub routes: Vec<Vec<PlanStop>>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("plan has {found} routes for {expected} vehicles")]
    RouteCount { expected: usize, found: usize },
    #[error("vehicle {0}: route must start at its join point")]
    Start(usize),
    #[error("vehicle {vehicle}, stop {stop}: not enough time to travel from the previous stop")]
    Travel { vehicle: usize, stop: usize },
    #[error("vehicle {vehicle}, stop {stop}: outside the window")]
    Window { vehicle: usize, stop: usize },
    #[error("request {0}: picked more than once or preloaded")]
    DoublePickup(usize),
    #[error("request {request}: picked at station {station}, origin is elsewhere")]
    PickupStation { request: usize, station: usize },
    #[error("vehicle {vehicle}, stop {stop}: pickups at the final stop")]
    DanglingPickup { vehicle: usize, stop: usize },
    #[error("vehicle {vehicle}, stop {stop}: deliveries differ from the cargo unloaded there")]
    Deliveries { vehicle: usize, stop: usize },
    #[error("vehicle {vehicle}, stop {stop}: load exceeds capacity")]
    Capacity { vehicle: usize, stop: usize },
    #[error("objective {stated} differs from the schedule's value {actual}")]
    Objective { stated: f64, actual: f64 },
    #[error("unknown request index {0}")]
    Request(usize),
}

impl PlanStop {
    pub fn at(time: u32, location: usize) -> Self {
        Self {
            time,
            location,
            deliveries: Vec::new(),
            pickups: Vec::new(),
        }
    }
}

impl Plan {
    /// Every vehicle waits at its join point.
    pub fn idle(instance: &StaticInstance) -> Self {
        let routes = instance
            .vehicles
            .iter()
            .map(|v| {
                let mut stop = PlanStop::at(v.join_time, v.start);
                if v.join_time > 0 {
                    stop.deliveries = v
                        .preload
                        .iter()
                        .copied()
                        .filter(|&m| instance.requests[m].to == v.start)
                        .collect();
                }
                vec![stop]
            })
            .collect();
        let mut plan = Plan {
            routes,
            objective: 0.0,
        };
        plan.objective = plan.totals(instance).objective(instance.cost_rate);
        plan
    }

    /// Slice at which the vehicle leaves stop `i` of `route`, if it does.
    pub fn depart(instance: &StaticInstance, route: &[PlanStop], i: usize) -> Option<u32> {
        let next = route.get(i + 1)?;
        let e = instance.graph.distance(route[i].location, next.location);
        next.time.checked_sub(e + 1)
    }

    /// Delivered value and travelled distance, summed over all routes.
    pub fn totals(&self, instance: &StaticInstance) -> Totals {
        let mut totals = Totals::default();
        for route in &self.routes {
            for stop in route {
                totals.value += stop
                    .deliveries
                    .iter()
                    .map(|&m| instance.requests[m].val)
                    .sum::<f64>();
            }
            for pair in route.windows(2) {
                totals.distance +=
                    instance.graph.distance(pair[0].location, pair[1].location) as u64;
            }
        }
        totals
    }

    /// Checks timing, pickup/delivery consistency, capacity and the stated
    /// objective against `instance`.
    pub fn validate(&self, instance: &StaticInstance) -> Result<(), PlanError> {
        if self.routes.len() != instance.vehicles.len() {
            return Err(PlanError::RouteCount {
                expected: instance.vehicles.len(),
                found: self.routes.len(),
            });
        }
        let h = instance.horizon;
        let mut picked = vec![false; instance.requests.len()];
        for r in instance
            .requests
            .iter()
            .enumerate()
            .filter(|(_, r)| r.carrier.is_some())
        {
            picked[r.0] = true;
        }

        for (k, (route, vehicle)) in self.routes.iter().zip(&instance.vehicles).enumerate() {
            let first = route.first().ok_or(PlanError::Start(k))?;
            if first.time != vehicle.join_time || first.location != vehicle.start {
                return Err(PlanError::Start(k));
            }
            let mut onboard: Vec<usize> = vehicle.preload.clone();
            let mut load: u32 = onboard.iter().map(|&m| instance.requests[m].vol).sum();
            for (i, stop) in route.iter().enumerate() {
                if stop.time > h {
                    return Err(PlanError::Window {
                        vehicle: k,
                        stop: i,
                    });
                }
                // unloading on arrival; the join stop only unloads if the vehicle was travelling
                let arrives = i > 0 || vehicle.join_time > 0;
                let mut expected: Vec<usize> = if arrives {
                    onboard
                        .iter()
                        .copied()
                        .filter(|&m| instance.requests[m].to == stop.location)
                        .collect()
                } else {
                    Vec::new()
                };
                let mut stated = stop.deliveries.clone();
                expected.sort_unstable();
                stated.sort_unstable();
                if expected != stated {
                    return Err(PlanError::Deliveries {
                        vehicle: k,
                        stop: i,
                    });
                }
                onboard.retain(|m| !expected.contains(m));
                load -= expected
                    .iter()
                    .map(|&m| instance.requests[m].vol)
                    .sum::<u32>();

                if i + 1 < route.len() {
                    let depart = Plan::depart(instance, route, i)
                        .filter(|&d| d >= stop.time)
                        .ok_or(PlanError::Travel {
                            vehicle: k,
                            stop: i + 1,
                        })?;
                    if depart >= h {
                        return Err(PlanError::Window {
                            vehicle: k,
                            stop: i,
                        });
                    }
                } else if !stop.pickups.is_empty() {
                    return Err(PlanError::DanglingPickup {
                        vehicle: k,
                        stop: i,
                    });
                }
                for &m in &stop.pickups {
                    let r = instance.requests.get(m).ok_or(PlanError::Request(m))?;
                    if std::mem::replace(&mut picked[m], true) {
                        return Err(PlanError::DoublePickup(m));
                    }
                    if r.from != stop.location {
                        return Err(PlanError::PickupStation {
                            request: m,
                            station: stop.location,
                        });
                    }
                    onboard.push(m);
                    load += r.vol;
                }
                if load > vehicle.capacity {
                    return Err(PlanError::Capacity {
                        vehicle: k,
                        stop: i,
                    });
                }
            }
        }

        let actual = self.totals(instance).objective(instance.cost_rate);
        if actual != self.objective {
            return Err(PlanError::Objective {
                stated: self.objective,
                actual,
            });
        }
        Ok(())
    }

    /// Local indices of requests delivered by the plan.
    pub fn delivered(&self) -> impl Iterator<Item = usize> + '_ {
        self.routes
            .iter()
            .flatten()
            .flat_map(|s| s.deliveries.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Totals {
    pub value: f64,
    pub distance: u64,
}

impl Totals {
    pub fn objective(self, cost_rate: f64) -> f64 {
        self.value - cost_rate * self.distance as f64
    }
}
