//! Scenario sources: the synthetic generator, request-log import and the
//! canonical scenario file.

mod import;
mod io;

pub use import::{
    import_request_log, read_distance_file, split_days, DaySplit, FleetSpec, ImportError,
    ImportedDay,
};
pub use io::{
    from_json_str, from_json_value, load_scenario, save_scenario, to_json_string,
    ScenarioFileError, FORMAT_VERSION,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{FleetEntry, ProfitMode, Request, Scenario, StationGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("need at least 2 stations, got {0}")]
    Stations(usize),
    #[error("need at least 1 vehicle")]
    Vehicles,
    #[error("horizon must be positive")]
    Horizon,
    #[error("capacity must be positive")]
    Capacity,
    #[error("cost rate must be finite and non-negative")]
    CostRate,
    #[error("distance bounds {0}..={1} are empty")]
    DistanceBounds(u32, u32),
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub station_count: usize,
    pub request_count: usize,
    pub vehicle_count: usize,
    pub horizon: u32,
    pub capacity: u32,
    /// Raw pairwise travel times between distinct stations are drawn from
    /// `distance_lower_bound..=distance_upper_bound`.
    pub distance_lower_bound: u32,
    pub distance_upper_bound: u32,
    pub cost_rate: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.station_count < 2 {
            return Err(SpecError::Stations(self.station_count));
        }
        if self.vehicle_count == 0 {
            return Err(SpecError::Vehicles);
        }
        if self.horizon == 0 {
            return Err(SpecError::Horizon);
        }
        if self.capacity == 0 {
            return Err(SpecError::Capacity);
        }
        if !(self.cost_rate.is_finite() && self.cost_rate >= 0.0) {
            return Err(SpecError::CostRate);
        }
        if self.distance_lower_bound > self.distance_upper_bound {
            return Err(SpecError::DistanceBounds(
                self.distance_lower_bound,
                self.distance_upper_bound,
            ));
        }
        Ok(())
    }

    /// Named presets: `synth-S`, `synth-S-cost`, `synth-L`, `synth-L-cost`, `synth-XL`.
    ///
    /// Presets draw distinct-station distances from `1..=D`. A lower bound of
    /// zero lets the closure collapse most of the graph onto zero-length
    /// edges (mean closed distance around 0.6 for `synth-S` instead of 3).
    pub fn preset(name: &str) -> Option<Self> {
        let (station_count, request_count, vehicle_count, horizon, bound, cost_rate) = match name {
            "synth-S" => (20, 110, 5, 58, 10, 0.0),
            "synth-S-cost" => (20, 110, 5, 58, 10, 0.3),
            "synth-L" => (50, 550, 15, 128, 30, 0.0),
            "synth-L-cost" => (50, 550, 15, 128, 30, 0.3),
            "synth-XL" => (300, 550, 50, 128, 20, 0.0),
            _ => return None,
        };
        Some(Self {
            station_count,
            request_count,
            vehicle_count,
            horizon,
            capacity: 3,
            distance_lower_bound: 1,
            distance_upper_bound: bound,
            cost_rate,
        })
    }

    pub const PRESETS: [&'static str; 5] = [
        "synth-S",
        "synth-S-cost",
        "synth-L",
        "synth-L-cost",
        "synth-XL",
    ];
}

/// Draws a scenario: symmetric uniform distances closed under shortest
/// paths, uniform origin/destination pairs with distinct endpoints, uniform
/// appearance times in `1..=T`, value equal to the travel distance, unit
/// volumes, uniform vehicle start stations.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Scenario, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.station_count;

    let mut raw = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.gen_range(spec.distance_lower_bound..=spec.distance_upper_bound) as i64;
            raw[i][j] = d;
            raw[j][i] = d;
        }
    }
    let graph = StationGraph::closed(&raw).expect("generated matrix is well formed");

    let fleet = (0..spec.vehicle_count)
        .map(|_| FleetEntry {
            station: rng.gen_range(0..n),
            capacity: spec.capacity,
        })
        .collect();

    let requests = (0..spec.request_count)
        .map(|_| {
            let from = rng.gen_range(0..n);
            // uniform over the other n-1 stations
            let mut to = rng.gen_range(0..n - 1);
            if to >= from {
                to += 1;
            }
            let time = rng.gen_range(1..=spec.horizon);
            Request {
                from,
                to,
                val: graph.distance(from, to) as f64,
                vol: 1,
                time,
            }
        })
        .collect();

    Ok(Scenario {
        graph,
        fleet,
        requests,
        horizon: spec.horizon,
        cost_rate: spec.cost_rate,
        profit_mode: ProfitMode::Distance,
    })
}

/// Generates a named synthetic preset.
pub fn generate_preset(name: &str, seed: u64) -> Option<Scenario> {
    SyntheticSpec::preset(name)
        .map(|spec| generate_synthetic(&spec, seed).expect("presets are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_s_counts() {
        let s = generate_preset("synth-S", 0).unwrap();
        assert_eq!(s.station_count(), 20);
        assert_eq!(s.request_count(), 110);
        assert_eq!(s.vehicle_count(), 5);
        assert_eq!(s.horizon, 58);
        assert!(s.fleet.iter().all(|f| f.capacity == 3));
        s.validate().unwrap();
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_preset("synth-S", 11).unwrap();
        let b = generate_preset("synth-S", 11).unwrap();
        assert_eq!(to_json_string(&a), to_json_string(&b));
        assert_ne!(a, generate_preset("synth-S", 12).unwrap());
    }

    #[test]
    fn triangle_inequality_on_all_triples() {
        for seed in 0..5 {
            let s = generate_preset("synth-S", seed).unwrap();
            let n = s.station_count();
            for i in 0..n {
                for u in 0..n {
                    for j in 0..n {
                        assert!(
                            s.graph.distance(i, j)
                                <= s.graph.distance(i, u) + s.graph.distance(u, j)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn requests_follow_recipe() {
        let s = generate_preset("synth-L-cost", 3).unwrap();
        assert_eq!(s.cost_rate, 0.3);
        for r in &s.requests {
            assert_ne!(r.from, r.to);
            assert_eq!(r.val, s.graph.distance(r.from, r.to) as f64);
            assert_eq!(r.vol, 1);
            assert!((1..=s.horizon).contains(&r.time));
        }
    }

    #[test]
    fn closure_is_idempotent_on_output() {
        let s = generate_preset("synth-S", 4).unwrap();
        let raw: Vec<Vec<i64>> = s
            .graph
            .matrix()
            .iter()
            .map(|r| r.iter().map(|&v| v as i64).collect())
            .collect();
        assert_eq!(
            crate::domain::shortest_path_closure(&raw).unwrap(),
            s.graph.matrix()
        );
    }

    #[test]
    fn appearance_times_are_uniform() {
        // 10^4 draws over T = 58 bins; chi-square critical value for 57 dof at p = 0.01 is 84.73
        let spec = SyntheticSpec {
            request_count: 10_000,
            ..SyntheticSpec::preset("synth-S").unwrap()
        };
        let s = generate_synthetic(&spec, 99).unwrap();
        let t = s.horizon as usize;
        let mut counts = vec![0f64; t];
        for r in &s.requests {
            counts[r.time as usize - 1] += 1.0;
        }
        let expected = 10_000.0 / t as f64;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 84.73, "chi2 = {chi2}");
    }

    #[test]
    fn spec_validation() {
        let mut spec = SyntheticSpec::preset("synth-S").unwrap();
        spec.station_count = 1;
        assert_eq!(generate_synthetic(&spec, 0), Err(SpecError::Stations(1)));
        assert!(SyntheticSpec::preset("nope").is_none());
    }
}
