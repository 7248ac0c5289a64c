//! Builds scenarios from a custom synthetic spec and from a request log, and
//! round-trips one through the scenario file format.

use std::fs;

use dpdp::scenario::{
    generate_synthetic, import_request_log, load_scenario, save_scenario, FleetSpec, SyntheticSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let dir = tmp.path();

    let spec = SyntheticSpec {
        station_count: 8,
        request_count: 30,
        vehicle_count: 2,
        horizon: 24,
        capacity: 4,
        distance_lower_bound: 1,
        distance_upper_bound: 6,
        cost_rate: 0.2,
    };
    let scenario = generate_synthetic(&spec, 11)?;
    let path = dir.join("small.json");
    save_scenario(&scenario, &path)?;
    let back = load_scenario(&path)?;
    assert_eq!(back, scenario);
    println!(
        "synthetic: {} stations, {} requests, mean distance {:.2}, saved to {}",
        scenario.station_count(),
        scenario.requests.len(),
        scenario.graph.mean_distance(),
        path.display()
    );

    // two days on a 3-cell grid
    let log = dir.join("log.csv");
    fs::write(
        &log,
        "day,slot,origin_cell,dest_cell\nmon,0,0,1\nmon,2,1,2\ntue,1,2,0\n",
    )?;
    let dist = dir.join("dist.csv");
    fs::write(&dist, "0,2,4\n2,0,2\n4,2,0\n")?;
    let fleet = FleetSpec {
        count: 2,
        capacity: 3,
        seed: 5,
    };
    for day in import_request_log(&log, &dist, 3, 6, fleet, 1.0)? {
        println!(
            "imported day {}: {} requests",
            day.day,
            day.scenario.requests.len()
        );
    }
    Ok(())
}
