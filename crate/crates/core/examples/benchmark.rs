//! Runs two policies over ten synth-S seeds in parallel and prints markdown
//! result tables.

use std::io;

use dpdp::bench::{
    emit_table, run_benchmark, BenchConfig, PolicyKind, PolicySpec, ScenarioSource, TableFormat,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [PolicyKind::Nearest, PolicyKind::Prior] {
        let config = BenchConfig {
            source: ScenarioSource::Preset("synth-S".into()),
            policy: PolicySpec::new(kind),
            seeds: (0..10).collect(),
            time_limit: None,
            jobs: 0,
        };
        let table = run_benchmark(&config)?;
        emit_table(&table, TableFormat::Markdown, io::stdout().lock())?;
        println!();
    }
    Ok(())
}
