use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Parser, Subcommand};

use dpdp::bench::{
    emit_table, parse_seeds, run_benchmark, BenchConfig, PolicyKind, PolicySpec, ScenarioSource,
    TableFormat,
};
use dpdp::scenario::{generate_preset, load_scenario, save_scenario};
use dpdp::server::{serve, ScenarioRegistry, Transport};

#[derive(Parser)]
#[command(
    name = "dpdp",
    version,
    about = "Dynamic pickup and delivery workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario file.
    Gen {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a policy over a batch of seeds and write a result table.
    #[command(group(ArgGroup::new("source").required(true).args(["scenario", "preset"])))]
    Run {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// idle, nearest, prior, sa-rh, ga-rh or exact-rh
        #[arg(long)]
        policy: String,
        /// `a..b`, `a..=b` or a single seed
        #[arg(long, default_value = "0..10")]
        seeds: String,
        /// Result table; `.md` writes markdown, anything else csv.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// key=value parameter file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-episode limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Serve the environment over a line-delimited JSON protocol.
    Serve {
        /// `stdio`, `tcp:PORT` or `tcp:HOST:PORT`
        #[arg(long, default_value = "stdio")]
        transport: String,
        /// Extra named scenarios as NAME=FILE.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

fn config(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn gen(preset: &str, seed: u64, out: &PathBuf) -> Result<(), Failure> {
    let scenario = generate_preset(preset, seed)
        .ok_or_else(|| config(format!("unknown preset `{preset}`")))?;
    save_scenario(&scenario, out).map_err(runtime)?;
    println!(
        "wrote {} ({} stations, {} vehicles, {} requests, horizon {})",
        out.display(),
        scenario.station_count(),
        scenario.fleet.len(),
        scenario.requests.len(),
        scenario.horizon
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    scenario: Option<PathBuf>,
    preset: Option<String>,
    policy: &str,
    seeds: &str,
    out: &PathBuf,
    jobs: usize,
    config_file: Option<PathBuf>,
    time_limit: Option<f64>,
) -> Result<(), Failure> {
    let mut spec = PolicySpec::new(policy.parse::<PolicyKind>().map_err(config)?);
    let mut limit = None;
    if let Some(path) = config_file {
        let text =
            fs::read_to_string(&path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        limit = spec
            .apply_config(&text)
            .map_err(|e| config(format!("{}: {e}", path.display())))?;
    }
    if let Some(secs) = time_limit {
        let d = std::time::Duration::try_from_secs_f64(secs)
            .map_err(|e| config(format!("--time-limit: {e}")))?;
        limit = Some(d);
    }
    let source = match (scenario, preset) {
        (Some(path), _) => ScenarioSource::File(path),
        (None, Some(name)) => ScenarioSource::Preset(name),
        (None, None) => unreachable!("clap requires a source"),
    };
    let bench = BenchConfig {
        source,
        policy: spec,
        seeds: parse_seeds(seeds).map_err(config)?,
        time_limit: limit,
        jobs,
    };
    let table =
        run_benchmark(&bench).map_err(|e| if e.is_config() { config(e) } else { runtime(e) })?;
    let file = File::create(out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;
    emit_table(&table, TableFormat::for_path(out), BufWriter::new(file)).map_err(runtime)?;
    let mean = table.mean();
    println!(
        "{} episodes, mean obj {:.3}, mean comp {:.3}, mean {:.3} s, {} timed out -> {}",
        table.rows.len(),
        mean.obj,
        mean.comp,
        mean.seconds,
        table.timed_out(),
        out.display()
    );
    Ok(())
}

fn serve_cmd(transport: &str, scenarios: &[String]) -> Result<(), Failure> {
    let transport: Transport = transport.parse().map_err(config)?;
    let mut registry = ScenarioRegistry::new();
    for entry in scenarios {
        let (name, path) = entry
            .split_once('=')
            .ok_or_else(|| config(format!("expected NAME=FILE, got `{entry}`")))?;
        registry.insert(
            name,
            load_scenario(path).map_err(|e| config(format!("{path}: {e}")))?,
        );
    }
    serve(&transport, Arc::new(registry)).map_err(runtime)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { preset, seed, out } => gen(&preset, seed, &out),
        Command::Run {
            scenario,
            preset,
            policy,
            seeds,
            out,
            jobs,
            config,
            time_limit,
        } => run(
            scenario, preset, &policy, &seeds, &out, jobs, config, time_limit,
        ),
        Command::Serve {
            transport,
            scenarios,
        } => serve_cmd(&transport, &scenarios),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
