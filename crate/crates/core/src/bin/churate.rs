use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use churate::experiments::{find_scenario, list_scenarios, run_to_dir, RunOptions, ScenarioFile};
use churate::model::ConfigDocument;
use churate::Error;

#[derive(Parser)]
#[command(name = "churate", version, about = "Achievable rates of size-constrained antennas")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CHURATE_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the built-in scenarios.
    List,
    /// Run a scenario and write <name>.csv and <name>.json.
    Run {
        /// Built-in scenario name.
        #[arg(long, env = "CHURATE_SCENARIO", required_unless_present = "scenario_file")]
        scenario: Option<String>,
        /// Scenario definition in JSON instead of a built-in.
        #[arg(long, env = "CHURATE_SCENARIO_FILE", conflicts_with = "scenario")]
        scenario_file: Option<PathBuf>,
        /// Flat JSON document overriding the scenario's base link.
        #[arg(long, env = "CHURATE_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long, env = "CHURATE_OUT", default_value = "out")]
        out: PathBuf,
        #[arg(long, env = "CHURATE_SEED", default_value_t = 0)]
        seed: u64,
        /// Relative tolerance of the rate integrals.
        #[arg(long, env = "CHURATE_REL_TOL")]
        rel_tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.command {
        Command::List => {
            print!("{}", list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            scenario_file,
            config,
            out,
            seed,
            rel_tol,
        } => match run(scenario, scenario_file, config, out, seed, rel_tol) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(match e {
                    Error::InvalidConfig(_) | Error::Json(_) | Error::Domain(_) => 2,
                    _ => 1,
                })
            }
        },
    }
}

fn run(
    name: Option<String>,
    file: Option<PathBuf>,
    config: Option<PathBuf>,
    out: PathBuf,
    seed: u64,
    rel_tol: Option<f64>,
) -> churate::Result<()> {
    let mut scenario = match (name, file) {
        (_, Some(path)) => ScenarioFile::load(&path)?,
        (Some(name), None) => find_scenario(&name)?,
        (None, None) => return Err(Error::InvalidConfig("no scenario given".into())),
    };
    if let Some(path) = config {
        scenario.base = ConfigDocument::load(&path)?.apply(scenario.base)?;
    }
    let mut opts = RunOptions {
        seed,
        ..RunOptions::default()
    };
    if let Some(tol) = rel_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidConfig(format!("--rel-tol must lie in (0, 1), got {tol}")));
        }
        opts = opts.with_rel_tol(tol);
    }
    let (csv, meta) = run_to_dir(&scenario, &opts, &out)?;
    eprintln!(
        "{}: {} rows -> {} ({:.2} s)",
        meta.scenario,
        meta.rows,
        csv.display(),
        meta.wall_time_s
    );
    for note in &meta.infeasible {
        eprintln!("  infeasible: {note}");
    }
    Ok(())
}
