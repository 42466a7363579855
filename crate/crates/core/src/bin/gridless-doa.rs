use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gridless_doa::experiment::{run_sweep, ExperimentConfig};
use gridless_doa::geometry::build_virtual_grid;
use gridless_doa::oracle;
use gridless_doa::pswf::{compute_basis, DEFAULT_EPSILON};
use gridless_doa::signal::{select_bins, Scenario};

#[derive(Parser)]
#[command(version, about = "Gridless wideband DOA estimation on arbitrary linear arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a key = value config file.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `n_trials` from the config.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Cross-check computed quantities against independent references.
    Oracle {
        /// Skip the end-to-end SDP solve.
        #[arg(long)]
        skip_solver: bool,
    },
    /// Print the PSWF eigenvalue decay as CSV.
    PswfDump {
        /// Bandwidth parameter; alternatively derive it from a scenario.
        #[arg(long, conflicts_with = "scenario")]
        c: Option<f64>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> gridless_doa::Result<ExitCode> {
    match cli.command {
        Command::Run { config, output_dir, trials } => {
            let mut cfg = ExperimentConfig::parse(&std::fs::read_to_string(config)?)?;
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            if let Some(n) = trials {
                cfg.n_trials = n;
            }
            let summary = run_sweep(&cfg)?;
            print!("{}", summary.to_csv_with_timing());
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { skip_solver } => {
            let checks = oracle::run_all(!skip_solver)?;
            print!("{}", oracle::report(&checks));
            Ok(if checks.iter().all(|c| c.passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::PswfDump { c, scenario, epsilon } => {
            let c = match (c, scenario) {
                (Some(c), _) => c,
                (None, Some(path)) => {
                    let s = Scenario::parse(&std::fs::read_to_string(path)?)?;
                    let alphas: Vec<f64> = select_bins(&s.params)?.iter().map(|&f| s.params.alpha(f)).collect();
                    let grid = build_virtual_grid(&s.geometry()?, &alphas, None)?;
                    std::f64::consts::PI * grid.max_position()
                }
                (None, None) => {
                    return Err(gridless_doa::Error::InvalidParameter("pass --c or --scenario".into()));
                }
            };
            let basis = compute_basis(c, epsilon)?;
            eprintln!("c = {c}, d = {}, cond(Phi) = {:.3e}", basis.d(), basis.phi_condition());
            print!("{}", basis.decay_csv());
            Ok(ExitCode::SUCCESS)
        }
    }
}
