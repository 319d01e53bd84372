use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use implicit_control::analysis::run_verification_suite;
use implicit_control::harness::{
    emit_csv, emit_plot, final_log_length, mean_stderr, parse_csv, run_experiment, sweep,
    sweep_table, write_sweep_table, ExperimentConfig, ExperimentResult, PlotKind, SweepSpec,
};
use implicit_control::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Standard and implicit linear Q-learning / SARSA experiments.
#[derive(Parser, Debug)]
#[command(name = "implicit-control", version)]
struct Cli {
    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for CSV and SVG outputs.
    #[arg(long, global = true, default_value = "results")]
    out_dir: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run a config at every step size in a grid, for both update modes.
    Sweep {
        config: PathBuf,
        /// Comma-separated, strictly ascending step sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<String>,
    },
    /// Run the oracle suite.
    Verify,
    /// Draw a figure from a results CSV.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        kind: String,
    },
}

enum Failure {
    Config(String),
    Verify,
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| match e {
        Error::Io { .. } => Failure::Config(e.to_string()),
        other => other.into(),
    })?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn out_path(dir: &Path, name: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Other(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

fn print_summary(res: &ExperimentResult) {
    let row = implicit_control::harness::summarize(res);
    let (ll, ll_se) = final_log_length(res, 1);
    println!(
        "{} {} {} beta0={} s={}: final-quartile reward {:.4} ± {:.4}, final ln length {:.4} ± {:.4}, diverged runs {}/{}",
        res.env,
        res.algorithm.as_str(),
        res.mode.as_str(),
        res.beta0,
        res.exponent,
        row.mean,
        row.stderr,
        ll,
        ll_se,
        row.diverged_runs,
        row.n_runs
    );
    let checkpoints: Vec<f64> = res.runs.iter().filter_map(|r| r.checkpoint_reward).collect();
    if !checkpoints.is_empty() {
        let (m, se) = mean_stderr(&checkpoints);
        println!("  checkpoint reward {m:.4} ± {se:.4} over {} runs", checkpoints.len());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config, cli.seed)?;
            let res = run_experiment(&cfg, cli.jobs)?;
            let label = cfg.label();
            let csv = out_path(&cli.out_dir, &format!("{label}.csv"))?;
            emit_csv(std::slice::from_ref(&res), &csv)?;
            write_sweep_table(&sweep_table(std::slice::from_ref(&res)), &out_path(&cli.out_dir, &format!("{label}_summary.csv"))?)?;
            print_summary(&res);
            println!("wrote {}", csv.display());
        }
        Command::Sweep { config, betas } => {
            let cfg = load(&config, cli.seed)?;
            let betas = betas
                .iter()
                .map(|b| {
                    b.trim()
                        .parse::<f64>()
                        .map_err(|_| Failure::Config(format!("bad step size {b:?} in --betas")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SweepSpec::both_modes(betas, cfg.agent.algorithm)?;
            let results = sweep(&cfg, &spec, cli.jobs)?;
            let label = cfg.label();
            let csv = out_path(&cli.out_dir, &format!("{label}_sweep.csv"))?;
            emit_csv(&results, &csv)?;
            write_sweep_table(&sweep_table(&results), &out_path(&cli.out_dir, &format!("{label}_sweep_summary.csv"))?)?;
            for r in &results {
                print_summary(r);
            }
            println!("wrote {}", csv.display());
        }
        Command::Verify => {
            let report = run_verification_suite();
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Verify);
            }
        }
        Command::Plot { csv, kind } => {
            let kind: PlotKind = kind.parse()?;
            let results = parse_csv(&csv).map_err(|e| match e {
                Error::Io { .. } | Error::Csv { .. } => Failure::Config(e.to_string()),
                other => other.into(),
            })?;
            if results.is_empty() {
                return Err(Failure::Config(format!("{} has no result rows", csv.display())));
            }
            let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
            let svg = out_path(&cli.out_dir, &format!("{stem}_{}.svg", kind.as_str()))?;
            emit_plot(&results, kind, &svg)?;
            println!("wrote {}", svg.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
