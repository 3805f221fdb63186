use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use proctensor::random::seed_from_env;
use proctensor::scenarios::BUILTINS;
use proctensor::sweep::{run_sweep, to_csv, SweepSpec};
use proctensor::{builtin, classify, default_grid, Scenario, Tolerances, DEFAULT_GRID_POINTS};

mod demo;
mod render;

#[derive(Parser)]
#[command(name = "proctensor", version, about = "Classify three-time quantum processes by divisibility and Markovianity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a scenario file or a builtin (`builtin:<name>?omega=..&s=..&t=..`).
    Classify {
        scenario: String,
        /// Grid points for parametric scenarios.
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
        /// Residual at or below which a test counts as passed.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep a parameter of a builtin family and write a CSV table.
    Sweep {
        #[arg(long, default_value = "partial-swap")]
        builtin: String,
        #[arg(long, default_value = "omega_t")]
        param: String,
        /// `lo:hi:step`.
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print expected and computed verdicts for a worked example.
    Demo {
        #[arg(value_parser = ["appB", "appC", "fig2a"])]
        name: String,
    },
    /// Compare the Born rule against step-by-step density-matrix simulation.
    Selftest {
        #[arg(long, default_value_t = 100)]
        scenarios: usize,
        #[arg(long, default_value_t = 5)]
        triples: usize,
    },
}

/// Exit 1: an invariant or expected result does not hold. Exit 2: bad input.
#[derive(Debug)]
enum Failure {
    Violation(String),
    Input(String),
}

impl From<proctensor::Error> for Failure {
    fn from(e: proctensor::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances, Failure> {
    match tol {
        None => Ok(Tolerances::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(Tolerances::with_verdict(t)),
        Some(t) => Err(Failure::Input(format!("--tol must be positive, got {t}"))),
    }
}

fn load_scenario(arg: &str, tol: &Tolerances) -> Result<Scenario, Failure> {
    let bare = arg.split('?').next().unwrap_or(arg);
    if arg.starts_with("builtin:") || (BUILTINS.contains(&bare) && !Path::new(arg).exists()) {
        return Ok(builtin(arg)?);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read `{arg}`: {e}")))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("`{arg}` is not valid JSON: {e}")))?;
    Ok(Scenario::from_json(&value, tol)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { scenario, grid, tol, json } => {
            let tol = tolerances(tol)?;
            let scn = load_scenario(&scenario, &tol)?;
            let grid = default_grid(&scn, grid)?;
            let report = classify(&scn, &grid, &tol)?;
            print!("{}", render::report_table(&report));
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                write_file(&path, &text)?;
            }
            if !report.hierarchy_violations.is_empty() {
                return Err(Failure::Violation(report.hierarchy_violations.join("; ")));
            }
            Ok(())
        }
        Command::Sweep { builtin, param, range, out, grid, tol } => {
            let tol = tolerances(tol)?;
            if builtin != "partial-swap" && builtin != "appC" {
                return Err(Failure::Input(format!(
                    "sweeps are defined for the partial-swap family only, not `{builtin}`"
                )));
            }
            let (lo, hi, step) = SweepSpec::parse_range(&range)?;
            let spec = SweepSpec::new(&param, lo, hi, step, grid)?;
            let rows = run_sweep(&spec, &tol)?;
            write_file(&out, &to_csv(&spec, &rows))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Demo { name } => {
            let outcome = demo::run(&name)?;
            print!("{}", outcome.text);
            if outcome.matches {
                Ok(())
            } else {
                Err(Failure::Violation(format!("computed verdicts for {name} differ from the expected ones")))
            }
        }
        Command::Selftest { scenarios, triples } => {
            let seed = seed_from_env();
            let tol = Tolerances::default();
            let s = proctensor::oracle::oracle_equivalence(seed, scenarios, triples, &tol)?;
            println!("seed {seed}: {} scenarios, {} instrument triples, {} probabilities", s.scenarios, s.triples, s.probabilities);
            println!("max |born_rule - oracle| = {:.3e}", s.max_deviation);
            println!("max |Σ P - 1|            = {:.3e}", s.max_completeness_error);
            if s.max_deviation <= 1e-10 && s.max_completeness_error <= 1e-10 {
                println!("selftest passed");
                Ok(())
            } else {
                Err(Failure::Violation("Born rule disagrees with the oracle".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
