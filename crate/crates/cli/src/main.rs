use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qmeas_core::inequality::{heisenberg_form_violation_search_with_outcomes, random_sweep_with_outcomes, RelationId};
use qmeas_core::report::{analyze, distribution_csv, weak_sweep};
use qmeas_core::sampling::sample;
use qmeas_core::scenario::load_scenario;

#[derive(Parser)]
#[command(
    name = "qmeas",
    version,
    about = "Noise, disturbance and uncertainty relations of quantum instruments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a scenario file.
    Validate { file: PathBuf },
    /// Print the full analysis of a scenario.
    Analyze {
        file: PathBuf,
        /// Also write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the quasiprobability tables as CSV into this directory.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo sampling of outcomes.
    Sample {
        file: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Weak-probe error against the TMH tables for a list of strengths.
    Sweep {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.2,0.1,0.05,0.02,0.01")]
        g: Vec<f64>,
    },
    /// Check the universal relations on random scenarios.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        outcomes: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Report the scenario with the most negative epsilon_A eta_B - C_AB.
        #[arg(long)]
        search_heisenberg_violation: bool,
    },
}

/// Raised when a universal relation fails on generated input.
#[derive(Debug)]
struct RelationFailure(String);

impl std::fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RelationFailure {}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { file } => {
            let s = load_scenario(&file).with_context(|| format!("validating {}", file.display()))?;
            println!(
                "ok: {} (d = {}, {} outcomes, digest {})",
                s.name(),
                s.dim(),
                s.instrument.len(),
                s.digest()
            );
        }
        Command::Analyze { file, json, csv } => {
            let s = load_scenario(&file).with_context(|| format!("loading {}", file.display()))?;
            let report = analyze(&s).with_context(|| format!("analyzing {}", file.display()))?;
            print!("{}", report.to_text());
            if let Some(path) = json {
                fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(dir) = csv {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                fs::write(dir.join("tmh_error.csv"), distribution_csv(&report.tmh_error))?;
                if let Some(d) = &report.tmh_disturbance {
                    fs::write(dir.join("tmh_disturbance.csv"), distribution_csv(d))?;
                }
            }
        }
        Command::Sample {
            file,
            shots,
            seed,
            json,
        } => {
            let s = load_scenario(&file).with_context(|| format!("loading {}", file.display()))?;
            let run = sample(&s, shots, seed)?;
            if json {
                println!("{}", run.to_json());
                return Ok(());
            }
            println!("seed {seed}, {shots} shots");
            for (label, c) in run.labels.iter().zip(&run.counts) {
                println!("  {label:<8} {c:>12} {:>12.6}", *c as f64 / shots as f64);
            }
            println!("mean       {:.9} +- {:.3e}", run.mean.value, run.mean.standard_error);
            for mo in &run.moments {
                println!(
                    "<A^{}>      {:.9} +- {:.3e} (exact {:.9})",
                    mo.order, mo.estimate.value, mo.estimate.standard_error, mo.exact
                );
            }
            if let Some(e) = run.epsilon_sq {
                println!("epsilon^2  {:.9} +- {:.3e}", e.value, e.standard_error);
            }
        }
        Command::Sweep { file, g } => {
            let s = load_scenario(&file).with_context(|| format!("loading {}", file.display()))?;
            print!("{}", weak_sweep(&s, &g)?.to_csv());
        }
        Command::Random {
            dim,
            outcomes,
            count,
            seed,
            search_heisenberg_violation,
        } => {
            if search_heisenberg_violation {
                let (best, rec) = heisenberg_form_violation_search_with_outcomes(&[dim], outcomes, count, seed)?;
                println!(
                    "most negative epsilon_A eta_B - C_AB: {:.9} ({}, lhs {:.9}, rhs {:.9})",
                    rec.margin,
                    best.name(),
                    rec.lhs,
                    rec.rhs
                );
                println!("{}", best.to_json_string());
                return Ok(());
            }
            let summary = random_sweep_with_outcomes(&[dim], outcomes, count, seed)?;
            println!(
                "{} scenarios (d = {dim}, {outcomes} outcomes, seed {seed})",
                summary.scenarios
            );
            for rel in RelationId::UNIVERSAL {
                if let Some(m) = summary.min_margin.get(&rel) {
                    println!("  {:<28} min margin {:>12.3e}", rel.name(), m);
                }
            }
            let failed: Vec<_> = summary.records.iter().filter(|r| !r.satisfied).collect();
            if let Some(first) = failed.first() {
                return Err(RelationFailure(format!(
                    "{} violated records, first: {} margin {:e} (scenario digest {})",
                    failed.len(),
                    first.relation,
                    first.margin,
                    first.inputs_digest
                ))
                .into());
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<qmeas_core::Error>() {
            return if e.is_validation() { 1 } else { 2 };
        }
        if cause.is::<RelationFailure>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
