//! Command-line laboratory: scenario execution, convergence studies,
//! catalog listing, and config validation.
//!
//! Exit codes: 0 all requested verdicts consistent, 1 some verdict
//! inconsistent (or convergence out of band), 2 configuration error.

mod config;
mod convergence;
mod jsonfmt;
mod runner;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use umbilic_core::catalog;

#[derive(Parser)]
#[command(name = "umbilic-lab", version, about = "Numerical laboratory for curves on immersed submanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (builtin name or JSON config path) and emit reports.
    Run {
        #[arg(long)]
        scenario: String,
        /// Override the integration step.
        #[arg(long)]
        step: Option<f64>,
        /// Override the parameter span, as "a,b".
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        span: Option<[f64; 2]>,
        /// Worker threads (fallback: UMBILIC_LAB_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integrator-order study over a ladder of step sizes.
    Convergence {
        /// Builtin scenario or config path; its first entry seeds the study.
        #[arg(long, conflicts_with = "entry")]
        scenario: Option<String>,
        /// Catalog entry to study directly.
        #[arg(long)]
        entry: Option<String>,
        /// Curve kind: "geodesic" or "pseudo-geodesic".
        #[arg(long, default_value = "pseudo-geodesic")]
        kind: String,
        /// Pseudo-geodesic constant.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Comma-separated step ladder.
        #[arg(long, default_value = "4e-3,2e-3,1e-3", value_parser = parse_steps)]
        steps: std::vec::Vec<f64>,
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        span: Option<[f64; 2]>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List catalog entries with their ground-truth flags.
    Catalog,
    /// Parse and validate a scenario config, reporting diagnostics.
    ValidateConfig {
        #[arg(long)]
        scenario: String,
    },
}

fn parse_span(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("span must be two comma-separated numbers".into());
    }
    let a: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok([a, b])
}

fn parse_steps(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}")))
        .collect()
}

fn thread_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("UMBILIC_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0) // 0 lets rayon pick the default
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            step,
            span,
            threads,
            out,
            seed,
        } => {
            let mut cfg = match config::load_scenario(&scenario) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(h) = step {
                cfg.step = h;
            }
            if let Some(sp) = span {
                cfg.span = sp;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let threads = thread_count(threads);
            match runner::run_scenario(&cfg, &out, threads) {
                Ok(outcome) => {
                    println!(
                        "scenario '{}': report at {}, manifest at {}",
                        cfg.name,
                        outcome.report_path.display(),
                        outcome.manifest_path.display()
                    );
                    if outcome.had_errors {
                        println!("some seeds reported errors; see report.json");
                    }
                    if outcome.all_consistent {
                        println!("all requested verdicts consistent");
                        ExitCode::SUCCESS
                    } else {
                        println!("some verdicts inconsistent");
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Convergence {
            scenario,
            entry,
            kind,
            c,
            steps,
            span,
            out,
            seed,
        } => {
            let entry_name = match (&entry, &scenario) {
                (Some(e), _) => e.clone(),
                (None, Some(s)) => match config::load_scenario(s) {
                    Ok(cfg) if !cfg.entries.is_empty() => cfg.entries[0].clone(),
                    Ok(_) => {
                        eprintln!("error: scenario has no catalog entries");
                        return ExitCode::from(2);
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                },
                (None, None) => {
                    eprintln!("error: convergence needs --entry or --scenario");
                    return ExitCode::from(2);
                }
            };
            let Some(entry) = catalog::lookup(&entry_name) else {
                eprintln!(
                    "error: unknown catalog entry '{entry_name}'; available: {}",
                    catalog::names().join(", ")
                );
                return ExitCode::from(2);
            };
            let choice = match kind.as_str() {
                "geodesic" => convergence::CurveChoice::Geodesic,
                "pseudo-geodesic" | "pg" => convergence::CurveChoice::PseudoGeodesic { c },
                other => {
                    eprintln!("error: unknown curve kind '{other}'");
                    return ExitCode::from(2);
                }
            };
            let span = span.unwrap_or([-1.0, 1.0]);
            let seed = seed.unwrap_or(42);
            match convergence::convergence_study(&entry, choice, &steps, span, seed) {
                Ok(study) => {
                    if let Err(e) = std::fs::create_dir_all(&out) {
                        eprintln!("error: creating {}: {e}", out.display());
                        return ExitCode::from(2);
                    }
                    let csv = out.join(format!("convergence_{}.csv", study.entry));
                    if let Err(e) = convergence::write_csv(&study, &csv) {
                        eprintln!("error: writing {}: {e}", csv.display());
                        return ExitCode::from(2);
                    }
                    for row in &study.rows {
                        println!("h = {:10.3e}  residual = {:12.5e}", row.step, row.residual);
                    }
                    match (study.at_floor, study.slope) {
                        (true, _) => println!("residuals at rounding floor"),
                        (false, Some(s)) => println!("fitted slope: {s:.3}"),
                        (false, None) => {}
                    }
                    if study.pass {
                        println!("order check: pass");
                        ExitCode::SUCCESS
                    } else {
                        println!("order check: FAIL (expected slope in [3.5, 4.5])");
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Catalog => {
            for e in catalog::catalog() {
                println!(
                    "{:16} dim {} -> R^{}{}  umbilic={} extrinsic_sphere={} constant_isotropic={} hypersurface={}",
                    e.name,
                    e.immersion.dim(),
                    e.immersion.embedding_dim(),
                    if e.immersion.ambient().is_level_set() {
                        " (level set)"
                    } else {
                        ""
                    },
                    e.flags.totally_umbilic,
                    e.flags.extrinsic_sphere,
                    e.flags.constant_isotropic,
                    e.flags.hypersurface,
                );
            }
            ExitCode::SUCCESS
        }
        Command::ValidateConfig { scenario } => match config::load_scenario(&scenario) {
            Ok(cfg) => match cfg.validate() {
                Ok(()) => {
                    println!("config '{}' is valid", cfg.name);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("invalid config: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
