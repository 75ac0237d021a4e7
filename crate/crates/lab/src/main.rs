//! Command-line entry point.
//!
//! Exit codes: 0 when every check passed, 1 when the run completed with
//! failed checks, 2 for configuration or execution errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Parser, Subcommand};

use fujita_lab::config::{validate_config, Scenario};
use fujita_lab::output::write_json;
use fujita_lab::scenario::{run_scenario, RunRecord};

#[derive(Parser)]
#[command(
    name = "fujita-lab",
    about = "Batch experiments for the doubly critical semilinear heat equation in L1",
    version
)]
struct Cli {
    /// List the available scenario names and exit.
    #[arg(long)]
    list_scenarios: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment configuration documents.
    Run {
        /// Paths to JSON configuration documents.
        #[arg(required = true)]
        configs: Vec<PathBuf>,

        /// Output directory (layout: <outdir>/<scenario>/<config-hash>/).
        #[arg(long, default_value = "runs")]
        outdir: PathBuf,

        /// Run independent configs on separate threads.
        #[arg(long)]
        parallel: bool,

        /// Multiply every slack-style threshold by this factor.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_scenarios {
        for s in Scenario::ALL {
            println!("{}", s.name());
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run {
        configs,
        outdir,
        parallel,
        tolerance_scale,
    }) = cli.command
    else {
        eprintln!("nothing to do; see --help");
        return ExitCode::from(2);
    };

    let mut jobs = Vec::new();
    for path in &configs {
        let document = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) => {
                eprintln!("error: cannot read {}: {err}", path.display());
                return ExitCode::from(2);
            }
        };
        match validate_config(&document) {
            Ok(validated) => {
                for warning in &validated.warnings {
                    eprintln!("warning: {}: {warning}", path.display());
                }
                jobs.push((path.clone(), validated));
            }
            Err(violations) => {
                eprintln!("error: {} is not a valid configuration:", path.display());
                for v in violations {
                    eprintln!("  - {v}");
                }
                return ExitCode::from(2);
            }
        }
    }

    let run_one = |path: &PathBuf, validated: &fujita_lab::Validated| -> Result<RunRecord, String> {
        let started = SystemTime::now();
        let record = run_scenario(
            &validated.config,
            &validated.warnings,
            &outdir,
            tolerance_scale,
        )
        .map_err(|err| format!("{}: {err:#}", path.display()))?;
        // timestamps live in run.json only, so report.json stays byte-stable
        let finished = SystemTime::now();
        let dir = outdir.join(&record.scenario).join(&record.config_hash);
        let stamp = |t: SystemTime| {
            t.duration_since(SystemTime::UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0)
        };
        let run_meta = serde_json::json!({
            "config": path.display().to_string(),
            "scenario": record.scenario,
            "config_hash": record.config_hash,
            "started_unix": stamp(started),
            "finished_unix": stamp(finished),
            "all_passed": record.all_passed(),
            "artifacts": record.artifacts,
        });
        write_json(&dir.join("run.json"), &run_meta).map_err(|e| e.to_string())?;
        Ok(record)
    };

    let results: Vec<Result<RunRecord, String>> = if parallel && jobs.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|(path, validated)| scope.spawn(|| run_one(path, validated)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    } else {
        jobs.iter().map(|(path, v)| run_one(path, v)).collect()
    };

    let mut any_failed_check = false;
    for result in results {
        match result {
            Ok(record) => {
                println!(
                    "{} [{}]: {}",
                    record.scenario,
                    record.config_hash,
                    if record.all_passed() { "all checks passed" } else { "CHECK FAILURES" }
                );
                for check in &record.checks {
                    println!(
                        "  {} {}: measured {:.6e} vs threshold {:.6e} ({})",
                        if check.passed { "pass" } else { "FAIL" },
                        check.name,
                        check.measured,
                        check.threshold,
                        check.detail
                    );
                    if !check.passed {
                        any_failed_check = true;
                    }
                }
            }
            Err(message) => {
                eprintln!("error: {message}");
                return ExitCode::from(2);
            }
        }
    }
    if any_failed_check {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
