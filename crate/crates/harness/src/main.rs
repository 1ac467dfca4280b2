use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use asymreg_harness::config::load_config;
use asymreg_harness::experiment::{build_and_validate, run_experiment, run_suite, RunOptions};
use asymreg_harness::report::{emit_report, write_orbit_dump, ExperimentReport, Format};

#[derive(Parser)]
#[command(
    name = "asymreg",
    about = "Run nonexpansive fixed-point iteration experiments and validate rate certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the orbit horizon (must cover every bound + 100).
    #[arg(long)]
    horizon: Option<usize>,
    /// Report format for --out.
    #[arg(long, default_value = "both")]
    format: Format,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config and verify its certificates.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run every *.json config in a directory.
    Suite {
        dir: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Check hypotheses and print the certificate table without running.
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dump an orbit as CSV (n, d_x_tx, d_x_ty, d_x_p) with a JSON sidecar.
    Orbit {
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        dump: PathBuf,
        /// Number of steps (default 1000).
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn print_report(report: &ExperimentReport) {
    println!(
        "experiment `{}`: horizon {}, b = {} ({}), wall-clock {} ms",
        report.experiment_id, report.horizon, report.b, report.b_source, report.wallclock_ms
    );
    println!(
        "  orbit: min diag {:.3e}, final diag {:.3e}, chain violations {} (window {})",
        report.orbit.min_diag,
        report.orbit.final_diag,
        report.orbit.chain_violations,
        report.orbit.chain_window
    );
    println!(
        "  {:<24} {:>8} {:>14} {:>13} {:>12} {:>8} {:>6}",
        "formula", "eps", "bound", "guarantee", "first_hit", "tail", "pass"
    );
    for c in &report.certificates {
        println!(
            "  {:<24} {:>8} {:>14} {:>13} {:>12} {:>8} {:>6}",
            c.formula,
            c.epsilon,
            c.bound,
            c.guarantee,
            c.first_hit.map_or("-".into(), |h| h.to_string()),
            c.tail_ok.map_or("-".into(), |t| t.to_string()),
            if c.pass { "ok" } else { "FAIL" },
        );
    }
    println!("  overall: {}", if report.pass { "PASS" } else { "FAIL" });
}

fn cmd_run(config: &PathBuf, opts: &CommonOpts) -> Result<bool> {
    let cfg = load_config(config)?;
    let run_opts = RunOptions { seed: opts.seed, horizon: opts.horizon };
    let report = run_experiment(&cfg, &run_opts)?;
    print_report(&report);
    if let Some(dir) = &opts.out {
        for path in emit_report(&report, opts.format, dir)? {
            println!("  wrote {}", path.display());
        }
    }
    Ok(report.pass)
}

fn cmd_suite(dir: &PathBuf, opts: &CommonOpts) -> Result<bool> {
    let run_opts = RunOptions { seed: opts.seed, horizon: opts.horizon };
    let summary = run_suite(dir, &run_opts)?;
    println!("{:<32} {:>10} {:>12}  outcome", "experiment", "certs", "wallclock");
    for entry in &summary.entries {
        match &entry.outcome {
            Ok(report) => {
                println!(
                    "{:<32} {:>10} {:>10}ms  {}",
                    entry.id,
                    report.certificates.len(),
                    report.wallclock_ms,
                    if report.pass { "pass" } else { "FAIL" }
                );
                if let Some(out) = &opts.out {
                    emit_report(report, opts.format, out)?;
                }
            }
            Err(e) => println!("{:<32} {:>10} {:>12}  ERROR: {e:#}", entry.id, "-", "-"),
        }
    }
    let ok = summary.all_pass();
    println!("suite: {}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn cmd_validate(config: &PathBuf, seed: Option<u64>) -> Result<()> {
    let cfg = load_config(config)?;
    let opts = RunOptions { seed, horizon: None };
    let built = build_and_validate(&cfg, &opts)?;
    let rows = asymreg_harness::experiment::evaluate_certificates(&built)?;
    println!(
        "config `{}` valid: b = {} ({}), d_C = {:?}",
        cfg.id, built.b, built.b_source, built.d_c
    );
    println!("  {:<24} {:>8} {:>14} {:>13}", "formula", "eps", "bound", "guarantee");
    for r in rows {
        println!(
            "  {:<24} {:>8} {:>14} {:>13}",
            r.formula.name(),
            r.eps,
            r.bound,
            match r.guarantee {
                asymreg::rates::Guarantee::ForAllFrom => "for_all_from",
                asymreg::rates::Guarantee::ExistsUpTo => "exists_up_to",
            }
        );
    }
    Ok(())
}

fn cmd_orbit(config: &PathBuf, dump: &PathBuf, steps: usize, seed: Option<u64>) -> Result<()> {
    let cfg = load_config(config)?;
    let opts = RunOptions { seed, horizon: None };
    let built = build_and_validate(&cfg, &opts)?;
    let meta = serde_json::json!({
        "experiment_id": cfg.id,
        "space": cfg.space,
        "map": cfg.map,
        "schedule": cfg.schedule,
        "seed": built.seed,
        "steps": steps,
    });
    write_orbit_dump(
        &built.space,
        &built.map,
        &built.sched,
        &built.x0,
        steps,
        built.map.known_fixed_point.as_ref(),
        meta,
        dump,
    )?;
    println!("wrote {} ({} steps)", dump.display(), steps);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool> = match &cli.command {
        Command::Run { config, opts } => cmd_run(config, opts),
        Command::Suite { dir, opts } => cmd_suite(dir, opts),
        Command::Validate { config, seed } => cmd_validate(config, *seed).map(|_| true),
        Command::Orbit { config, dump, steps, seed } => {
            cmd_orbit(config, dump, *steps, *seed).map(|_| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
