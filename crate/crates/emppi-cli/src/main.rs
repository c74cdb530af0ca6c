//! `emppi`: run ensemble-MPPI experiments from config files.
//!
//! Subcommands: `run` (one logged episode), `compare` (EMPPI vs perfect-
//! and wrong-model MPPI on shared seeds), `ablate` (success-rate grid over
//! N and K). All outputs are deterministic for a given config and seed,
//! apart from the wall-clock timing columns.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use emppi::config::ExperimentConfig;
use emppi::harness::{
    run_ablation, run_comparison, run_episode, write_ablation, write_comparison,
    write_episode_logs,
};

#[derive(Parser)]
#[command(name = "emppi", version, about = "Ensemble-MPPI benchmark harness")]
struct Cli {
    /// Worker threads for rollout parallelism (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop episode and write episode.csv / summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Episode seed; defaults to the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare EMPPI against perfect- and wrong-model MPPI on shared seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: usize,
        /// Parameters the wrong-model arm believes, comma-separated.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        wrong_theta: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Success-rate grid over ensemble sizes, e.g. --sweep N=1,5,20,K=1,4.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parse `N=1,5,10,K=1,4` into the two value lists. Values after an `N=` or
/// `K=` marker accumulate into that list until the other marker appears.
fn parse_sweep(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    enum Target {
        N,
        K,
    }
    let mut n_values = Vec::new();
    let mut k_values = Vec::new();
    let mut target = None;
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let digits = if let Some(rest) = token.strip_prefix("N=") {
            target = Some(Target::N);
            rest
        } else if let Some(rest) = token.strip_prefix("K=") {
            target = Some(Target::K);
            rest
        } else {
            token
        };
        let value: usize = digits
            .parse()
            .with_context(|| format!("bad sweep token {token:?}"))?;
        if value == 0 {
            bail!("sweep values must be >= 1, got {token:?}");
        }
        match target {
            Some(Target::N) => n_values.push(value),
            Some(Target::K) => k_values.push(value),
            None => bail!("sweep must start with N= or K="),
        }
    }
    if n_values.is_empty() || k_values.is_empty() {
        bail!("sweep needs both an N= list and a K= list, e.g. N=1,5,K=1,4");
    }
    Ok((n_values, k_values))
}

fn execute(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run { config, seed, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let seed = seed.unwrap_or(cfg.controller.seed);
            let log = run_episode(&cfg, seed)?;
            write_episode_logs(&log, &cfg, &out)?;
            let s = &log.summary;
            println!(
                "task={} seed={} steps={} success={} steps_to_success={} resamples={} param_sq_error={:.3e}->{:.3e}{}",
                cfg.task.name,
                seed,
                s.steps_recorded,
                s.success,
                s.steps_to_success.map_or("-".into(), |v| v.to_string()),
                s.resample_count,
                s.param_sq_error_initial,
                s.param_sq_error_final,
                s.aborted.as_deref().map_or(String::new(), |a| format!(" ABORTED: {a}")),
            );
        }
        Command::Compare {
            config,
            trials,
            wrong_theta,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_comparison(&cfg, trials, &wrong_theta)?;
            write_comparison(&report, &cfg, &out)?;
            for arm in &report.arms {
                println!(
                    "{:<14} success {:>2}/{:<2} ({:.0}%)  mean_steps={}  mean_cost={:.4e}",
                    arm.arm,
                    arm.successes,
                    arm.n_trials,
                    100.0 * arm.success_rate,
                    arm.mean_steps_to_success
                        .map_or("-".into(), |v| format!("{v:.1}")),
                    arm.mean_total_cost,
                );
            }
        }
        Command::Ablate {
            config,
            sweep,
            trials,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (n_values, k_values) = parse_sweep(&sweep)?;
            let table = run_ablation(&cfg, &n_values, &k_values, trials)?;
            write_ablation(&table, &cfg, &out)?;
            println!("{:>4} {:>4} {:>10} {:>12} {:>14}", "N", "K", "successes", "rate", "mean_cost");
            for row in &table.rows {
                println!(
                    "{:>4} {:>4} {:>7}/{:<2} {:>12.2} {:>14.4e}",
                    row.n_particles,
                    row.n_rollouts,
                    row.successes,
                    row.n_trials,
                    row.success_rate,
                    row.mean_total_cost,
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_sweep;

    #[test]
    fn sweep_grammar() {
        let (n, k) = parse_sweep("N=1,5,10,20,K=1,4").unwrap();
        assert_eq!(n, vec![1, 5, 10, 20]);
        assert_eq!(k, vec![1, 4]);
        let (n, k) = parse_sweep("K=2,N=3").unwrap();
        assert_eq!((n, k), (vec![3], vec![2]));
        assert!(parse_sweep("1,2,3").is_err());
        assert!(parse_sweep("N=1").is_err());
        assert!(parse_sweep("N=0,K=1").is_err());
        assert!(parse_sweep("N=x,K=1").is_err());
    }
}
