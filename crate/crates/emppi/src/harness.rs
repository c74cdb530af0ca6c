//! Closed-loop experiment runner: episodes against a hidden-parameter
//! plant, three-arm baseline comparisons, N/K ablation sweeps, and the
//! CSV/JSON log writers behind the CLI.
//!
//! The episode loop follows the planner's receding-horizon recipe: observe
//! the true state through Gaussian measurement noise, plan on the current
//! belief, then sharpen the belief against the new observation (predicting
//! it from the previous observation and applied control) and resample if
//! the ESS collapsed, and finally apply the first control to the plant.
//! Note the planning at cycle `t` therefore uses the belief updated only
//! through observation `t − 1`.
//!
//! All per-episode randomness is keyed on the episode seed, so episodes are
//! reproducible individually and independent of batch order or thread
//! count.

use std::path::Path;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::belief::{maybe_resample, update_belief, BeliefError, ParameterBelief};
use crate::config::{ConfigError, ExperimentConfig, PriorSpec};
use crate::controller::ControllerState;
use crate::rng::{stream, StreamKind};
use crate::task::{build_task, TaskError};
use crate::types::{ControlVector, ParameterVector, StateVector};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("belief initialization failed: {0}")]
    Belief(#[from] BeliefError),
    #[error("wrong-theta must have {expected} entries, got {got}")]
    WrongThetaShape { expected: usize, got: usize },
    #[error("writing {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One control cycle as logged: the observation the planner saw, the
/// control it applied, and the belief diagnostics after that cycle's
/// update.
#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub step: usize,
    pub t_sim: f64,
    /// Measured (noisy) state the controller planned from.
    pub state: StateVector,
    pub control: ControlVector,
    /// Belief weighted mean after this cycle's update.
    pub theta_hat: ParameterVector,
    pub ess: f64,
    /// Best suffix cost seen by the planner this cycle.
    pub beta0: f64,
    pub resampled: bool,
    /// Wall-clock planning + estimation time for this cycle. The only
    /// nondeterministic column in the log.
    pub cycle_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpisodeSummary {
    pub seed: u64,
    pub success: bool,
    /// Control cycles executed when the success hold completed.
    pub steps_to_success: Option<usize>,
    pub steps_recorded: usize,
    /// Error message if the controller or plant aborted the episode.
    pub aborted: Option<String>,
    /// Cycles where every particle's likelihood vanished (belief kept).
    pub belief_update_failures: usize,
    pub resample_count: usize,
    /// Running cost accumulated along the true state trajectory.
    pub total_running_cost: f64,
    pub param_sq_error_initial: f64,
    pub param_sq_error_final: f64,
    /// ‖θ̂ − θ_true‖² per step.
    pub param_sq_error: Vec<f64>,
    pub mean_cycle_ms: f64,
}

#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub records: Vec<EpisodeRecord>,
    pub summary: EpisodeSummary,
    pub state_dim: usize,
    pub control_dim: usize,
    pub param_dim: usize,
}

/// Run one full closed-loop episode with the plant's parameters hidden
/// from the controller. `seed` overrides the config seed and keys every
/// randomness stream of the episode. Controller and plant failures do not
/// abort the call; they truncate the episode and set `summary.aborted`.
pub fn run_episode(config: &ExperimentConfig, seed: u64) -> Result<EpisodeLog, HarnessError> {
    config.validate()?;
    let task = build_task(&config.task)?;
    let model = task.model.as_ref();
    let dt = config.task.dt;
    let mut theta_true = ParameterVector::from_vec(config.truth.theta.clone());
    model.clamp_params(&mut theta_true);

    let mut controller_cfg = config.controller.clone();
    controller_cfg.seed = seed;
    let mut belief_rng = stream(seed, StreamKind::BeliefInit, 0, 0, 0);
    let mut belief = ParameterBelief::init(
        &config.belief.priors,
        controller_cfg.n_particles,
        &controller_cfg.likelihood_variance,
        controller_cfg.ess_threshold(),
        controller_cfg.jitter_scale,
        model,
        &mut belief_rng,
    )?;
    let mut controller = ControllerState::new(controller_cfg, dt);

    let noise_std = config.task.observation_noise_var.sqrt();
    let hold_steps = task.success.hold_steps(dt);
    let mut x_true = task.initial_state.clone();
    let mut prev: Option<(StateVector, ControlVector)> = None;
    let mut records: Vec<EpisodeRecord> = Vec::new();
    let mut param_sq_error = Vec::new();
    let mut hold = 0usize;
    let mut success = false;
    let mut steps_to_success = None;
    let mut aborted = None;
    let mut belief_update_failures = 0usize;
    let mut resample_count = 0usize;
    let mut total_running_cost = 0.0;

    for step in 0..config.task.episode_steps {
        let cycle = step as u64;
        let mut obs_rng = stream(seed, StreamKind::Observation, cycle, 0, 0);
        let x_obs = StateVector::from_iterator(
            x_true.len(),
            x_true.iter().map(|&v| {
                let z: f64 = StandardNormal.sample(&mut obs_rng);
                v + noise_std * z
            }),
        );

        let started = Instant::now();
        let out = match controller.control_step(model, task.cost.as_ref(), &belief, &x_obs) {
            Ok(out) => out,
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        };

        // Bayes update against the new observation (predicted from the
        // previous observation and control), then ESS-gated resampling.
        // Runs after planning, so this cycle's action used the prior
        // belief, the same line order as the planner's recipe.
        let mut resampled = false;
        if let Some((prev_obs, prev_u)) = &prev {
            match update_belief(&belief, model, prev_obs, prev_u, &x_obs, dt) {
                Ok(b) => belief = b,
                Err(BeliefError::AllZeroLikelihood) => belief_update_failures += 1,
                Err(e) => {
                    aborted = Some(e.to_string());
                    break;
                }
            }
            let mut resample_rng = stream(seed, StreamKind::Resample, cycle, 0, 0);
            let (b, did) = maybe_resample(&belief, model, &mut resample_rng);
            belief = b;
            if did {
                resample_count += 1;
                resampled = true;
            }
        }
        let cycle_ms = started.elapsed().as_secs_f64() * 1e3;

        total_running_cost += task.cost.running_cost(&x_true);
        let theta_hat = belief.weighted_mean();
        let delta = &theta_hat - &theta_true;
        param_sq_error.push(delta.dot(&delta));
        records.push(EpisodeRecord {
            step,
            t_sim: step as f64 * dt,
            state: x_obs.clone(),
            control: out.action.clone(),
            theta_hat,
            ess: belief.ess(),
            beta0: out.beta0,
            resampled,
            cycle_ms,
        });

        match model.step(&x_true, &out.action, &theta_true, dt) {
            Ok(next) => x_true = next,
            Err(e) => {
                aborted = Some(format!("plant diverged: {e}"));
                break;
            }
        }
        prev = Some((x_obs, out.action));

        // Success is judged on the true plant state, held long enough.
        if task.success.satisfied(&x_true) {
            hold += 1;
            if hold >= hold_steps && !success {
                success = true;
                steps_to_success = Some(step + 1);
                if config.task.stop_on_success {
                    break;
                }
            }
        } else {
            hold = 0;
        }
    }

    let mean_cycle_ms = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.cycle_ms).sum::<f64>() / records.len() as f64
    };
    let summary = EpisodeSummary {
        seed,
        success,
        steps_to_success,
        steps_recorded: records.len(),
        aborted,
        belief_update_failures,
        resample_count,
        total_running_cost,
        param_sq_error_initial: param_sq_error.first().copied().unwrap_or(0.0),
        param_sq_error_final: param_sq_error.last().copied().unwrap_or(0.0),
        param_sq_error,
        mean_cycle_ms,
    };
    Ok(EpisodeLog {
        records,
        summary,
        state_dim: model.state_dim(),
        control_dim: model.control_dim(),
        param_dim: model.param_dim(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmStats {
    pub arm: String,
    pub n_trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean and sample variance of steps-to-success over successful
    /// trials; `None` when fewer than one/two trials succeeded.
    pub mean_steps_to_success: Option<f64>,
    pub var_steps_to_success: Option<f64>,
    pub mean_total_cost: f64,
    pub per_trial_success: Vec<bool>,
}

fn arm_stats(arm: &str, logs: &[EpisodeLog]) -> ArmStats {
    let per_trial_success: Vec<bool> = logs.iter().map(|l| l.summary.success).collect();
    let successes = per_trial_success.iter().filter(|&&s| s).count();
    let steps: Vec<f64> = logs
        .iter()
        .filter_map(|l| l.summary.steps_to_success)
        .map(|s| s as f64)
        .collect();
    let mean_steps = if steps.is_empty() {
        None
    } else {
        Some(steps.iter().sum::<f64>() / steps.len() as f64)
    };
    let var_steps = if steps.len() < 2 {
        None
    } else {
        let m = mean_steps.unwrap();
        Some(steps.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (steps.len() - 1) as f64)
    };
    ArmStats {
        arm: arm.to_string(),
        n_trials: logs.len(),
        successes,
        success_rate: successes as f64 / logs.len().max(1) as f64,
        mean_steps_to_success: mean_steps,
        var_steps_to_success: var_steps,
        mean_total_cost: logs.iter().map(|l| l.summary.total_running_cost).sum::<f64>()
            / logs.len().max(1) as f64,
        per_trial_success,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub base_seed: u64,
    pub wrong_theta: Vec<f64>,
    pub arms: Vec<ArmStats>,
}

impl ComparisonReport {
    pub fn arm(&self, name: &str) -> Option<&ArmStats> {
        self.arms.iter().find(|a| a.arm == name)
    }
}

/// Collapse a config to a single-particle (plain MPPI) controller that
/// believes exactly `theta`. The rollout budget is kept at the ensemble's
/// `N·K` so every arm of a comparison spends the same compute.
pub fn point_mass_config(config: &ExperimentConfig, theta: &[f64]) -> ExperimentConfig {
    let mut cfg = config.clone();
    cfg.controller.n_rollouts = config.controller.n_rollouts * config.controller.n_particles;
    cfg.controller.n_particles = 1;
    cfg.belief.priors = theta.iter().map(|&value| PriorSpec::Point { value }).collect();
    cfg
}

/// Three-arm comparison on shared seeds: the ensemble controller with its
/// configured prior, single-model MPPI that knows the true parameters, and
/// single-model MPPI pinned to `wrong_theta`. Trial `i` of every arm uses
/// seed `config.controller.seed + i`, so all arms face identical
/// observation noise.
pub fn run_comparison(
    config: &ExperimentConfig,
    n_trials: usize,
    wrong_theta: &[f64],
) -> Result<ComparisonReport, HarnessError> {
    config.validate()?;
    let expected = config.truth.theta.len();
    if wrong_theta.len() != expected {
        return Err(HarnessError::WrongThetaShape {
            expected,
            got: wrong_theta.len(),
        });
    }
    let base_seed = config.controller.seed;
    let arms = [
        ("emppi", config.clone()),
        ("mppi_perfect", point_mass_config(config, &config.truth.theta)),
        ("mppi_wrong", point_mass_config(config, wrong_theta)),
    ];
    let mut stats = Vec::new();
    for (name, arm_cfg) in &arms {
        let logs = (0..n_trials)
            .into_par_iter()
            .map(|i| run_episode(arm_cfg, base_seed + i as u64))
            .collect::<Result<Vec<_>, _>>()?;
        stats.push(arm_stats(name, &logs));
    }
    Ok(ComparisonReport {
        base_seed,
        wrong_theta: wrong_theta.to_vec(),
        arms: stats,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub n_particles: usize,
    pub n_rollouts: usize,
    pub n_trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_steps_to_success: Option<f64>,
    pub mean_total_cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationTable {
    pub base_seed: u64,
    pub rows: Vec<AblationRow>,
}

/// Success-rate grid over ensemble sizes `N` and per-particle rollout
/// counts `K`; every cell runs the same shared seed list.
pub fn run_ablation(
    config: &ExperimentConfig,
    n_values: &[usize],
    k_values: &[usize],
    n_trials: usize,
) -> Result<AblationTable, HarnessError> {
    config.validate()?;
    let base_seed = config.controller.seed;
    let mut rows = Vec::new();
    for &n in n_values {
        for &k in k_values {
            let mut cell_cfg = config.clone();
            cell_cfg.controller.n_particles = n;
            cell_cfg.controller.n_rollouts = k;
            let logs = (0..n_trials)
                .into_par_iter()
                .map(|i| run_episode(&cell_cfg, base_seed + i as u64))
                .collect::<Result<Vec<_>, _>>()?;
            let stats = arm_stats("cell", &logs);
            rows.push(AblationRow {
                n_particles: n,
                n_rollouts: k,
                n_trials,
                successes: stats.successes,
                success_rate: stats.success_rate,
                mean_steps_to_success: stats.mean_steps_to_success,
                mean_total_cost: stats.mean_total_cost,
            });
        }
    }
    Ok(AblationTable { base_seed, rows })
}

/// 17-significant-digit float formatting; round-trips every f64 exactly.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render an episode as CSV: a version comment, a header row, then one row
/// per control cycle. Column order is fixed.
pub fn episode_csv(log: &EpisodeLog) -> String {
    let mut out = String::from("# emppi episode log v1\n");
    let mut header: Vec<String> = vec!["step".into(), "t_sim".into()];
    header.extend((0..log.state_dim).map(|i| format!("x{i}")));
    header.extend((0..log.control_dim).map(|i| format!("u{i}")));
    header.extend((0..log.param_dim).map(|i| format!("theta_hat{i}")));
    header.extend(["ess", "beta0", "resampled", "cycle_ms"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for r in &log.records {
        let mut fields: Vec<String> = vec![r.step.to_string(), fmt(r.t_sim)];
        fields.extend(r.state.iter().map(|&v| fmt(v)));
        fields.extend(r.control.iter().map(|&v| fmt(v)));
        fields.extend(r.theta_hat.iter().map(|&v| fmt(v)));
        fields.push(fmt(r.ess));
        fields.push(fmt(r.beta0));
        fields.push(if r.resampled { "1".into() } else { "0".into() });
        fields.push(fmt(r.cycle_ms));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("# emppi comparison v1\n");
    out.push_str("arm,n_trials,successes,success_rate,mean_steps_to_success,var_steps_to_success,mean_total_cost\n");
    for a in &report.arms {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.arm,
            a.n_trials,
            a.successes,
            fmt(a.success_rate),
            a.mean_steps_to_success.map_or("nan".into(), fmt),
            a.var_steps_to_success.map_or("nan".into(), fmt),
            fmt(a.mean_total_cost),
        ));
    }
    out
}

pub fn ablation_csv(table: &AblationTable) -> String {
    let mut out = String::from("# emppi ablation v1\n");
    out.push_str("N,K,n_trials,successes,success_rate,mean_steps_to_success,mean_total_cost\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n_particles,
            r.n_rollouts,
            r.n_trials,
            r.successes,
            fmt(r.success_rate),
            r.mean_steps_to_success.map_or("nan".into(), fmt),
            fmt(r.mean_total_cost),
        ));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::IoFailure {
        path: path.display().to_string(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::IoFailure {
        path: dir.display().to_string(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Write `episode.csv`, `summary.json`, and `config_echo.toml` into `dir`
/// (created if missing; existing files overwritten).
pub fn write_episode_logs(
    log: &EpisodeLog,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_file(&dir.join("episode.csv"), &episode_csv(log))?;
    write_file(&dir.join("summary.json"), &to_json(&log.summary))?;
    write_file(&dir.join("config_echo.toml"), &config.to_toml_string())
}

pub fn write_comparison(
    report: &ComparisonReport,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_file(&dir.join("comparison.csv"), &comparison_csv(report))?;
    write_file(&dir.join("comparison.json"), &to_json(report))?;
    write_file(&dir.join("config_echo.toml"), &config.to_toml_string())
}

pub fn write_ablation(
    table: &AblationTable,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_file(&dir.join("ablation.csv"), &ablation_csv(table))?;
    write_file(&dir.join("ablation.json"), &to_json(table))?;
    write_file(&dir.join("config_echo.toml"), &config.to_toml_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::preset;

    /// Small config that finishes fast; not tuned to succeed.
    fn tiny_pendulum() -> ExperimentConfig {
        let mut cfg = preset("pendulum").unwrap();
        cfg.task.episode_steps = 5;
        cfg.controller.horizon = 8;
        cfg.controller.n_particles = 3;
        cfg.controller.n_rollouts = 2;
        cfg
    }

    #[test]
    fn empty_episode() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 0;
        let log = run_episode(&cfg, 1).unwrap();
        assert!(log.records.is_empty());
        assert!(!log.summary.success);
        let csv = episode_csv(&log);
        assert_eq!(csv.lines().count(), 2, "comment + header only");
    }

    #[test]
    fn csv_has_constant_column_count() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 3;
        let log = run_episode(&cfg, 1).unwrap();
        assert_eq!(log.records.len(), 3);
        let csv = episode_csv(&log);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        let n_cols = lines[1].split(',').count();
        // step,t_sim + 2 state + 1 control + 3 params + ess,beta0,resampled,cycle_ms
        assert_eq!(n_cols, 2 + 2 + 1 + 3 + 4);
        for line in &lines[2..] {
            assert_eq!(line.split(',').count(), n_cols);
        }
    }

    #[test]
    fn episode_is_deterministic_up_to_timing() {
        let cfg = tiny_pendulum();
        let a = run_episode(&cfg, 9).unwrap();
        let b = run_episode(&cfg, 9).unwrap();
        let strip = |csv: String| -> Vec<String> {
            csv.lines()
                .map(|l| l.rsplit_once(',').map_or(l.to_string(), |(head, _)| head.to_string()))
                .collect()
        };
        assert_eq!(strip(episode_csv(&a)), strip(episode_csv(&b)));
        assert_eq!(a.summary.param_sq_error, b.summary.param_sq_error);
    }

    #[test]
    fn csv_round_trips_at_full_precision() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 4;
        let log = run_episode(&cfg, 3).unwrap();
        let csv = episode_csv(&log);
        for (row, record) in csv.lines().skip(2).zip(&log.records) {
            let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields[0], record.step as f64);
            assert_eq!(fields[1], record.t_sim);
            assert_eq!(fields[2], record.state[0]);
            assert_eq!(fields[3], record.state[1]);
            assert_eq!(fields[4], record.control[0]);
            for d in 0..3 {
                assert_eq!(fields[5 + d], record.theta_hat[d]);
            }
            assert_eq!(fields[8], record.ess);
            assert_eq!(fields[9], record.beta0);
        }
    }

    #[test]
    fn seed_isolation_under_parallel_batches() {
        let cfg = tiny_pendulum();
        let alone = run_episode(&cfg, 4).unwrap();
        let batch: Vec<EpisodeLog> = (0..8u64)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|s| run_episode(&cfg, s).unwrap())
            .collect();
        assert_eq!(
            batch[4].summary.param_sq_error,
            alone.summary.param_sq_error
        );
        for (a, b) in batch[4].records.iter().zip(&alone.records) {
            assert_eq!(a.state, b.state);
            assert_eq!(a.control, b.control);
        }
    }

    #[test]
    fn comparison_reruns_identically_and_degenerate_offset_matches_perfect() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 4;
        // wrong θ = truth → arms (b) and (c) coincide.
        let truth = cfg.truth.theta.clone();
        let r1 = run_comparison(&cfg, 3, &truth).unwrap();
        let r2 = run_comparison(&cfg, 3, &truth).unwrap();
        let perfect1 = r1.arm("mppi_perfect").unwrap();
        let perfect2 = r2.arm("mppi_perfect").unwrap();
        assert_eq!(perfect1.per_trial_success, perfect2.per_trial_success);
        assert_eq!(perfect1.mean_total_cost, perfect2.mean_total_cost);
        let wrong = r1.arm("mppi_wrong").unwrap();
        assert_eq!(perfect1.per_trial_success, wrong.per_trial_success);
        assert_eq!(perfect1.mean_total_cost, wrong.mean_total_cost);
        assert_eq!(perfect1.successes, wrong.successes);
    }

    #[test]
    fn comparison_rejects_bad_wrong_theta_shape() {
        let cfg = tiny_pendulum();
        let err = run_comparison(&cfg, 1, &[1.0]).unwrap_err();
        assert!(matches!(err, HarnessError::WrongThetaShape { expected: 3, got: 1 }));
    }

    #[test]
    fn single_cell_ablation_equals_episode_batch() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 4;
        cfg.controller.n_particles = 1;
        cfg.controller.n_rollouts = 1;
        let table = run_ablation(&cfg, &[1], &[1], 3).unwrap();
        assert_eq!(table.rows.len(), 1);
        let mean_cost: f64 = (0..3u64)
            .map(|i| run_episode(&cfg, cfg.controller.seed + i).unwrap().summary.total_running_cost)
            .sum::<f64>()
            / 3.0;
        assert_eq!(table.rows[0].mean_total_cost, mean_cost);
    }

    #[test]
    fn duplicate_ablation_cells_match() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 3;
        let table = run_ablation(&cfg, &[2, 2], &[2], 2).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].mean_total_cost, table.rows[1].mean_total_cost);
        assert_eq!(table.rows[0].successes, table.rows[1].successes);
    }

    #[test]
    fn write_logs_emits_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 2;
        let log = run_episode(&cfg, 0).unwrap();
        write_episode_logs(&log, &cfg, dir.path()).unwrap();
        for name in ["episode.csv", "summary.json", "config_echo.toml"] {
            assert!(dir.path().join(name).is_file(), "{name} missing");
        }
        let echoed = ExperimentConfig::load(&dir.path().join("config_echo.toml")).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn io_failure_carries_path() {
        let mut cfg = tiny_pendulum();
        cfg.task.episode_steps = 1;
        let log = run_episode(&cfg, 0).unwrap();
        let err = write_episode_logs(&log, &cfg, Path::new("/proc/definitely/not/writable"))
            .unwrap_err();
        match err {
            HarnessError::IoFailure { path, .. } => assert!(path.contains("/proc/definitely")),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
