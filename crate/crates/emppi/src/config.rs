//! Experiment configuration: schema, parsing, and validation.
//!
//! Config files are TOML with four tables. `[task]` names the plant and the
//! episode length, `[controller]` holds the planner hyperparameters (keys
//! `T`, `N`, `K`, `sigma`, `lambda`, ... matching the symbols used
//! throughout), `[belief]` gives one prior per physical parameter in a
//! small `uniform(a,b) | normal(mu,var) | binomial(n,p) | point(c)`
//! grammar, and `[truth]` holds the plant parameters hidden from the
//! controller.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::model_dims;
use crate::types::ControlBounds;

/// Prior distribution for one parameter dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PriorSpec {
    Uniform { low: f64, high: f64 },
    /// `normal(mu, var)`; the second argument is a variance.
    Normal { mean: f64, variance: f64 },
    Binomial { trials: u64, p: f64 },
    /// Degenerate prior for a parameter the controller knows exactly.
    Point { value: f64 },
}

impl PriorSpec {
    /// Mean of the distribution (used for reporting, not sampling).
    pub fn mean(&self) -> f64 {
        match *self {
            PriorSpec::Uniform { low, high } => 0.5 * (low + high),
            PriorSpec::Normal { mean, .. } => mean,
            PriorSpec::Binomial { trials, p } => trials as f64 * p,
            PriorSpec::Point { value } => value,
        }
    }

    fn check(&self) -> Result<(), String> {
        match *self {
            PriorSpec::Uniform { low, high } => {
                if !(low < high) {
                    return Err(format!("uniform requires a < b, got ({low},{high})"));
                }
            }
            PriorSpec::Normal { variance, .. } => {
                if !(variance > 0.0) {
                    return Err(format!("normal requires var > 0, got {variance}"));
                }
            }
            PriorSpec::Binomial { p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("binomial requires p in [0,1], got {p}"));
                }
            }
            PriorSpec::Point { value } => {
                if !value.is_finite() {
                    return Err(format!("point requires a finite value, got {value}"));
                }
            }
        }
        Ok(())
    }
}

fn parse_call(s: &str) -> Option<(&str, Vec<f64>)> {
    let s = s.trim();
    let open = s.find('(')?;
    let close = s.rfind(')')?;
    if close != s.len() - 1 {
        return None;
    }
    let args: Result<Vec<f64>, _> = s[open + 1..close]
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect();
    Some((s[..open].trim(), args.ok()?))
}

impl FromStr for PriorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) =
            parse_call(s).ok_or_else(|| format!("cannot parse prior {s:?}"))?;
        let spec = match (name, args.as_slice()) {
            ("uniform", &[low, high]) => PriorSpec::Uniform { low, high },
            ("normal", &[mean, variance]) => PriorSpec::Normal { mean, variance },
            ("binomial", &[trials, p]) => {
                if trials < 0.0 || trials.fract() != 0.0 {
                    return Err(format!("binomial trial count must be a nonnegative integer, got {trials}"));
                }
                PriorSpec::Binomial {
                    trials: trials as u64,
                    p,
                }
            }
            ("point", &[value]) => PriorSpec::Point { value },
            _ => return Err(format!("unknown prior {s:?}")),
        };
        Ok(spec)
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PriorSpec::Uniform { low, high } => write!(f, "uniform({low},{high})"),
            PriorSpec::Normal { mean, variance } => write!(f, "normal({mean},{variance})"),
            PriorSpec::Binomial { trials, p } => write!(f, "binomial({trials},{p})"),
            PriorSpec::Point { value } => write!(f, "point({value})"),
        }
    }
}

impl TryFrom<String> for PriorSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<PriorSpec> for String {
    fn from(p: PriorSpec) -> String {
        p.to_string()
    }
}

/// Optional filter applied to the nominal sequence after the weighted update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Smoothing {
    #[default]
    Off,
    MovingAverage {
        window: usize,
    },
}

impl FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "off" {
            return Ok(Smoothing::Off);
        }
        match parse_call(s) {
            Some(("moving_average", args)) if args.len() == 1 => {
                let w = args[0];
                if w < 1.0 || w.fract() != 0.0 {
                    return Err(format!("moving_average window must be a positive integer, got {w}"));
                }
                Ok(Smoothing::MovingAverage { window: w as usize })
            }
            _ => Err(format!("cannot parse smoothing {s:?}")),
        }
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Smoothing::Off => write!(f, "off"),
            Smoothing::MovingAverage { window } => write!(f, "moving_average({window})"),
        }
    }
}

impl TryFrom<String> for Smoothing {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Smoothing> for String {
    fn from(s: Smoothing) -> String {
        s.to_string()
    }
}

/// Whether softmax weights are recomputed per horizon step from the suffix
/// cost (the default) or taken from `t = 0` for every slot (the classical
/// single-weighting variant, kept for ablations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsMode {
    #[default]
    PerStep,
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    /// `pendulum` | `cartpole` | `pusher`.
    pub name: String,
    /// Integration step for both the plant and the planner models, seconds.
    pub dt: f64,
    /// Hard episode length in control cycles.
    pub episode_steps: usize,
    /// Variance of the zero-mean Gaussian added to each measured state entry.
    #[serde(default = "default_observation_noise_var")]
    pub observation_noise_var: f64,
    /// Stop the episode once the success predicate has held long enough.
    /// Disable to study estimator convergence past task completion.
    #[serde(default = "default_true")]
    pub stop_on_success: bool,
}

fn default_observation_noise_var() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

fn default_ess_fraction() -> f64 {
    0.5
}

fn default_jitter_scale() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    /// Planning horizon, steps.
    #[serde(rename = "T")]
    pub horizon: usize,
    /// Number of parameter particles.
    #[serde(rename = "N")]
    pub n_particles: usize,
    /// Trajectory samples per particle.
    #[serde(rename = "K")]
    pub n_rollouts: usize,
    /// Diagonal control-noise variance, one entry per control dimension.
    pub sigma: Vec<f64>,
    /// Softmax temperature.
    pub lambda: f64,
    /// Diagonal likelihood variance, one entry per state dimension.
    pub likelihood_variance: Vec<f64>,
    #[serde(default = "default_ess_fraction")]
    pub ess_fraction: f64,
    #[serde(default)]
    pub smoothing: Smoothing,
    pub seed: u64,
    /// Per-dimension control bounds.
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    #[serde(default)]
    pub weights_mode: WeightsMode,
    /// The resampling threshold is `ess_fraction * N * K`; since the belief
    /// only holds `N` particles this flag caps it at `ess_fraction * N`.
    #[serde(default = "default_true", rename = "ess_cap_at_N")]
    pub ess_cap_at_n: bool,
    /// Resampling spread as a fraction of the current weighted std.
    #[serde(default = "default_jitter_scale")]
    pub jitter_scale: f64,
}

impl ControllerConfig {
    pub fn bounds(&self) -> ControlBounds {
        ControlBounds::new(
            nalgebra::DVector::from_vec(self.u_min.clone()),
            nalgebra::DVector::from_vec(self.u_max.clone()),
        )
    }

    /// Effective-sample-size threshold below which the belief resamples.
    pub fn ess_threshold(&self) -> f64 {
        let full = self.ess_fraction * (self.n_particles * self.n_rollouts) as f64;
        if self.ess_cap_at_n {
            full.min(self.ess_fraction * self.n_particles as f64)
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefConfig {
    /// One prior per physical parameter dimension, in model order.
    pub priors: Vec<PriorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    /// Ground-truth plant parameters, hidden from the controller.
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskConfig,
    pub controller: ControllerConfig,
    pub belief: BeliefConfig,
    pub truth: TruthConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigViolation {
    NonPositive { field: String },
    DimensionMismatch { field: String, expected: usize, got: usize },
    InvalidPrior { field: String, reason: String },
    Invalid { field: String, reason: String },
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigViolation::NonPositive { field } => write!(f, "{field}: must be positive"),
            ConfigViolation::DimensionMismatch { field, expected, got } => {
                write!(f, "{field}: expected length {expected}, got {got}")
            }
            ConfigViolation::InvalidPrior { field, reason } => write!(f, "{field}: {reason}"),
            ConfigViolation::Invalid { field, reason } => write!(f, "{field}: {reason}"),
        }
    }
}

/// Every violated field of a rejected config.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub violations: Vec<ConfigViolation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid config ({} violations):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    pub fn has_field(&self, field: &str) -> bool {
        self.violations.iter().any(|v| match v {
            ConfigViolation::NonPositive { field: f }
            | ConfigViolation::DimensionMismatch { field: f, .. }
            | ConfigViolation::InvalidPrior { field: f, .. }
            | ConfigViolation::Invalid { field: f, .. } => f == field,
        })
    }
}

fn check_positive(out: &mut Vec<ConfigViolation>, field: &str, v: f64) {
    if !(v > 0.0) || !v.is_finite() {
        out.push(ConfigViolation::NonPositive {
            field: field.to_string(),
        });
    }
}

fn check_positive_entries(out: &mut Vec<ConfigViolation>, field: &str, vs: &[f64]) {
    if vs.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        out.push(ConfigViolation::NonPositive {
            field: field.to_string(),
        });
    }
}

fn check_len(out: &mut Vec<ConfigViolation>, field: &str, expected: usize, got: usize) {
    if expected != got {
        out.push(ConfigViolation::DimensionMismatch {
            field: field.to_string(),
            expected,
            got,
        });
    }
}

impl ExperimentConfig {
    /// Check every invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut out = Vec::new();
        let c = &self.controller;

        let dims = model_dims(&self.task.name);
        if dims.is_none() {
            out.push(ConfigViolation::Invalid {
                field: "task.name".into(),
                reason: format!("unknown model {:?}", self.task.name),
            });
        }

        check_positive(&mut out, "task.dt", self.task.dt);
        if self.task.observation_noise_var < 0.0 || !self.task.observation_noise_var.is_finite() {
            out.push(ConfigViolation::Invalid {
                field: "task.observation_noise_var".into(),
                reason: "must be finite and nonnegative".into(),
            });
        }

        if c.horizon == 0 {
            out.push(ConfigViolation::NonPositive { field: "controller.T".into() });
        }
        if c.n_particles == 0 {
            out.push(ConfigViolation::NonPositive { field: "controller.N".into() });
        }
        if c.n_rollouts == 0 {
            out.push(ConfigViolation::NonPositive { field: "controller.K".into() });
        }
        check_positive(&mut out, "controller.lambda", c.lambda);
        check_positive_entries(&mut out, "controller.sigma", &c.sigma);
        check_positive_entries(
            &mut out,
            "controller.likelihood_variance",
            &c.likelihood_variance,
        );
        if !(c.ess_fraction > 0.0 && c.ess_fraction <= 1.0) {
            out.push(ConfigViolation::Invalid {
                field: "controller.ess_fraction".into(),
                reason: format!("must lie in (0, 1], got {}", c.ess_fraction),
            });
        }
        if !(c.jitter_scale >= 0.0 && c.jitter_scale.is_finite()) {
            out.push(ConfigViolation::Invalid {
                field: "controller.jitter_scale".into(),
                reason: "must be finite and nonnegative".into(),
            });
        }
        if let Smoothing::MovingAverage { window } = c.smoothing {
            if window == 0 || window % 2 == 0 {
                out.push(ConfigViolation::Invalid {
                    field: "controller.smoothing".into(),
                    reason: format!("moving_average window must be odd and >= 1, got {window}"),
                });
            }
        }
        for (i, (&lo, &hi)) in c.u_min.iter().zip(&c.u_max).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                out.push(ConfigViolation::Invalid {
                    field: "controller.u_min/u_max".into(),
                    reason: format!("dimension {i}: need finite u_min < u_max, got [{lo}, {hi}]"),
                });
                break;
            }
        }
        for (i, p) in self.belief.priors.iter().enumerate() {
            if let Err(reason) = p.check() {
                out.push(ConfigViolation::InvalidPrior {
                    field: format!("belief.priors[{i}]"),
                    reason,
                });
            }
        }
        if self.truth.theta.iter().any(|v| !v.is_finite()) {
            out.push(ConfigViolation::Invalid {
                field: "truth.theta".into(),
                reason: "entries must be finite".into(),
            });
        }

        if let Some((n, m, p)) = dims {
            check_len(&mut out, "controller.sigma", m, c.sigma.len());
            check_len(&mut out, "controller.u_min", m, c.u_min.len());
            check_len(&mut out, "controller.u_max", m, c.u_max.len());
            check_len(
                &mut out,
                "controller.likelihood_variance",
                n,
                c.likelihood_variance.len(),
            );
            check_len(&mut out, "belief.priors", p, self.belief.priors.len());
            check_len(&mut out, "truth.theta", p, self.truth.theta.len());
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations: out })
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigFileError> {
        let cfg: ExperimentConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}

/// Validate a config, returning it unchanged when every invariant holds.
pub fn validate_config(config: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pendulum_config() -> ExperimentConfig {
        ExperimentConfig {
            task: TaskConfig {
                name: "pendulum".into(),
                dt: 0.01,
                episode_steps: 500,
                observation_noise_var: 1e-3,
                stop_on_success: true,
            },
            controller: ControllerConfig {
                horizon: 40,
                n_particles: 20,
                n_rollouts: 4,
                sigma: vec![0.5],
                lambda: 0.1,
                likelihood_variance: vec![0.01, 0.01],
                ess_fraction: 0.5,
                smoothing: Smoothing::Off,
                seed: 0,
                u_min: vec![-5.0],
                u_max: vec![5.0],
                weights_mode: WeightsMode::PerStep,
                ess_cap_at_n: true,
                jitter_scale: 0.1,
            },
            belief: BeliefConfig {
                priors: vec![
                    "uniform(0.5,2)".parse().unwrap(),
                    "point(1)".parse().unwrap(),
                    "point(0.1)".parse().unwrap(),
                ],
            },
            truth: TruthConfig {
                theta: vec![1.0, 1.0, 0.1],
            },
        }
    }

    #[test]
    fn table_style_hyperparameters_validate() {
        // sigma 0.5 I, lambda 0.1, T 40, N 20, K 4.
        let cfg = pendulum_config();
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn zero_lambda_rejected() {
        let mut cfg = pendulum_config();
        cfg.controller.lambda = 0.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.has_field("controller.lambda"));
    }

    #[test]
    fn short_sigma_rejected() {
        let mut cfg = pendulum_config();
        cfg.controller.sigma = vec![];
        let err = cfg.validate().unwrap_err();
        assert!(err.has_field("controller.sigma"));
    }

    #[test]
    fn all_violations_reported_together() {
        let mut cfg = pendulum_config();
        cfg.controller.lambda = -1.0;
        cfg.controller.sigma = vec![0.5, 0.5];
        cfg.task.dt = 0.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.has_field("controller.lambda"));
        assert!(err.has_field("controller.sigma"));
        assert!(err.has_field("task.dt"));
    }

    #[test]
    fn validate_is_idempotent() {
        let cfg = validate_config(pendulum_config()).unwrap();
        let again = validate_config(cfg.clone()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn toml_round_trip_is_identity() {
        let cfg = pendulum_config();
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn prior_grammar_round_trip() {
        for s in [
            "uniform(1,6)",
            "normal(0.25,0.1)",
            "binomial(1,0.5)",
            "point(9.81)",
            "normal(7.5e-3,0.01)",
        ] {
            let p: PriorSpec = s.parse().unwrap();
            let back: PriorSpec = p.to_string().parse().unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn bad_priors_rejected() {
        assert!("uniform(6,1)".parse::<PriorSpec>().unwrap().check().is_err());
        assert!("normal(0,0)".parse::<PriorSpec>().unwrap().check().is_err());
        assert!("binomial(2,1.5)".parse::<PriorSpec>().unwrap().check().is_err());
        assert!("gamma(1,1)".parse::<PriorSpec>().is_err());
        assert!("uniform(1)".parse::<PriorSpec>().is_err());
    }

    #[test]
    fn smoothing_grammar() {
        assert_eq!("off".parse::<Smoothing>().unwrap(), Smoothing::Off);
        assert_eq!(
            "moving_average(5)".parse::<Smoothing>().unwrap(),
            Smoothing::MovingAverage { window: 5 }
        );
        assert!("moving_average(0)".parse::<Smoothing>().is_err());
        assert!("boxcar(3)".parse::<Smoothing>().is_err());
    }

    #[test]
    fn even_smoothing_window_rejected() {
        let mut cfg = pendulum_config();
        cfg.controller.smoothing = Smoothing::MovingAverage { window: 4 };
        assert!(cfg.validate().unwrap_err().has_field("controller.smoothing"));
    }

    #[test]
    fn ess_threshold_cap() {
        let mut cfg = pendulum_config();
        cfg.controller.n_particles = 20;
        cfg.controller.n_rollouts = 4;
        assert_eq!(cfg.controller.ess_threshold(), 10.0);
        cfg.controller.ess_cap_at_n = false;
        assert_eq!(cfg.controller.ess_threshold(), 40.0);
    }
}
