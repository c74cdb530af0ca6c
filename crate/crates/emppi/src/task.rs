//! Task presets: plant, cost shaping, initial state, and success predicate
//! for each benchmark, plus a tuned default config per task.
//!
//! The presets are the single source of truth for what "the pendulum task"
//! means; the TOML files shipped under `configs/` are generated from
//! [`preset`] and a test keeps them in sync.

use thiserror::Error;

use crate::config::{
    BeliefConfig, ControllerConfig, ExperimentConfig, Smoothing, TaskConfig, TruthConfig,
    WeightsMode,
};
use crate::dynamics::{model_by_name, DynamicsModel};
use crate::types::{CostSpec, StateVector};

/// Wrap an angle to (−π, π].
pub fn wrap_to_pi(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(std::f64::consts::TAU);
    if wrapped > std::f64::consts::PI {
        wrapped - std::f64::consts::TAU
    } else {
        wrapped
    }
}

/// Goal test plus the time it must hold before the episode counts as a
/// success.
pub struct SuccessSpec {
    hold_seconds: f64,
    predicate: Box<dyn Fn(&StateVector) -> bool + Send + Sync>,
}

impl SuccessSpec {
    pub fn new(
        hold_seconds: f64,
        predicate: impl Fn(&StateVector) -> bool + Send + Sync + 'static,
    ) -> Self {
        SuccessSpec {
            hold_seconds,
            predicate: Box::new(predicate),
        }
    }

    pub fn satisfied(&self, x: &StateVector) -> bool {
        (self.predicate)(x)
    }

    pub fn hold_seconds(&self) -> f64 {
        self.hold_seconds
    }

    /// Number of consecutive in-goal control cycles required.
    pub fn hold_steps(&self, dt: f64) -> usize {
        ((self.hold_seconds / dt).ceil() as usize).max(1)
    }
}

/// Everything the harness needs to run one benchmark.
pub struct Task {
    pub name: String,
    pub model: Box<dyn DynamicsModel>,
    pub cost: Box<dyn CostSpec>,
    pub initial_state: StateVector,
    pub success: SuccessSpec,
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("unknown task {0:?}")]
    Unknown(String),
}

/// Swing-up shaping for the pendulum: `1 + cos(angle)` is zero exactly at
/// the upright target and maximal hanging down, so it needs no angle
/// wrapping.
#[derive(Debug, Clone, Copy)]
pub struct PendulumCost {
    pub upright_weight: f64,
    pub rate_weight: f64,
    pub terminal_scale: f64,
}

impl CostSpec for PendulumCost {
    fn running_cost(&self, x: &StateVector) -> f64 {
        self.upright_weight * (1.0 + x[0].cos()) + self.rate_weight * x[1] * x[1]
    }

    fn terminal_cost(&self, x: &StateVector) -> f64 {
        self.terminal_scale * self.running_cost(x)
    }
}

/// Cart-pole swing-up shaping: upright pole, centered slow cart.
#[derive(Debug, Clone, Copy)]
pub struct CartPoleCost {
    pub upright_weight: f64,
    pub cart_pos_weight: f64,
    pub pole_rate_weight: f64,
    pub cart_vel_weight: f64,
    pub terminal_scale: f64,
}

impl CostSpec for CartPoleCost {
    fn running_cost(&self, x: &StateVector) -> f64 {
        self.upright_weight * (1.0 + x[2].cos())
            + self.cart_pos_weight * x[0] * x[0]
            + self.pole_rate_weight * x[3] * x[3]
            + self.cart_vel_weight * x[1] * x[1]
    }

    fn terminal_cost(&self, x: &StateVector) -> f64 {
        self.terminal_scale * self.running_cost(x)
    }
}

/// Planar-push shaping: drive the object to the target, keep the pusher
/// behind the object, and settle everything at the end.
#[derive(Debug, Clone, Copy)]
pub struct PusherCost {
    pub target: [f64; 2],
    pub goal_weight: f64,
    pub near_weight: f64,
    pub object_vel_weight: f64,
    pub terminal_scale: f64,
}

impl CostSpec for PusherCost {
    fn running_cost(&self, x: &StateVector) -> f64 {
        let (gx, gy) = (x[4] - self.target[0], x[5] - self.target[1]);
        let (nx, ny) = (x[0] - x[4], x[1] - x[5]);
        let vel = x[6] * x[6] + x[7] * x[7];
        self.goal_weight * (gx * gx + gy * gy)
            + self.near_weight * (nx * nx + ny * ny)
            + self.object_vel_weight * vel
    }

    fn terminal_cost(&self, x: &StateVector) -> f64 {
        self.terminal_scale * self.running_cost(x)
    }
}

/// Target the pusher preset drives the object to.
pub const PUSHER_TARGET: [f64; 2] = [0.35, 0.0];

/// Build the plant, cost, start state, and success predicate for a named
/// task. Success thresholds: pendulum and cart-pole hold the pole within
/// 0.1 rad of upright at |rate| < 0.5 rad/s for 1 s (cart additionally
/// within ±2.4 m); the pusher holds the object within 2 cm of the target
/// for 0.5 s.
pub fn build_task(cfg: &TaskConfig) -> Result<Task, TaskError> {
    let model = model_by_name(&cfg.name).ok_or_else(|| TaskError::Unknown(cfg.name.clone()))?;
    let (cost, initial_state, success): (Box<dyn CostSpec>, StateVector, SuccessSpec) =
        match cfg.name.as_str() {
            "pendulum" => (
                Box::new(PendulumCost {
                    upright_weight: 25.0,
                    rate_weight: 0.5,
                    terminal_scale: 15.0,
                }),
                StateVector::zeros(2),
                SuccessSpec::new(1.0, |x: &StateVector| {
                    wrap_to_pi(x[0] - std::f64::consts::PI).abs() < 0.1 && x[1].abs() < 0.5
                }),
            ),
            "cartpole" => (
                Box::new(CartPoleCost {
                    upright_weight: 30.0,
                    cart_pos_weight: 1.0,
                    pole_rate_weight: 0.3,
                    cart_vel_weight: 0.3,
                    terminal_scale: 10.0,
                }),
                StateVector::zeros(4),
                SuccessSpec::new(1.0, |x: &StateVector| {
                    wrap_to_pi(x[2] - std::f64::consts::PI).abs() < 0.1
                        && x[3].abs() < 0.5
                        && x[0].abs() < 2.4
                }),
            ),
            "pusher" => (
                Box::new(PusherCost {
                    target: PUSHER_TARGET,
                    goal_weight: 60.0,
                    near_weight: 4.0,
                    object_vel_weight: 0.5,
                    terminal_scale: 10.0,
                }),
                StateVector::from_vec(vec![-0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                SuccessSpec::new(0.5, |x: &StateVector| {
                    let (dx, dy) = (x[4] - PUSHER_TARGET[0], x[5] - PUSHER_TARGET[1]);
                    (dx * dx + dy * dy).sqrt() < 0.02
                }),
            ),
            other => return Err(TaskError::Unknown(other.to_string())),
        };
    Ok(Task {
        name: cfg.name.clone(),
        model,
        cost,
        initial_state,
        success,
    })
}

/// Tuned default experiment config for a named task, or `None` if the name
/// is unknown. These are the configs shipped under `configs/`.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "pendulum" => ExperimentConfig {
            task: TaskConfig {
                name: "pendulum".into(),
                dt: 0.01,
                episode_steps: 1000,
                observation_noise_var: 1e-3,
                stop_on_success: true,
            },
            controller: ControllerConfig {
                horizon: 80,
                n_particles: 20,
                n_rollouts: 4,
                sigma: vec![1.0],
                lambda: 0.08,
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
        },
        "cartpole" => ExperimentConfig {
            task: TaskConfig {
                name: "cartpole".into(),
                dt: 0.01,
                episode_steps: 1000,
                observation_noise_var: 1e-3,
                stop_on_success: true,
            },
            controller: ControllerConfig {
                horizon: 100,
                n_particles: 20,
                n_rollouts: 4,
                sigma: vec![9.0],
                lambda: 0.4,
                likelihood_variance: vec![0.01, 0.01, 0.01, 0.01],
                ess_fraction: 0.5,
                smoothing: Smoothing::Off,
                seed: 0,
                u_min: vec![-12.0],
                u_max: vec![12.0],
                weights_mode: WeightsMode::PerStep,
                ess_cap_at_n: true,
                jitter_scale: 0.1,
            },
            belief: BeliefConfig {
                priors: vec![
                    "uniform(0.5,2)".parse().unwrap(),
                    "uniform(0.5,2)".parse().unwrap(),
                    "point(1)".parse().unwrap(),
                    "point(0.5)".parse().unwrap(),
                ],
            },
            truth: TruthConfig {
                theta: vec![1.0, 1.0, 1.0, 0.5],
            },
        },
        "pusher" => ExperimentConfig {
            task: TaskConfig {
                name: "pusher".into(),
                dt: 0.02,
                episode_steps: 500,
                // Millimeter-scale tracking: the success radius is 2 cm and
                // contact penetrations are smaller still, so centimeter
                // noise would drown both the controller and the filter.
                observation_noise_var: 1e-6,
                stop_on_success: true,
            },
            controller: ControllerConfig {
                horizon: 60,
                n_particles: 20,
                n_rollouts: 4,
                sigma: vec![1.0, 1.0],
                lambda: 0.3,
                likelihood_variance: vec![1e-3; 8],
                ess_fraction: 0.5,
                smoothing: Smoothing::Off,
                seed: 0,
                u_min: vec![-2.0, -2.0],
                u_max: vec![2.0, 2.0],
                weights_mode: WeightsMode::PerStep,
                ess_cap_at_n: true,
                jitter_scale: 0.1,
            },
            belief: BeliefConfig {
                priors: vec![
                    "normal(0.25,0.1)".parse().unwrap(),
                    "uniform(0.1,1)".parse().unwrap(),
                ],
            },
            truth: TruthConfig {
                theta: vec![0.25, 0.4],
            },
        },
        _ => return None,
    };
    Some(cfg)
}
