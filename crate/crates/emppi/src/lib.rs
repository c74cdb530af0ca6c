//! Sampling-based model-predictive control over an ensemble of dynamics
//! hypotheses.
//!
//! The controller plans like MPPI (perturb a nominal control sequence,
//! roll each perturbation through a model, reweight by cost) but holds a
//! particle belief over the model parameters instead of a single point
//! estimate. Every control cycle spreads its rollouts across the particles,
//! blends them with cost weights that also fold in the particle
//! probabilities, and then sharpens the belief with a Bayes update against
//! the newly observed state. When the belief degenerates it is resampled
//! around its current mean.
//!
//! Crate layout:
//! - [`dynamics`]: the plant models (pendulum, cart-pole, planar pusher)
//!   and the shared RK4 stepper.
//! - [`controller`]: one planning cycle, from noise sampling and rollouts
//!   through suffix-cost weighting, control update, and horizon shift.
//! - [`belief`]: the parameter particle filter.
//! - [`config`]: TOML experiment schema and validation.
//! - [`harness`]: closed-loop episodes, baseline comparisons, sweeps, and
//!   CSV/JSON logging.

pub mod belief;
pub mod config;
pub mod controller;
pub mod dynamics;
pub mod harness;
pub mod rng;
pub mod task;
pub mod types;

pub use belief::ParameterBelief;
pub use config::{ConfigError, ExperimentConfig, PriorSpec, Smoothing, WeightsMode};
pub use controller::{ControllerState, RolloutCostTable, WeightTable};
pub use dynamics::{DynamicsError, DynamicsModel};
pub use harness::{EpisodeLog, EpisodeRecord};
pub use task::Task;
pub use types::{ControlBounds, ControlSequence, ControlVector, CostSpec, NoiseSequence,
    ParameterVector, StateVector};
