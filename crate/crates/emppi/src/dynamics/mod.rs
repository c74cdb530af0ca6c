//! Parameterized continuous-time dynamics `f(x, u; theta)` with fixed-step
//! RK4 integration.
//!
//! The same models serve two roles: the controller's internal ensemble
//! simulators (one per parameter particle) and the harness's ground-truth
//! plant. Models are stateless after construction, so rollout workers may
//! call them concurrently.

use thiserror::Error;

use crate::types::{ControlVector, ParameterVector, StateVector};

mod cartpole;
mod pendulum;
mod pusher;

pub use cartpole::CartPole;
pub use pendulum::Pendulum;
pub use pusher::Pusher;

/// Standard gravity, m/s^2.
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    /// The integrator produced NaN/Inf. Signals divergent parameters; the
    /// caller assigns the rollout a penalty cost instead of aborting.
    #[error("integration produced a non-finite state")]
    NonFiniteState,
}

/// A continuous-time model `dx/dt = f(x, u; theta)`.
///
/// `derivative` must be pure: same arguments, same output, no interior state.
pub trait DynamicsModel: Send + Sync {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn param_dim(&self) -> usize;

    /// Time derivative of the state under control `u` and parameters `theta`.
    fn derivative(
        &self,
        x: &StateVector,
        u: &ControlVector,
        theta: &ParameterVector,
    ) -> StateVector;

    /// Clamp a candidate parameter vector into the physically valid region
    /// (mass > 0, friction >= 0, ...). Applied wherever particles are drawn.
    fn clamp_params(&self, theta: &mut ParameterVector);

    /// One fixed-step advance; see [`step_rk4`].
    fn step(
        &self,
        x: &StateVector,
        u: &ControlVector,
        theta: &ParameterVector,
        dt: f64,
    ) -> Result<StateVector, DynamicsError> {
        step_rk4(self, x, u, theta, dt)
    }
}

/// Classical 4th-order Runge-Kutta advance with zero-order-hold control.
///
/// Deterministic given its arguments. Returns [`DynamicsError::NonFiniteState`]
/// if any intermediate or final entry is NaN/Inf.
pub fn step_rk4<M: DynamicsModel + ?Sized>(
    model: &M,
    x: &StateVector,
    u: &ControlVector,
    theta: &ParameterVector,
    dt: f64,
) -> Result<StateVector, DynamicsError> {
    debug_assert!(dt > 0.0);
    let k1 = model.derivative(x, u, theta);
    let k2 = model.derivative(&(x + &k1 * (dt / 2.0)), u, theta);
    let k3 = model.derivative(&(x + &k2 * (dt / 2.0)), u, theta);
    let k4 = model.derivative(&(x + &k3 * dt), u, theta);
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(DynamicsError::NonFiniteState)
    }
}

/// Construct a model from its config name.
pub fn model_by_name(name: &str) -> Option<Box<dyn DynamicsModel>> {
    match name {
        "pendulum" => Some(Box::new(Pendulum)),
        "cartpole" => Some(Box::new(CartPole)),
        "pusher" => Some(Box::new(Pusher::default())),
        _ => None,
    }
}

/// `(state_dim, control_dim, param_dim)` for a named model, if it exists.
pub fn model_dims(name: &str) -> Option<(usize, usize, usize)> {
    model_by_name(name).map(|m| (m.state_dim(), m.control_dim(), m.param_dim()))
}
