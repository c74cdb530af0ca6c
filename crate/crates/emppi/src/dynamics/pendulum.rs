//! Torque-actuated pendulum.
//!
//! State `[angle, rate]` with the angle measured from the hanging-down
//! position, control `[torque]`, parameters `[mass, length, damping]`.
//! The upright target is `angle = pi`.

use nalgebra::dvector;

use crate::types::{ControlVector, ParameterVector, StateVector};

use super::{DynamicsModel, GRAVITY};

const MIN_MASS: f64 = 1e-9;
const MIN_LENGTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct Pendulum;

impl Pendulum {
    /// Total mechanical energy, zero level at the pivot.
    pub fn energy(&self, x: &StateVector, theta: &ParameterVector) -> f64 {
        let (mass, length) = (theta[0], theta[1]);
        0.5 * mass * length * length * x[1] * x[1] - mass * GRAVITY * length * x[0].cos()
    }
}

impl DynamicsModel for Pendulum {
    fn state_dim(&self) -> usize {
        2
    }
    fn control_dim(&self) -> usize {
        1
    }
    fn param_dim(&self) -> usize {
        3
    }

    fn derivative(
        &self,
        x: &StateVector,
        u: &ControlVector,
        theta: &ParameterVector,
    ) -> StateVector {
        let (angle, rate) = (x[0], x[1]);
        let (mass, length, damping) = (theta[0], theta[1], theta[2]);
        let accel =
            (u[0] - damping * rate - mass * GRAVITY * length * angle.sin()) / (mass * length * length);
        dvector![rate, accel]
    }

    fn clamp_params(&self, theta: &mut ParameterVector) {
        theta[0] = theta[0].max(MIN_MASS);
        theta[1] = theta[1].max(MIN_LENGTH);
        theta[2] = theta[2].max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params() -> ParameterVector {
        dvector![1.0, 1.0, 0.0]
    }

    #[test]
    fn rest_at_bottom_is_equilibrium() {
        let d = Pendulum.derivative(&dvector![0.0, 0.0], &dvector![0.0], &params());
        assert_eq!(d, dvector![0.0, 0.0]);
    }

    #[test]
    fn upright_is_equilibrium() {
        let d = Pendulum.derivative(&dvector![PI, 0.0], &dvector![0.0], &params());
        assert_eq!(d[0], 0.0);
        // sin(pi) is not exactly zero in f64; the residual is ~1e-16.
        assert!(d[1].abs() < 1e-12);
    }

    #[test]
    fn unit_torque_gives_unit_accel() {
        let d = Pendulum.derivative(&dvector![0.0, 0.0], &dvector![1.0], &params());
        assert_eq!(d, dvector![0.0, 1.0]);
    }

    #[test]
    fn horizontal_gravity_torque() {
        let d = Pendulum.derivative(&dvector![PI / 2.0, 0.0], &dvector![0.0], &params());
        assert_relative_eq!(d[1], -GRAVITY, max_relative = 1e-15);
    }

    #[test]
    fn damping_opposes_rate() {
        let theta = dvector![1.0, 1.0, 0.5];
        let d = Pendulum.derivative(&dvector![0.0, 2.0], &dvector![0.0], &theta);
        assert_relative_eq!(d[1], -1.0, max_relative = 1e-15);
    }

    #[test]
    fn clamp_enforces_positivity() {
        let mut theta = dvector![-1.0, 0.0, -0.3];
        Pendulum.clamp_params(&mut theta);
        assert!(theta[0] > 0.0 && theta[1] > 0.0);
        assert_eq!(theta[2], 0.0);
    }
}
