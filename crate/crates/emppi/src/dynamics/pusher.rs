//! Planar nonprehensile pushing.
//!
//! An acceleration-controlled pusher disk moves an object disk through a
//! stiff penalty contact; the object slides under Coulomb friction against
//! the table. State
//! `[pusher_x, pusher_y, pusher_vx, pusher_vy, object_x, object_y,
//!   object_vx, object_vy]`, control `[accel_x, accel_y]`, parameters
//! `[object_mass, friction_coeff]`.
//!
//! Contact does not push back on the pusher (it is treated as a
//! velocity-commanded tool with effectively infinite mechanical advantage).
//! The friction force magnitude is `mu * m * g` with the sign function
//! smoothed by `tanh(|v| / vel_eps)` so the derivative stays RK4-friendly
//! through sticking transitions.

use nalgebra::dvector;

use crate::types::{ControlVector, ParameterVector, StateVector};

use super::{DynamicsModel, GRAVITY};

const MIN_MASS: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct Pusher {
    pub pusher_radius: f64,
    pub object_radius: f64,
    /// Penalty spring constant, N/m.
    pub contact_stiffness: f64,
    /// Velocity scale of the tanh friction regularization, m/s.
    pub friction_vel_eps: f64,
}

impl Default for Pusher {
    fn default() -> Self {
        Self {
            pusher_radius: 0.05,
            object_radius: 0.05,
            contact_stiffness: 500.0,
            friction_vel_eps: 1e-3,
        }
    }
}

impl Pusher {
    /// Penalty contact force exerted on the object, zero when the disks do
    /// not overlap.
    pub fn contact_force(&self, x: &StateVector) -> (f64, f64) {
        let dx = x[4] - x[0];
        let dy = x[5] - x[1];
        let dist = (dx * dx + dy * dy).sqrt();
        let penetration = (self.pusher_radius + self.object_radius) - dist;
        if penetration > 0.0 && dist > 0.0 {
            let scale = self.contact_stiffness * penetration / dist;
            (scale * dx, scale * dy)
        } else {
            (0.0, 0.0)
        }
    }
}

impl DynamicsModel for Pusher {
    fn state_dim(&self) -> usize {
        8
    }
    fn control_dim(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        2
    }

    fn derivative(
        &self,
        x: &StateVector,
        u: &ControlVector,
        theta: &ParameterVector,
    ) -> StateVector {
        let (mass, mu) = (theta[0], theta[1]);
        let (fx, fy) = self.contact_force(x);

        let (ovx, ovy) = (x[6], x[7]);
        let speed = (ovx * ovx + ovy * ovy).sqrt();
        let (mut ax, mut ay) = (fx / mass, fy / mass);
        if speed > 0.0 {
            let decel = mu * GRAVITY * (speed / self.friction_vel_eps).tanh() / speed;
            ax -= decel * ovx;
            ay -= decel * ovy;
        }

        dvector![x[2], x[3], u[0], u[1], ovx, ovy, ax, ay]
    }

    fn clamp_params(&self, theta: &mut ParameterVector) {
        theta[0] = theta[0].max(MIN_MASS);
        theta[1] = theta[1].max(0.0);
    }
}
