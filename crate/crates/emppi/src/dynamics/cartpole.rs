//! Cart-pole with an uncertain pole.
//!
//! State `[cart_pos, cart_vel, pole_angle, pole_rate]`; the pole angle is
//! measured from hanging-down, so the swing-up target is `pi`. Control is a
//! horizontal force on the cart. Parameters
//! `[pole_mass, pole_inertia_scale, cart_mass, pole_length]`, where
//! `pole_length` is the pivot-to-center-of-mass distance and the pole's
//! moment of inertia about its center of mass is
//! `pole_inertia_scale * pole_mass * pole_length^2 / 3` (scale 1 is a
//! uniform rod of full length `2 * pole_length`).

use nalgebra::dvector;

use crate::types::{ControlVector, ParameterVector, StateVector};

use super::{DynamicsModel, GRAVITY};

const MIN_MASS: f64 = 1e-9;
const MIN_LENGTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct CartPole;

impl DynamicsModel for CartPole {
    fn state_dim(&self) -> usize {
        4
    }
    fn control_dim(&self) -> usize {
        1
    }
    fn param_dim(&self) -> usize {
        4
    }

    fn derivative(
        &self,
        x: &StateVector,
        u: &ControlVector,
        theta: &ParameterVector,
    ) -> StateVector {
        let (cart_vel, angle, rate) = (x[1], x[2], x[3]);
        let (pole_mass, inertia_scale, cart_mass, length) =
            (theta[0], theta[1], theta[2], theta[3]);
        let force = u[0];

        let (s, c) = angle.sin_cos();
        let ml = pole_mass * length;
        let inertia_com = inertia_scale * pole_mass * length * length / 3.0;

        // Coupled cart/pole accelerations from the force balance:
        //   [m_c + m_p      m_p l cos] [cart_acc]   [F + m_p l rate^2 sin]
        //   [m_p l cos   m_p l^2 + I ] [pole_acc] = [   -m_p g l sin     ]
        let a11 = cart_mass + pole_mass;
        let a12 = ml * c;
        let a22 = ml * length + inertia_com;
        let b1 = force + ml * rate * rate * s;
        let b2 = -ml * GRAVITY * s;
        let det = a11 * a22 - a12 * a12;

        let cart_acc = (a22 * b1 - a12 * b2) / det;
        let pole_acc = (a11 * b2 - a12 * b1) / det;
        dvector![cart_vel, cart_acc, rate, pole_acc]
    }

    fn clamp_params(&self, theta: &mut ParameterVector) {
        theta[0] = theta[0].max(MIN_MASS);
        theta[1] = theta[1].max(0.0);
        theta[2] = theta[2].max(MIN_MASS);
        theta[3] = theta[3].max(MIN_LENGTH);
    }
}

impl CartPole {
    /// Total mechanical energy for conservation checks (zero force, no friction).
    pub fn energy(&self, x: &StateVector, theta: &ParameterVector) -> f64 {
        let (cart_vel, angle, rate) = (x[1], x[2], x[3]);
        let (pole_mass, inertia_scale, cart_mass, length) =
            (theta[0], theta[1], theta[2], theta[3]);
        let inertia_com = inertia_scale * pole_mass * length * length / 3.0;
        let kinetic = 0.5 * (cart_mass + pole_mass) * cart_vel * cart_vel
            + pole_mass * length * cart_vel * rate * angle.cos()
            + 0.5 * (pole_mass * length * length + inertia_com) * rate * rate;
        let potential = -pole_mass * GRAVITY * length * angle.cos();
        kinetic + potential
    }
}
