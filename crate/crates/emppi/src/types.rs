//! Shared vector types for states, controls and costs.
//!
//! States, controls and physical parameters are plain `nalgebra` dynamic
//! vectors; the structured types below only add the invariants the planner
//! relies on (horizon shape, actuation bounds).

use nalgebra::DVector;

/// System state `x`, task-defined units (angles rad, positions m, SI rates).
pub type StateVector = DVector<f64>;

/// Control input `u`, task-defined actuation units.
pub type ControlVector = DVector<f64>;

/// One candidate physical parameter vector (masses kg, damping kg/s, ...).
pub type ParameterVector = DVector<f64>;

/// Per-dimension actuation limits. Controls are clamped into `[lower, upper]`
/// after noise is added inside rollouts and again after the weighted update.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlBounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl ControlBounds {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound dimensions differ");
        Self { lower, upper }
    }

    /// Symmetric bounds `[-limit, limit]` in every dimension.
    pub fn symmetric(dim: usize, limit: f64) -> Self {
        Self {
            lower: DVector::from_element(dim, -limit),
            upper: DVector::from_element(dim, limit),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, u: &ControlVector) -> ControlVector {
        ControlVector::from_fn(u.len(), |i, _| u[i].clamp(self.lower[i], self.upper[i]))
    }

    pub fn clamp_in_place(&self, u: &mut ControlVector) {
        for i in 0..u.len() {
            u[i] = u[i].clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn contains(&self, u: &ControlVector) -> bool {
        (0..u.len()).all(|i| u[i] >= self.lower[i] && u[i] <= self.upper[i])
    }
}

/// A planning-horizon control sequence, `T` rows of `m`-dimensional controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    steps: Vec<ControlVector>,
}

impl ControlSequence {
    pub fn zeros(horizon: usize, control_dim: usize) -> Self {
        Self {
            steps: vec![ControlVector::zeros(control_dim); horizon],
        }
    }

    pub fn from_steps(steps: Vec<ControlVector>) -> Self {
        if let Some(first) = steps.first() {
            assert!(
                steps.iter().all(|s| s.len() == first.len()),
                "ragged control sequence"
            );
        }
        Self { steps }
    }

    /// Horizon length `T`.
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// Control dimension `m`.
    pub fn control_dim(&self) -> usize {
        self.steps.first().map_or(0, |s| s.len())
    }

    pub fn step(&self, t: usize) -> &ControlVector {
        &self.steps[t]
    }

    pub fn step_mut(&mut self, t: usize) -> &mut ControlVector {
        &mut self.steps[t]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ControlVector> {
        self.steps.iter()
    }

    pub fn clamp_in_place(&mut self, bounds: &ControlBounds) {
        for s in &mut self.steps {
            bounds.clamp_in_place(s);
        }
    }
}

/// The sampled perturbations `du` for one rollout, same shape as a
/// [`ControlSequence`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSequence {
    deltas: Vec<ControlVector>,
}

impl NoiseSequence {
    pub fn from_deltas(deltas: Vec<ControlVector>) -> Self {
        Self { deltas }
    }

    pub fn horizon(&self) -> usize {
        self.deltas.len()
    }

    pub fn control_dim(&self) -> usize {
        self.deltas.first().map_or(0, |d| d.len())
    }

    pub fn delta(&self, t: usize) -> &ControlVector {
        &self.deltas[t]
    }

    pub fn zeros(horizon: usize, control_dim: usize) -> Self {
        Self {
            deltas: vec![ControlVector::zeros(control_dim); horizon],
        }
    }
}

/// State-dependent task objective: running cost `l(x)` plus terminal cost
/// `m(x_T)`. Implementations must be pure and return finite values on finite
/// states.
pub trait CostSpec: Sync {
    fn running_cost(&self, x: &StateVector) -> f64;
    fn terminal_cost(&self, x: &StateVector) -> f64;
}

/// Zero cost everywhere; used by tests that isolate the sampling path.
pub struct ZeroCost;

impl CostSpec for ZeroCost {
    fn running_cost(&self, _x: &StateVector) -> f64 {
        0.0
    }
    fn terminal_cost(&self, _x: &StateVector) -> f64 {
        0.0
    }
}
