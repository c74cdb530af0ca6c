//! The planning cycle: noise sampling, ensemble rollouts, suffix-cost
//! softmax weighting, and the recursive control update.
//!
//! One [`ControllerState::control_step`] runs the whole pipeline for a
//! single receding-horizon cycle: sample `K` noise sequences for each of
//! the `N` parameter particles, roll every perturbed sequence through the
//! model held by that particle, build the suffix-cost table, turn it into
//! per-step softmax weights fused with the particle probabilities, blend
//! the noise into the nominal sequence, optionally smooth, and shift the
//! horizon. The pieces are exposed as free functions so each contract can
//! be tested on its own.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::belief::ParameterBelief;
use crate::config::{ControllerConfig, Smoothing, WeightsMode};
use crate::dynamics::DynamicsModel;
use crate::rng::{stream, StreamKind};
use crate::types::{
    ControlBounds, ControlSequence, ControlVector, CostSpec, NoiseSequence, ParameterVector,
    StateVector,
};

/// Cost assigned to every remaining step of a rollout whose integration
/// produced a non-finite state. Large enough that the softmax weight of a
/// diverged sample underflows to zero whenever any sample survived.
pub const DIVERGENCE_PENALTY: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControllerError {
    /// The softmax normalizer underflowed to zero: even the argmin sample's
    /// belief-weighted term vanished, which means `lambda` is far too small
    /// for the cost scale (or every surviving sample sits on a zero-weight
    /// particle).
    #[error("softmax weights degenerate at horizon step {t}: normalizer underflowed to zero")]
    DegenerateWeights { t: usize },
}

/// Per-step and suffix costs for every rollout of one planning cycle.
///
/// Both tables are laid out `[t][k][n]` with `n` fastest; `step_costs` has
/// `T + 1` rows (row `T` holds the terminal cost) and `suffix_costs[t] =
/// step_costs[t] + suffix_costs[t + 1]`, so `suffix_costs[t][k][n]` is the
/// cost-to-go of rollout `(k, n)` from time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutCostTable {
    horizon: usize,
    n_rollouts: usize,
    n_particles: usize,
    step_costs: Vec<f64>,
    suffix_costs: Vec<f64>,
}

impl RolloutCostTable {
    fn idx(&self, t: usize, k: usize, n: usize) -> usize {
        debug_assert!(t <= self.horizon && k < self.n_rollouts && n < self.n_particles);
        (t * self.n_rollouts + k) * self.n_particles + n
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_rollouts(&self) -> usize {
        self.n_rollouts
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn step_cost(&self, t: usize, k: usize, n: usize) -> f64 {
        self.step_costs[self.idx(t, k, n)]
    }

    pub fn suffix_cost(&self, t: usize, k: usize, n: usize) -> f64 {
        self.suffix_costs[self.idx(t, k, n)]
    }

    /// Minimum suffix cost over all `(k, n)` at time `t`: the softmax
    /// baseline β_t.
    pub fn min_suffix(&self, t: usize) -> f64 {
        let row = &self.suffix_costs[self.idx(t, 0, 0)..=self.idx(t, self.n_rollouts - 1, self.n_particles - 1)];
        row.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Reverse-cumulative-sum the step costs into a full cost table.
///
/// `step_costs` is flattened `[T+1][K][N]` with `n` fastest.
pub fn suffix_sums(
    horizon: usize,
    n_rollouts: usize,
    n_particles: usize,
    step_costs: Vec<f64>,
) -> RolloutCostTable {
    let row = n_rollouts * n_particles;
    assert_eq!(step_costs.len(), (horizon + 1) * row, "step cost table shape");
    let mut suffix_costs = step_costs.clone();
    for t in (0..horizon).rev() {
        for i in 0..row {
            suffix_costs[t * row + i] = step_costs[t * row + i] + suffix_costs[(t + 1) * row + i];
        }
    }
    RolloutCostTable {
        horizon,
        n_rollouts,
        n_particles,
        step_costs,
        suffix_costs,
    }
}

/// Fused softmax weights ω(v_{t,k,n}), one row per horizon step, plus the
/// baselines β_t they were computed against. Each row is normalized over
/// all `(k, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    horizon: usize,
    n_rollouts: usize,
    n_particles: usize,
    omega: Vec<f64>,
    betas: Vec<f64>,
}

impl WeightTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_rollouts(&self) -> usize {
        self.n_rollouts
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn weight(&self, t: usize, k: usize, n: usize) -> f64 {
        debug_assert!(t < self.horizon && k < self.n_rollouts && n < self.n_particles);
        self.omega[(t * self.n_rollouts + k) * self.n_particles + n]
    }

    pub fn beta(&self, t: usize) -> f64 {
        self.betas[t]
    }
}

/// Draw the `T × m` Gaussian perturbation sequence for rollout `(k, n)` of
/// one planning cycle. The stream is derived deterministically from
/// `(seed, cycle, k, n)`, so the same tuple always yields the same noise
/// and distinct tuples are independent.
pub fn sample_noise(config: &ControllerConfig, cycle: u64, k: usize, n: usize) -> NoiseSequence {
    let m = config.sigma.len();
    let std: Vec<f64> = config.sigma.iter().map(|v| v.sqrt()).collect();
    let mut rng = stream(config.seed, StreamKind::RolloutNoise, cycle, k as u64, n as u64);
    let deltas = (0..config.horizon)
        .map(|_| {
            ControlVector::from_iterator(
                m,
                std.iter().map(|s| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    s * z
                }),
            )
        })
        .collect();
    NoiseSequence::from_deltas(deltas)
}

/// All `K × N` noise sequences of one cycle, indexed `(k, n)`.
#[derive(Debug, Clone)]
pub struct NoiseBatch {
    n_rollouts: usize,
    n_particles: usize,
    seqs: Vec<NoiseSequence>,
}

impl NoiseBatch {
    pub fn sample(config: &ControllerConfig, cycle: u64) -> Self {
        let (kk, nn) = (config.n_rollouts, config.n_particles);
        let seqs = (0..kk * nn)
            .map(|i| sample_noise(config, cycle, i / nn, i % nn))
            .collect();
        NoiseBatch {
            n_rollouts: kk,
            n_particles: nn,
            seqs,
        }
    }

    pub fn n_rollouts(&self) -> usize {
        self.n_rollouts
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn get(&self, k: usize, n: usize) -> &NoiseSequence {
        debug_assert!(k < self.n_rollouts && n < self.n_particles);
        &self.seqs[k * self.n_particles + n]
    }
}

/// Simulate one perturbed control sequence through `model` under parameters
/// `theta` and record the per-step costs
/// `s_t = running_cost(x_t) + lambda · u_tᵀ Σ⁻¹ δu_t` for `t < T` plus the
/// terminal cost in slot `T`. The control actually applied at each step is
/// `clamp(u_t + δu_t)`; once integration produces a non-finite state, every
/// remaining slot (terminal included) gets [`DIVERGENCE_PENALTY`].
#[allow(clippy::too_many_arguments)]
pub fn rollout(
    model: &dyn DynamicsModel,
    theta: &ParameterVector,
    x0: &StateVector,
    nominal: &ControlSequence,
    noise: &NoiseSequence,
    cost: &dyn CostSpec,
    config: &ControllerConfig,
    dt: f64,
) -> Vec<f64> {
    let horizon = nominal.horizon();
    let bounds = config.bounds();
    let mut costs = vec![0.0; horizon + 1];
    let mut x = x0.clone();
    let mut diverged = false;
    for t in 0..horizon {
        if diverged {
            costs[t] = DIVERGENCE_PENALTY;
            continue;
        }
        let u = nominal.step(t);
        let du = noise.delta(t);
        let mut cross = 0.0;
        for d in 0..u.len() {
            cross += u[d] * du[d] / config.sigma[d];
        }
        costs[t] = cost.running_cost(&x) + config.lambda * cross;
        let v = bounds.clamp(&(u + du));
        match model.step(&x, &v, theta, dt) {
            Ok(next) => x = next,
            Err(_) => diverged = true,
        }
    }
    costs[horizon] = if diverged {
        DIVERGENCE_PENALTY
    } else {
        cost.terminal_cost(&x)
    };
    costs
}

/// Turn suffix costs and particle probabilities into normalized weights:
/// `ω_{t,k,n} = exp(−(S̃_{t,k,n} − β_t)/λ) · p(θ_n) / Z_t` with
/// `β_t = min_{k,n} S̃_{t,k,n}` subtracted before exponentiation. In
/// `Trajectory` mode the `t = 0` row is reused for every horizon slot.
pub fn compute_weights(
    costs: &RolloutCostTable,
    belief_weights: &[f64],
    lambda: f64,
    mode: WeightsMode,
) -> Result<WeightTable, ControllerError> {
    let (horizon, kk, nn) = (costs.horizon(), costs.n_rollouts(), costs.n_particles());
    assert_eq!(belief_weights.len(), nn, "one belief weight per particle");
    let row = kk * nn;
    let mut omega = vec![0.0; horizon * row];
    let mut betas = vec![0.0; horizon];
    let rows_to_compute = match mode {
        WeightsMode::PerStep => horizon,
        WeightsMode::Trajectory => 1,
    };
    for t in 0..rows_to_compute {
        let beta = costs.min_suffix(t);
        betas[t] = beta;
        let mut z = 0.0;
        for k in 0..kk {
            for n in 0..nn {
                let w = (-(costs.suffix_cost(t, k, n) - beta) / lambda).exp() * belief_weights[n];
                omega[(t * kk + k) * nn + n] = w;
                z += w;
            }
        }
        if !(z > 0.0) || !z.is_finite() {
            return Err(ControllerError::DegenerateWeights { t });
        }
        for w in &mut omega[t * row..(t + 1) * row] {
            *w /= z;
        }
    }
    if mode == WeightsMode::Trajectory {
        for t in 1..horizon {
            omega.copy_within(0..row, t * row);
            betas[t] = betas[0];
        }
    }
    Ok(WeightTable {
        horizon,
        n_rollouts: kk,
        n_particles: nn,
        omega,
        betas,
    })
}

/// The recursive update `u_t ← u_t + Σ_k Σ_n ω_{t,k,n} δu_{t,k,n}`,
/// clamped to the control bounds.
pub fn update_controls(
    nominal: &ControlSequence,
    all_noise: &NoiseBatch,
    weights: &WeightTable,
    bounds: &ControlBounds,
) -> ControlSequence {
    let mut out = nominal.clone();
    for t in 0..nominal.horizon() {
        let acc = out.step_mut(t);
        for k in 0..weights.n_rollouts() {
            for n in 0..weights.n_particles() {
                acc.axpy(weights.weight(t, k, n), all_noise.get(k, n).delta(t), 1.0);
            }
        }
    }
    out.clamp_in_place(bounds);
    out
}

/// Drop `u_0`, move every control forward one slot, and repeat the last
/// control into the freed final slot.
pub fn shift_horizon(nominal: &ControlSequence) -> ControlSequence {
    let horizon = nominal.horizon();
    let steps = (0..horizon)
        .map(|t| nominal.step((t + 1).min(horizon - 1)).clone())
        .collect();
    ControlSequence::from_steps(steps)
}

/// Apply the configured filter to the nominal sequence. `Off` is the
/// identity; `MovingAverage` is a centered per-dimension mean whose window
/// truncates at the sequence edges (averaging whatever neighbors exist).
pub fn smooth_controls(
    nominal: &ControlSequence,
    policy: Smoothing,
    bounds: &ControlBounds,
) -> ControlSequence {
    match policy {
        Smoothing::Off => nominal.clone(),
        Smoothing::MovingAverage { window } => {
            let half = window / 2;
            let horizon = nominal.horizon();
            let steps = (0..horizon)
                .map(|t| {
                    let lo = t.saturating_sub(half);
                    let hi = (t + half).min(horizon - 1);
                    let mut acc = ControlVector::zeros(nominal.control_dim());
                    for j in lo..=hi {
                        acc += nominal.step(j);
                    }
                    let mut v = acc / (hi - lo + 1) as f64;
                    bounds.clamp_in_place(&mut v);
                    v
                })
                .collect();
            ControlSequence::from_steps(steps)
        }
    }
}

/// Everything one planning cycle hands back to the caller.
#[derive(Debug, Clone)]
pub struct CycleOutput {
    /// The first control of the optimized sequence, to be applied now.
    pub action: ControlVector,
    /// Softmax baseline at `t = 0`, i.e. the best suffix cost seen this
    /// cycle (a progress diagnostic logged per step).
    pub beta0: f64,
    /// The full cost table, kept for diagnostics and tests.
    pub costs: RolloutCostTable,
}

/// Receding-horizon planner state: the nominal sequence carried between
/// cycles plus the cycle counter that keys the per-cycle RNG streams. All
/// randomness derives from `config.seed` and that counter, so the state
/// needs no generator object of its own.
#[derive(Debug, Clone)]
pub struct ControllerState {
    config: ControllerConfig,
    dt: f64,
    nominal: ControlSequence,
    cycle_index: u64,
}

impl ControllerState {
    /// Fresh planner with an all-zero nominal sequence.
    pub fn new(config: ControllerConfig, dt: f64) -> Self {
        let nominal = ControlSequence::zeros(config.horizon, config.sigma.len());
        ControllerState {
            config,
            dt,
            nominal,
            cycle_index: 0,
        }
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn nominal(&self) -> &ControlSequence {
        &self.nominal
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle_index
    }

    /// One full planning cycle from the measured state: sample noise, roll
    /// out all `K × N` perturbations (in parallel, in deterministic order),
    /// weight, update, smooth, then extract `u_0` and shift the horizon.
    pub fn control_step(
        &mut self,
        model: &dyn DynamicsModel,
        cost: &dyn CostSpec,
        belief: &ParameterBelief,
        x_measured: &StateVector,
    ) -> Result<CycleOutput, ControllerError> {
        let (kk, nn) = (self.config.n_rollouts, self.config.n_particles);
        assert_eq!(belief.len(), nn, "belief size must match config N");
        let noises = NoiseBatch::sample(&self.config, self.cycle_index);

        let nominal = &self.nominal;
        let config = &self.config;
        let dt = self.dt;
        let per_rollout: Vec<Vec<f64>> = (0..kk * nn)
            .into_par_iter()
            .map(|i| {
                let (k, n) = (i / nn, i % nn);
                rollout(
                    model,
                    belief.particle(n),
                    x_measured,
                    nominal,
                    noises.get(k, n),
                    cost,
                    config,
                    dt,
                )
            })
            .collect();

        // Scatter the per-rollout cost vectors into the [t][k][n] layout;
        // rollout i covers (k, n) = (i / N, i % N), so row offset i is
        // already k·N + n.
        let horizon = self.config.horizon;
        let row = kk * nn;
        let mut step_costs = vec![0.0; (horizon + 1) * row];
        for (i, costs_i) in per_rollout.iter().enumerate() {
            for (t, &c) in costs_i.iter().enumerate() {
                step_costs[t * row + i] = c;
            }
        }
        let table = suffix_sums(horizon, kk, nn, step_costs);
        let weights = compute_weights(&table, belief.weights(), self.config.lambda, self.config.weights_mode)?;

        let bounds = self.config.bounds();
        let updated = update_controls(&self.nominal, &noises, &weights, &bounds);
        let smoothed = smooth_controls(&updated, self.config.smoothing, &bounds);
        let action = smoothed.step(0).clone();
        self.nominal = shift_horizon(&smoothed);
        self.cycle_index += 1;
        Ok(CycleOutput {
            action,
            beta0: weights.beta(0),
            costs: table,
        })
    }
}
