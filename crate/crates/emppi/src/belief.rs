//! Particle belief over the uncertain physical parameters.
//!
//! The belief is a weighted particle set {θ_n, p(θ_n)}. After every applied
//! control the harness calls [`update_belief`]: each particle predicts the
//! next state with one model step, is scored by a diagonal Gaussian
//! likelihood against the actual observation, and the weights are
//! renormalized: Bayes' rule with the particle set as the hypothesis
//! space. All weight arithmetic happens in log space with max-subtraction,
//! since realistic likelihood variances on multi-dimensional states
//! underflow in linear space within a few updates. When the effective
//! sample size collapses below its threshold, [`maybe_resample`] redraws
//! every particle around the current weighted mean with a small jitter.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal, Uniform};
use thiserror::Error;

use crate::config::PriorSpec;
use crate::dynamics::DynamicsModel;
use crate::types::{ControlVector, ParameterVector, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("invalid prior for parameter {index}: {reason}")]
    InvalidPrior { index: usize, reason: String },
    /// Every particle's posterior weight vanished: either all one-step
    /// predictions diverged or the observation is irreconcilable with the
    /// whole ensemble. The caller should keep the previous belief and flag
    /// the event.
    #[error("all particle likelihoods vanished; keeping previous belief")]
    AllZeroLikelihood,
}

/// Weighted particle set over parameter space, plus the likelihood and
/// resampling policy it is updated under.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterBelief {
    particles: Vec<ParameterVector>,
    weights: Vec<f64>,
    likelihood_variance: Vec<f64>,
    ess_threshold: f64,
    jitter_scale: f64,
}

impl ParameterBelief {
    /// Draw `n_particles` i.i.d. samples, one prior per parameter
    /// dimension, with uniform initial weights. Particles are clamped to
    /// the model's physical-positivity constraints after drawing.
    pub fn init(
        priors: &[PriorSpec],
        n_particles: usize,
        likelihood_variance: &[f64],
        ess_threshold: f64,
        jitter_scale: f64,
        model: &dyn DynamicsModel,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, BeliefError> {
        assert!(n_particles >= 1, "need at least one particle");
        let particles = (0..n_particles)
            .map(|_| {
                let mut theta = ParameterVector::zeros(priors.len());
                for (d, prior) in priors.iter().enumerate() {
                    theta[d] = sample_prior(prior, d, rng)?;
                }
                model.clamp_params(&mut theta);
                Ok(theta)
            })
            .collect::<Result<Vec<_>, BeliefError>>()?;
        Ok(ParameterBelief {
            particles,
            weights: vec![1.0 / n_particles as f64; n_particles],
            likelihood_variance: likelihood_variance.to_vec(),
            ess_threshold,
            jitter_scale,
        })
    }

    /// Build a belief from an explicit particle set, for seeding with a
    /// designed hypothesis grid or restoring a saved posterior. Weights are
    /// normalized; they need not arrive that way.
    pub fn from_parts(
        particles: Vec<ParameterVector>,
        weights: Vec<f64>,
        likelihood_variance: Vec<f64>,
        ess_threshold: f64,
        jitter_scale: f64,
    ) -> Self {
        assert!(!particles.is_empty(), "need at least one particle");
        assert_eq!(particles.len(), weights.len(), "one weight per particle");
        assert!(
            weights.iter().all(|&w| w >= 0.0 && w.is_finite()),
            "weights must be finite and nonnegative"
        );
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "weights must not all be zero");
        ParameterBelief {
            particles,
            weights: weights.into_iter().map(|w| w / total).collect(),
            likelihood_variance,
            ess_threshold,
            jitter_scale,
        }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particle(&self, n: usize) -> &ParameterVector {
        &self.particles[n]
    }

    pub fn particles(&self) -> &[ParameterVector] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn likelihood_variance(&self) -> &[f64] {
        &self.likelihood_variance
    }

    pub fn ess_threshold(&self) -> f64 {
        self.ess_threshold
    }

    pub fn jitter_scale(&self) -> f64 {
        self.jitter_scale
    }

    pub fn ess(&self) -> f64 {
        effective_sample_size(&self.weights)
    }

    pub fn weighted_mean(&self) -> ParameterVector {
        weighted_mean(self)
    }

    /// Per-dimension weighted standard deviation about the weighted mean.
    pub fn weighted_std(&self) -> ParameterVector {
        let mean = self.weighted_mean();
        let dim = mean.len();
        let mut var = ParameterVector::zeros(dim);
        for (theta, &w) in self.particles.iter().zip(&self.weights) {
            for d in 0..dim {
                let delta = theta[d] - mean[d];
                var[d] += w * delta * delta;
            }
        }
        var.map(f64::sqrt)
    }
}

fn sample_prior(prior: &PriorSpec, index: usize, rng: &mut ChaCha8Rng) -> Result<f64, BeliefError> {
    let invalid = |reason: String| BeliefError::InvalidPrior { index, reason };
    match *prior {
        PriorSpec::Uniform { low, high } => {
            if !(low < high) {
                return Err(invalid(format!("uniform requires a < b, got ({low},{high})")));
            }
            Ok(Uniform::new(low, high).map_err(|e| invalid(e.to_string()))?.sample(rng))
        }
        PriorSpec::Normal { mean, variance } => {
            if !(variance > 0.0) {
                return Err(invalid(format!("normal requires var > 0, got {variance}")));
            }
            let z: f64 = StandardNormal.sample(rng);
            Ok(mean + variance.sqrt() * z)
        }
        PriorSpec::Binomial { trials, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("binomial requires p in [0,1], got {p}")));
            }
            Ok(Binomial::new(trials, p).map_err(|e| invalid(e.to_string()))?.sample(rng) as f64)
        }
        PriorSpec::Point { value } => Ok(value),
    }
}

/// Convenience alias matching the operation name used in the docs.
pub fn init_belief(
    priors: &[PriorSpec],
    n_particles: usize,
    likelihood_variance: &[f64],
    ess_threshold: f64,
    jitter_scale: f64,
    model: &dyn DynamicsModel,
    rng: &mut ChaCha8Rng,
) -> Result<ParameterBelief, BeliefError> {
    ParameterBelief::init(
        priors,
        n_particles,
        likelihood_variance,
        ess_threshold,
        jitter_scale,
        model,
        rng,
    )
}

/// Log-density of a diagonal multivariate normal evaluated at the residual
/// `observed − predicted`: `−½ Σ_i [Δ_i²/σ̄_i² + ln(2π σ̄_i²)]`.
pub fn log_gaussian_likelihood(
    observed: &StateVector,
    predicted: &StateVector,
    variance: &[f64],
) -> f64 {
    debug_assert_eq!(observed.len(), variance.len());
    debug_assert_eq!(predicted.len(), variance.len());
    let mut acc = 0.0;
    for (i, &var) in variance.iter().enumerate() {
        let delta = observed[i] - predicted[i];
        acc += delta * delta / var + (std::f64::consts::TAU * var).ln();
    }
    -0.5 * acc
}

/// Linear-space density; prefer the log form inside weight updates.
pub fn gaussian_likelihood(
    observed: &StateVector,
    predicted: &StateVector,
    variance: &[f64],
) -> f64 {
    log_gaussian_likelihood(observed, predicted, variance).exp()
}

/// Bayes update from one observed transition: each particle predicts
/// `step(x_prev, u_prev, θ_n, dt)`, its weight is multiplied by the
/// Gaussian likelihood of the actual observation, and the set is
/// renormalized. Diverged predictions get likelihood zero. Errors with
/// [`BeliefError::AllZeroLikelihood`] (belief unchanged at the caller) if
/// no particle retains posterior mass.
pub fn update_belief(
    belief: &ParameterBelief,
    model: &dyn DynamicsModel,
    x_prev: &StateVector,
    u_prev: &ControlVector,
    x_observed: &StateVector,
    dt: f64,
) -> Result<ParameterBelief, BeliefError> {
    let log_posterior: Vec<f64> = belief
        .particles
        .iter()
        .zip(&belief.weights)
        .map(|(theta, &w)| {
            let log_lik = match model.step(x_prev, u_prev, theta, dt) {
                Ok(predicted) => {
                    log_gaussian_likelihood(x_observed, &predicted, &belief.likelihood_variance)
                }
                Err(_) => f64::NEG_INFINITY,
            };
            w.ln() + log_lik
        })
        .collect();
    let max = log_posterior.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(BeliefError::AllZeroLikelihood);
    }
    let unnormalized: Vec<f64> = log_posterior.iter().map(|lp| (lp - max).exp()).collect();
    let total: f64 = unnormalized.iter().sum();
    let weights = unnormalized.into_iter().map(|w| w / total).collect();
    Ok(ParameterBelief {
        particles: belief.particles.clone(),
        weights,
        likelihood_variance: belief.likelihood_variance.clone(),
        ess_threshold: belief.ess_threshold,
        jitter_scale: belief.jitter_scale,
    })
}

/// `1 / Σ w_i²`, the equivalent number of equally-weighted particles.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// `Σ_n p(θ_n) · θ_n` per dimension.
pub fn weighted_mean(belief: &ParameterBelief) -> ParameterVector {
    let dim = belief.particles[0].len();
    let mut mean = ParameterVector::zeros(dim);
    for (theta, &w) in belief.particles.iter().zip(&belief.weights) {
        mean.axpy(w, theta, 1.0);
    }
    mean
}

/// If the ESS has fallen below the threshold, redraw every particle from a
/// Gaussian centered at the weighted mean with per-dimension standard
/// deviation `jitter_scale × weighted std`, floored at
/// `10⁻⁴·|mean| + 10⁻⁶` so a fully collapsed belief still spreads, then
/// reset the weights to 1/N. Otherwise the belief is returned unchanged.
/// The flag reports whether resampling happened.
pub fn maybe_resample(
    belief: &ParameterBelief,
    model: &dyn DynamicsModel,
    rng: &mut ChaCha8Rng,
) -> (ParameterBelief, bool) {
    if belief.ess() >= belief.ess_threshold {
        return (belief.clone(), false);
    }
    let mean = belief.weighted_mean();
    let std = belief.weighted_std();
    let dim = mean.len();
    let n = belief.particles.len();
    let particles = (0..n)
        .map(|_| {
            let mut theta = ParameterVector::zeros(dim);
            for d in 0..dim {
                let floor = 1e-4 * mean[d].abs() + 1e-6;
                let spread = (belief.jitter_scale * std[d]).max(floor);
                let z: f64 = StandardNormal.sample(rng);
                theta[d] = mean[d] + spread * z;
            }
            model.clamp_params(&mut theta);
            theta
        })
        .collect();
    (
        ParameterBelief {
            particles,
            weights: vec![1.0 / n as f64; n],
            likelihood_variance: belief.likelihood_variance.clone(),
            ess_threshold: belief.ess_threshold,
            jitter_scale: belief.jitter_scale,
        },
        true,
    )
}
