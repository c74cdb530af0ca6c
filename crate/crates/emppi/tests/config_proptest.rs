//! Property tests for the config grammar: prior strings and whole
//! experiment files survive a serialize/parse round trip, and the
//! validator pinpoints the offending field.

use proptest::prelude::*;

use emppi::config::{
    BeliefConfig, ControllerConfig, ExperimentConfig, PriorSpec, Smoothing, TaskConfig,
    TruthConfig, WeightsMode,
};

fn finite() -> impl Strategy<Value = f64> {
    // Keep well inside f64 range so shortest-form printing stays exact and
    // TOML readers elsewhere have no excuse either.
    prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        prop_oneof![Just(0.0), Just(-0.0), Just(1.0), Just(0.1)],
    ]
}

fn prior() -> impl Strategy<Value = PriorSpec> {
    prop_oneof![
        (finite(), 1e-9..1e6f64).prop_map(|(low, width)| PriorSpec::Uniform {
            low,
            high: low + width,
        }),
        (finite(), 1e-9..1e6f64).prop_map(|(mean, variance)| PriorSpec::Normal {
            mean,
            variance
        }),
        (0u64..1_000_000, 0.0..=1.0f64)
            .prop_map(|(trials, p)| PriorSpec::Binomial { trials, p }),
        finite().prop_map(|value| PriorSpec::Point { value }),
    ]
}

proptest! {
    #[test]
    fn prior_string_round_trips(p in prior()) {
        let text = p.to_string();
        let back: PriorSpec = text.parse().unwrap();
        prop_assert_eq!(back, p, "via {}", text);
    }

    #[test]
    fn prior_rejects_garbage(s in "[a-z]{1,8}") {
        // Bare words without a call form never parse.
        prop_assert!(s.parse::<PriorSpec>().is_err());
    }
}

fn smoothing() -> impl Strategy<Value = Smoothing> {
    // The validator requires odd windows (a centered moving average).
    prop_oneof![
        Just(Smoothing::Off),
        (0usize..10).prop_map(|w| Smoothing::MovingAverage { window: 2 * w + 1 }),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    // `from_toml_str` validates, so generate configs that pass: dimensions
    // must match the named model and scalar ranges must be legal.
    prop_oneof![Just("pendulum"), Just("cartpole"), Just("pusher")].prop_flat_map(|name| {
        let (n, m, p) = emppi::dynamics::model_dims(name).unwrap();
        let task = (1e-3..0.1f64, 1usize..2000, 0.0..1.0f64, any::<bool>()).prop_map(
            move |(dt, episode_steps, noise, stop)| TaskConfig {
                name: name.to_string(),
                dt,
                episode_steps,
                observation_noise_var: noise,
                stop_on_success: stop,
            },
        );
        let controller = (
            (1usize..100, 1usize..30, 1usize..10, any::<u64>()),
            proptest::collection::vec(1e-6..10.0f64, m),
            1e-3..10.0f64,
            proptest::collection::vec(1e-6..10.0f64, n),
            (1e-3..=1.0f64, smoothing(), any::<bool>(), 0.0..1.0f64),
            proptest::collection::vec(0.1..10.0f64, m),
            prop_oneof![Just(WeightsMode::PerStep), Just(WeightsMode::Trajectory)],
        )
            .prop_map(
                |((horizon, nn, kk, seed), sigma, lambda, lik, (ess, sm, cap, jitter), lim, mode)| {
                    ControllerConfig {
                        horizon,
                        n_particles: nn,
                        n_rollouts: kk,
                        sigma,
                        lambda,
                        likelihood_variance: lik,
                        ess_fraction: ess,
                        smoothing: sm,
                        seed,
                        u_min: lim.iter().map(|v| -v).collect(),
                        u_max: lim,
                        weights_mode: mode,
                        ess_cap_at_n: cap,
                        jitter_scale: jitter,
                    }
                },
            );
        let belief =
            proptest::collection::vec(prior(), p).prop_map(|priors| BeliefConfig { priors });
        let truth =
            proptest::collection::vec(finite(), p).prop_map(|theta| TruthConfig { theta });
        (task, controller, belief, truth).prop_map(|(task, controller, belief, truth)| {
            ExperimentConfig {
                task,
                controller,
                belief,
                truth,
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn experiment_config_round_trips_through_toml(cfg in config()) {
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text)
            .unwrap_or_else(|e| panic!("reparse failed: {e}\n{text}"));
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn validator_names_the_broken_field() {
    let mut cfg = emppi::task::preset("pendulum").unwrap();
    cfg.task.dt = 0.0;
    cfg.controller.lambda = -1.0;
    cfg.controller.sigma = vec![1.0, 1.0]; // pendulum has one input
    let err = cfg.validate().unwrap_err();
    assert!(err.has_field("task.dt"), "{err}");
    assert!(err.has_field("controller.lambda"), "{err}");
    assert!(err.has_field("controller.sigma"), "{err}");
    // All violations are collected in one pass, not just the first.
    assert!(err.violations.len() >= 3);
}

#[test]
fn unknown_fields_are_rejected() {
    let text = emppi::task::preset("pendulum").unwrap().to_toml_string();
    let sneaky = text.replace("[controller]", "[controller]\nunknown_knob = 3\n");
    assert!(ExperimentConfig::from_toml_str(&sneaky).is_err());
}
