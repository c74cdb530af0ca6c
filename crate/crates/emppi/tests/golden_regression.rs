//! Frozen-output regression tests. The constants below were produced by
//! the current implementation and pinned; any drift in the controller,
//! belief, RNG streams, or dynamics arithmetic shows up here first.
//!
//! Tolerances are deliberately tight (1e-12 relative) because episodes are
//! deterministic: a failure means the numerics changed, not that a noisy
//! measurement moved.

use emppi::harness::run_episode;
use emppi::harness::run_ablation;
use emppi::task::preset;

/// First forty torques of the pendulum preset under seed 0.
const PENDULUM_SEED0_ACTIONS: [f64; 40] = [
    -1.0121793685092826e0,
    -3.3124967508897947e0,
    1.2627826286631696e0,
    -2.6740435541524272e0,
    -3.6951476519846445e0,
    -1.3857506033513187e0,
    -1.0419284728600100e0,
    -1.8583249889660891e-1,
    -4.5247740943792660e0,
    1.6112127055380951e0,
    1.4697020519693265e0,
    -5.0000000000000000e0,
    -5.0000000000000000e0,
    -3.5891959075419813e0,
    -4.0369437303398312e0,
    8.5089844423084315e-2,
    -2.6949289462501795e0,
    -5.0000000000000000e0,
    -4.7459190941329554e0,
    -1.2161178166674425e-1,
    -4.9122315002034078e0,
    1.5604646240307254e0,
    -2.5065689399158853e0,
    -2.7739114023747575e0,
    -4.7314343330781252e0,
    -3.4310952899902629e0,
    -3.0639843413323149e0,
    -5.0000000000000000e0,
    -4.8219957787647907e0,
    -3.8165395344417212e0,
    -2.4269405490840850e0,
    -4.5776010104578431e0,
    -3.1204034057578536e0,
    -4.0974372068173217e0,
    -6.9495866146699270e-1,
    -4.8929430031277787e0,
    -5.0000000000000000e0,
    -3.6230497681968137e0,
    -5.0000000000000000e0,
    -5.0000000000000000e0,
];

#[test]
fn golden_pendulum_action_trace() {
    let mut cfg = preset("pendulum").unwrap();
    cfg.task.episode_steps = PENDULUM_SEED0_ACTIONS.len();
    let log = run_episode(&cfg, 0).unwrap();
    assert!(log.summary.aborted.is_none());
    assert_eq!(log.records.len(), PENDULUM_SEED0_ACTIONS.len());
    for (r, &want) in log.records.iter().zip(&PENDULUM_SEED0_ACTIONS) {
        let got = r.control[0];
        assert!(
            (got - want).abs() <= 1e-12,
            "step {}: got {got:.17e}, frozen {want:.17e}",
            r.step
        );
    }
}

/// Pendulum preset swept over ensemble size and rollouts-per-particle,
/// 20 shared seeds per cell: (N, K, successes, mean steps to success over
/// successful trials, mean running cost). The pattern this pins down is
/// the point of the sweep: a single particle with a single rollout never
/// succeeds, and both more particles and more rollouts buy success rate
/// and lower cost.
const ABLATION_TRIALS: usize = 20;
const ABLATION_GOLDEN: [(usize, usize, usize, Option<f64>, f64); 8] = [
    (1, 1, 0, None, 4.9872848097726208e4),
    (1, 4, 14, Some(8.1728571428571433e2), 3.2399328749314496e4),
    (5, 1, 15, Some(8.4320000000000005e2), 3.2592462745792862e4),
    (5, 4, 18, Some(6.6627777777777783e2), 2.3901703753684800e4),
    (10, 1, 17, Some(8.1341176470588232e2), 3.2017420722089875e4),
    (10, 4, 18, Some(6.3377777777777783e2), 2.2878398192882210e4),
    (20, 1, 19, Some(7.2442105263157896e2), 2.5772940301447750e4),
    (20, 4, 19, Some(5.9736842105263156e2), 2.0893245039440058e4),
];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn golden_pendulum_ablation_table() {
    let cfg = preset("pendulum").unwrap();
    let table = run_ablation(&cfg, &[1, 5, 10, 20], &[1, 4], ABLATION_TRIALS).unwrap();
    assert_eq!(table.rows.len(), ABLATION_GOLDEN.len());
    for (row, &(n, k, successes, mean_steps, mean_cost)) in
        table.rows.iter().zip(&ABLATION_GOLDEN)
    {
        let cell = format!("cell N={n} K={k}");
        assert_eq!((row.n_particles, row.n_rollouts), (n, k), "{cell}");
        assert_eq!(row.n_trials, ABLATION_TRIALS, "{cell}");
        assert_eq!(row.successes, successes, "{cell}: success count drifted");
        assert!(
            close(row.success_rate, successes as f64 / ABLATION_TRIALS as f64),
            "{cell}: rate inconsistent with count"
        );
        match (row.mean_steps_to_success, mean_steps) {
            (None, None) => {}
            (Some(got), Some(want)) => assert!(
                close(got, want),
                "{cell}: mean steps {got} vs frozen {want}"
            ),
            (got, want) => panic!("{cell}: mean steps {got:?} vs frozen {want:?}"),
        }
        assert!(
            close(row.mean_total_cost, mean_cost),
            "{cell}: mean cost {} vs frozen {mean_cost}",
            row.mean_total_cost
        );
    }
}
