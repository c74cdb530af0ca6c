//! The TOML files shipped under `configs/` must stay structurally identical
//! to the in-code presets that tests and docs rely on.

use std::path::PathBuf;

use emppi::config::ExperimentConfig;
use emppi::task::preset;

fn shipped(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.toml"));
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("loading {path:?}: {e}"))
}

#[test]
fn shipped_configs_match_presets() {
    for name in ["pendulum", "cartpole", "pusher"] {
        let expected = preset(name).unwrap();
        assert_eq!(shipped(name), expected, "configs/{name}.toml drifted");
    }
}

#[test]
fn shipped_configs_validate() {
    for name in ["pendulum", "cartpole", "pusher"] {
        shipped(name).validate().unwrap();
    }
}

#[test]
fn preset_round_trips_through_toml() {
    for name in ["pendulum", "cartpole", "pusher"] {
        let cfg = preset(name).unwrap();
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
