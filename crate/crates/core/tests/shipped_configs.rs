use std::path::PathBuf;

use gofi::config::Config;
use gofi::simulator::SimConfig;

fn shipped(name: &str) -> Config {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    Config::load(path).unwrap()
}

#[test]
fn default_file_matches_built_in_defaults() {
    let mut config = shipped("default.toml");
    config.base_dir = Default::default();
    assert_eq!(config, Config::default());
}

#[test]
fn high_rate_file_matches_preset() {
    let config = shipped("high_rate.toml");
    assert_eq!(config.simulation, SimConfig::high_rate());
    let sim = config.batch_simulation(0).unwrap();
    assert_eq!(sim.seed, SimConfig::high_rate().seed);
}
