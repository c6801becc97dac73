#![allow(dead_code)]

use std::path::PathBuf;

use quasimin::config::RunConfig;

pub const CLASSIFIED: [&str; 12] = [
    "e42-i-analytic",
    "e42-i-wavy",
    "e42-ii-cosh",
    "e42-ii-drift",
    "s42-trig-linear",
    "s42-trig-wave",
    "s42-hyp-quadratic",
    "s42-hyp-exp",
    "s42-curve-timelike-linear",
    "s42-curve-timelike-cos",
    "s42-curve-spacelike-cosh",
    "s42-curve-spacelike-linear",
];

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.json"))
}

pub fn config(name: &str) -> RunConfig {
    RunConfig::from_path(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `n x n` nodes strictly inside the domain.
pub fn interior(cfg: &RunConfig, n: usize) -> Vec<[f64; 2]> {
    let [s0, s1] = cfg.domain.s;
    let [t0, t1] = cfg.domain.t;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let a = (i as f64 + 0.5) / n as f64;
            let b = (j as f64 + 0.5) / n as f64;
            out.push([s0 + a * (s1 - s0), t0 + b * (t1 - t0)]);
        }
    }
    out
}
