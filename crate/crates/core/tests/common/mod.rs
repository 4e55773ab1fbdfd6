#![allow(dead_code)]

pub mod checks;

use laa_core::{build_network, Bases, Branch, Bus, LoadModel, LoadSpec, RadialNetwork, ZipCoefficients};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random radial feeder: 2..=20 buses, each bus's parent uniform among the
/// earlier buses, r and x in [0.001, 0.01] p.u., CP loads up to 0.05 p.u.
pub fn random_feeder(seed: u64) -> (RadialNetwork, Vec<LoadSpec>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=20);
    let buses = (1..=n).map(Bus::new).collect();
    let branches = (2..=n)
        .map(|i| {
            Branch::new(
                rng.gen_range(1..i),
                i,
                rng.gen_range(0.001..=0.01),
                rng.gen_range(0.001..=0.01),
            )
        })
        .collect();
    let net = build_network(buses, branches, Bases::new(1.0, 1.0)).unwrap();
    let loads = (2..=n)
        .map(|i| LoadSpec::constant_power(i, rng.gen_range(0.0..=0.05), rng.gen_range(0.0..=0.05)).unwrap())
        .collect();
    (net, loads)
}

/// Random coefficients with every fraction in [0, 1]; `beta` zero when asked.
pub fn random_zip(seed: u64, with_beta: bool) -> ZipCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut triple = || {
        let a: f64 = rng.gen_range(0.0..=1.0);
        let b: f64 = if with_beta { rng.gen_range(0.0..=1.0 - a) } else { 0.0 };
        [a, b, 1.0 - a - b]
    };
    ZipCoefficients::new(triple(), triple()).unwrap()
}

pub fn zip_loads(loads: &[LoadSpec], zip: ZipCoefficients) -> Vec<LoadSpec> {
    laa_core::loads::with_model(loads, LoadModel::Zip(zip))
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
