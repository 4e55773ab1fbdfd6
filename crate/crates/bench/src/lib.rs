//! Inputs shared by the solver benchmarks.

use laa_core::loads::{scaled, with_model};
use laa_core::{build_network, fixtures, Bases, Branch, Bus, LoadModel, LoadSpec, RadialNetwork};

/// The 33-bus feeder at half load with the residential ZIP set.
pub fn ieee33_zip() -> (RadialNetwork, Vec<LoadSpec>) {
    let (net, loads) = fixtures::ieee33();
    let loads = with_model(&scaled(&loads, 0.5), LoadModel::Zip(fixtures::residential_zip()));
    (net, loads)
}

/// Two-level comb: a trunk of `n / 2` buses with one lateral bus off each.
/// Deterministic, so sizes compare across runs.
pub fn comb(n: usize) -> (RadialNetwork, Vec<LoadSpec>) {
    assert!(n >= 3);
    let trunk = n / 2;
    let mut branches = Vec::with_capacity(n - 1);
    for i in 2..=trunk {
        branches.push(Branch::new(i - 1, i, 0.002, 0.001));
    }
    for (k, i) in (trunk + 1..=n).enumerate() {
        branches.push(Branch::new(1 + k % trunk, i, 0.004, 0.002));
    }
    let net = build_network((1..=n).map(Bus::new).collect(), branches, Bases::new(10.0, 12.66)).unwrap();
    let zip = fixtures::residential_zip();
    let loads = (2..=n)
        .map(|b| LoadSpec::new(b, 0.5 / n as f64, 0.25 / n as f64, LoadModel::Zip(zip)).unwrap())
        .collect();
    (net, loads)
}
