#![allow(dead_code)]

use laa_core::attack::{
    assemble_zp_injection_system, critical_devices_cp, solve_zp_under_attack, voltage_under_attack_cp,
    voltage_under_cp_injection, AttackSpec,
};
use laa_core::loads::to_zp;
use laa_core::powerflow::assemble_zp_system;
use laa_core::*;
use num_complex::Complex64;

use super::zip_loads;

pub const TIGHT: SolverOptions = SolverOptions {
    source_v: 1.0,
    tol: 1e-12,
    max_iter: 500,
};

pub fn fixture() -> (RadialNetwork, Vec<LoadSpec>) {
    let (net, loads) = fixtures::ieee33();
    (net, laa_core::loads::scaled(&loads, 0.5))
}

pub fn device(p_kw: f64, q_kvar: f64, zip: ZipCoefficients) -> DeviceSpec {
    DeviceSpec::new("d", p_kw, q_kvar, zip).unwrap()
}

pub fn check_flat(net: &RadialNetwork) {
    let zero: Vec<LoadSpec> = (2..=net.n_buses())
        .map(|b| LoadSpec::constant_power(b, 0.0, 0.0).unwrap())
        .collect();
    for v in [
        solve_ac_bfs(net, &zero, &TIGHT).unwrap().v,
        solve_ldf_cp(net, &zero, 1.0).unwrap().v,
        solve_iter_zip(net, &zip_loads(&zero, fixtures::residential_zip()), &TIGHT, Engine::Ldf)
            .unwrap()
            .v,
        solve_zp_closed_form(net, &zip_loads(&zero, fixtures::residential_zip()), 1.0)
            .unwrap()
            .v,
    ] {
        assert!(v.iter().all(|&x| x == 1.0), "{v:?}");
    }
}

pub fn check_loss_ordering(net: &RadialNetwork, loads: &[LoadSpec]) {
    let ldf = solve_ldf_cp(net, loads, 1.0).unwrap();
    let ac = solve_ac_bfs(net, loads, &TIGHT).unwrap();
    for (l, a) in ldf.v.iter().zip(&ac.v) {
        assert!(l >= a, "ldf {l} < ac {a}");
    }
}

pub fn check_zip_above_cp(net: &RadialNetwork, loads: &[LoadSpec], zip: ZipCoefficients) {
    let cp_ac = solve_ac_bfs(net, loads, &TIGHT).unwrap();
    let zip_ac = solve_iter_zip(net, &zip_loads(loads, zip), &TIGHT, Engine::AcBfs).unwrap();
    for (z, c) in zip_ac.v.iter().zip(&cp_ac.v) {
        assert!(z + 1e-12 >= *c, "zip {z} < cp {c}");
    }
    let cp_ldf = solve_ldf_cp(net, loads, 1.0).unwrap();
    let zp = solve_zp_closed_form(net, &zip_loads(loads, zip), 1.0).unwrap();
    for (z, c) in zp.v.iter().zip(&cp_ldf.v) {
        assert!(z + 1e-12 >= *c, "zp {z} < ldf {c}");
    }
}

pub fn check_null_attack(net: &RadialNetwork, loads: &[LoadSpec], zip: ZipCoefficients) {
    let base = solve_ldf_cp(net, loads, 1.0).unwrap();
    let zloads = zip_loads(loads, zip);
    let zbase = assemble_zp_system(net, &zloads, 1.0).unwrap();
    for bus in 2..=net.n_buses() {
        let attacked = voltage_under_cp_injection(net, loads, bus, Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(attacked.v, base.v);
        let sys = assemble_zp_injection_system(net, &zloads, bus, Complex64::new(0.0, 0.0), &to_zp(&zip), 1.0).unwrap();
        assert_eq!(sys, zbase);
    }
}

pub fn check_locality(net: &RadialNetwork, loads: &[LoadSpec]) {
    let base = solve_ldf_cp(net, loads, 1.0).unwrap();
    for a in 2..=net.n_buses() {
        let hit = voltage_under_cp_injection(net, loads, a, Complex64::new(0.02, 0.01), 1.0).unwrap();
        let on_path = net.path_to(a).unwrap();
        for k in 1..=net.n_buses() {
            let shares = net.path_to(k).unwrap().iter().any(|b| on_path.contains(b));
            if !shares {
                assert_eq!(
                    hit.u[k - 1].to_bits(),
                    base.u[k - 1].to_bits(),
                    "bus {k} moved by attack at {a}"
                );
            } else if k != 1 {
                assert!(hit.u[k - 1] < base.u[k - 1]);
            }
        }
    }
}

pub fn check_severity(net: &RadialNetwork, loads: &[LoadSpec], zip: ZipCoefficients) {
    let zloads = zip_loads(loads, zip);
    let dev_cp = device(10.0, 5.0, ZipCoefficients::CONSTANT_POWER);
    let dev_zip = device(10.0, 5.0, zip);
    for a in 2..=net.n_buses() {
        let parent = net.parent(a).unwrap().unwrap();
        if parent == 1 {
            continue;
        }
        let at = |bus, model, dev: &DeviceSpec| AttackSpec::new(net, bus, dev.clone(), 2, model).unwrap();
        let deep = voltage_under_attack_cp(net, loads, &at(a, AttackModel::ConstantPower, &dev_cp), 1.0).unwrap();
        let up = voltage_under_attack_cp(net, loads, &at(parent, AttackModel::ConstantPower, &dev_cp), 1.0).unwrap();
        assert!(deep.min().1 <= up.min().1);
        // a ZIP attack load draws less the deeper it sits, so only the
        // attacked bus itself is ordered
        let deep = solve_zp_under_attack(net, &zloads, &at(a, AttackModel::Zip, &dev_zip), 1.0).unwrap();
        let up = solve_zp_under_attack(net, &zloads, &at(parent, AttackModel::Zip, &dev_zip), 1.0).unwrap();
        assert!(
            deep.voltage(a) <= up.voltage(a),
            "bus {a}: {} > {}",
            deep.voltage(a),
            up.voltage(a)
        );
    }
}

pub fn check_model_ordering(net: &RadialNetwork, loads: &[LoadSpec], zip: ZipCoefficients) {
    let zloads = zip_loads(loads, zip);
    for a in 2..=net.n_buses() {
        let cp = AttackSpec::new(net, a, device(10.0, 5.0, zip), 3, AttackModel::ConstantPower).unwrap();
        let zp = AttackSpec::new(net, a, device(10.0, 5.0, zip), 3, AttackModel::Zip).unwrap();
        let v_cp = voltage_under_attack_cp(net, loads, &cp, 1.0).unwrap().voltage(a);
        let v_zip = solve_zp_under_attack(net, &zloads, &zp, 1.0).unwrap().voltage(a);
        assert!(v_zip + 1e-12 >= v_cp, "bus {a}: zip {v_zip} < cp {v_cp}");
    }
}

pub fn check_monotone(net: &RadialNetwork, loads: &[LoadSpec]) {
    let base = solve_ldf_cp(net, loads, 1.0).unwrap();
    for i in 0..loads.len() {
        let mut more = loads.to_vec();
        more[i].p0 += 0.01;
        let v = solve_ldf_cp(net, &more, 1.0).unwrap();
        assert!(v.u.iter().zip(&base.u).all(|(a, b)| a <= b));
    }
}

/// Smallest count whose attack pulls the attacked bus to `v_th` or below.
pub fn bisect_count(net: &RadialNetwork, loads: &[LoadSpec], bus: usize, dev: &DeviceSpec, v_th: f64) -> u64 {
    let violates = |n: u64| {
        let a = AttackSpec::new(net, bus, dev.clone(), n, AttackModel::ConstantPower).unwrap();
        voltage_under_attack_cp(net, loads, &a, 1.0).map_or(true, |s| s.voltage(bus) <= v_th)
    };
    let (mut lo, mut hi) = (0u64, 1u64);
    while !violates(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if violates(mid) {
            hi = mid
        } else {
            lo = mid
        }
    }
    hi
}

pub fn check_critical_cp(net: &RadialNetwork, loads: &[LoadSpec]) {
    let dev = device(1.0, 0.4, ZipCoefficients::CONSTANT_POWER);
    let base = solve_ldf_cp(net, loads, 1.0).unwrap();
    for bus in 2..=net.n_buses() {
        let v_th = base.voltage(bus) - 0.02;
        let res = critical_devices_cp(net, loads, bus, &dev, v_th, 1.0).unwrap();
        let oracle = bisect_count(net, loads, bus, &dev, v_th);
        assert!(
            res.device_count.abs_diff(oracle) <= 1,
            "bus {bus}: {} vs {oracle}",
            res.device_count
        );
        assert!((res.voltages.voltage(bus) - v_th).abs() < 1e-9);
    }
}

/// Every solver and attack invariant on one feeder.
pub fn check_all(net: &RadialNetwork, loads: &[LoadSpec], zip: ZipCoefficients) {
    check_flat(net);
    check_loss_ordering(net, loads);
    check_zip_above_cp(net, loads, zip);
    check_monotone(net, loads);
    check_null_attack(net, loads, zip);
    check_locality(net, loads);
    check_severity(net, loads, zip);
    check_model_ordering(net, loads, zip);
    check_critical_cp(net, loads);
}
