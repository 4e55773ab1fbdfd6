//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use common::checks::{bisect_count, check_all, fixture, TIGHT};
use common::{max_abs, random_feeder, random_zip, zip_loads};
use laa_core::attack::{
    attack_demand_report, critical_devices_cp, critical_devices_zip, solve_zp_under_attack, voltage_under_attack_cp,
    AttackSpec,
};
use laa_core::loads::{to_zp, with_model};
use laa_core::*;

const RANDOM_FEEDERS: u64 = 128;
const ZP_ERROR_MAX_PCT: f64 = 1.5;
const EXACT_TOL: f64 = 1e-8;
const ROUND_TRIP_BAND: f64 = 2e-3;
const V_TH: f64 = 0.95;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<F: FnOnce() -> Outcome>(limit: Duration, f: F) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!(
        "{}; {:.3} s (limit {} s)",
        o.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    o.pass &= took < limit;
    o
}

fn zip_fixture() -> (RadialNetwork, Vec<LoadSpec>) {
    let (net, loads) = fixture();
    (net, zip_loads(&loads, fixtures::residential_zip()))
}

fn approximation_accuracy() -> Outcome {
    timed(Duration::from_secs(1), || {
        let (net, loads) = zip_fixture();
        let ac = solve_ac_bfs(&net, &loads, &SolverOptions::default()).unwrap();
        let zp = solve_zp_closed_form(&net, &loads, 1.0).unwrap();
        let err = zp.max_relative_error_pct(&ac);
        outcome(
            err <= ZP_ERROR_MAX_PCT,
            format!(
                "max relative error {err:.4}% (limit {ZP_ERROR_MAX_PCT}%), AC min {:.4} p.u.",
                ac.min().1
            ),
        )
    })
}

fn beta_free_exactness() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        for seed in 0..RANDOM_FEEDERS {
            let (net, loads) = random_feeder(seed);
            let loads = zip_loads(&loads, random_zip(seed, false));
            let closed = solve_zp_closed_form(&net, &loads, 1.0).unwrap();
            let iter = solve_iter_zip(&net, &loads, &TIGHT, Engine::Ldf).unwrap();
            worst = worst.max(max_abs(&closed.v, &iter.v));
        }
        outcome(
            worst <= EXACT_TOL,
            format!("{RANDOM_FEEDERS} feeders, worst |dV| {worst:.2e}"),
        )
    })
}

fn attack_system_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..RANDOM_FEEDERS {
        let (net, loads) = random_feeder(seed);
        let zip = random_zip(seed, true);
        let zloads = zip_loads(&loads, zip);
        let dev = DeviceSpec::new("d", 5.0, 2.0, random_zip(seed + 1, true)).unwrap();
        for bus in 2..=net.n_buses() {
            let attack = AttackSpec::new(&net, bus, dev.clone(), 4, AttackModel::Zip).unwrap();
            let closed = solve_zp_under_attack(&net, &zloads, &attack, 1.0).unwrap();
            let s = dev.nominal_pu(4, &net.bases());
            let mut all = with_model(&zloads, LoadModel::Zp(to_zp(&zip)));
            all.push(LoadSpec::new(bus, s.re, s.im, LoadModel::Zp(to_zp(&dev.zip))).unwrap());
            let iter = solve_iter_zip(&net, &all, &TIGHT, Engine::Ldf).unwrap();
            worst = worst.max(max_abs(&closed.v, &iter.v));
            cases += 1;
        }
    }
    outcome(worst <= EXACT_TOL, format!("{cases} attacks, worst |dV| {worst:.2e}"))
}

fn round_trip() -> Outcome {
    let (net, loads) = zip_fixture();
    let cp_loads = with_model(&loads, LoadModel::ConstantPower);
    let catalog = fixtures::catalog();
    let mut fails = Vec::new();
    let mut lowest_gap: f64 = 0.0;
    for bus in net.leaves() {
        for dev in &catalog.devices {
            let r = critical_devices_zip(&net, &loads, bus, dev, V_TH, 1.0).unwrap();
            let a = AttackSpec::new(&net, bus, dev.clone(), r.device_count, AttackModel::Zip).unwrap();
            let v = solve_zp_under_attack(&net, &loads, &a, 1.0).unwrap().voltage(bus);
            lowest_gap = lowest_gap.max(V_TH - v);
            if !(V_TH - ROUND_TRIP_BAND..=V_TH).contains(&v) {
                fails.push(format!("zip {bus}/{}: V={v:.6}", dev.name));
            }

            let r = critical_devices_cp(&net, &cp_loads, bus, dev, V_TH, 1.0).unwrap();
            let a = AttackSpec::new(&net, bus, dev.clone(), r.device_count, AttackModel::ConstantPower).unwrap();
            let v = voltage_under_attack_cp(&net, &cp_loads, &a, 1.0).unwrap().voltage(bus);
            let oracle = bisect_count(&net, &cp_loads, bus, dev, V_TH);
            if !(V_TH - ROUND_TRIP_BAND..=V_TH).contains(&v) || r.device_count.abs_diff(oracle) > 1 {
                fails.push(format!(
                    "cp {bus}/{}: V={v:.6} n={} oracle={oracle}",
                    dev.name, r.device_count
                ));
            }
        }
    }
    let detail = if fails.is_empty() {
        format!("all leaves x devices within band, largest undershoot {lowest_gap:.2e}")
    } else {
        fails.join("; ")
    };
    outcome(fails.is_empty(), detail)
}

fn table_two_structure() -> Outcome {
    let (net, loads) = zip_fixture();
    let catalog = fixtures::catalog();
    let buses = [18, 22, 25, 33];
    let models = [AttackModel::ConstantPower, AttackModel::Zip];
    let rows = sweep_critical(&net, &loads, &buses, &catalog.devices, V_TH, &models, 1.0);
    let count = |bus: usize, dev: &str, model: AttackModel| {
        rows.iter()
            .find(|r| r.bus == bus && r.device == dev && r.model == model)
            .and_then(|r| r.count())
    };
    let mut problems = Vec::new();
    let mut table = Vec::new();
    for dev in &catalog.devices {
        for model in models {
            let c: Vec<Option<u64>> = buses.iter().map(|&b| count(b, &dev.name, model)).collect();
            let Some(c) = c.into_iter().collect::<Option<Vec<u64>>>() else {
                problems.push(format!("{}/{}: cell error", dev.name, model.tag()));
                continue;
            };
            table.push(format!("{} {} {:?}", dev.name, model.tag(), c));
            // c is in bus order 18, 22, 25, 33
            if !(c[0] < c[3] && c[3] < c[2] && c[2] < c[1]) {
                problems.push(format!("{}/{}: ordering {c:?}", dev.name, model.tag()));
            }
        }
        for &b in &buses {
            if let (Some(cp), Some(zip)) = (count(b, &dev.name, models[0]), count(b, &dev.name, models[1])) {
                if zip <= cp {
                    problems.push(format!("{}/{b}: zip {zip} <= cp {cp}", dev.name));
                }
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("18 minimal, 18<33<25<22, ZIP>CP in all cells; {}", table.join(", "))
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn table_one_structure() -> Outcome {
    let (net, loads) = zip_fixture();
    let ac = fixtures::catalog().require_device("air-conditioner").unwrap().clone();
    let report = |bus| {
        let a = AttackSpec::new(&net, bus, ac.clone(), 800, AttackModel::Zip).unwrap();
        attack_demand_report(&net, &loads, &a, &SolverOptions::default()).unwrap()
    };
    let (r3, r18) = (report(3), report(18));
    outcome(
        r18.additional_p_kw < r3.additional_p_kw && r18.additional_q_kvar < r3.additional_q_kvar,
        format!(
            "bus 3: {:.2} kW / {:.2} kVAR, bus 18: {:.2} kW / {:.2} kVAR",
            r3.additional_p_kw, r3.additional_q_kvar, r18.additional_p_kw, r18.additional_q_kvar
        ),
    )
}

fn property_suite() -> Outcome {
    timed(Duration::from_secs(30), || {
        let (net, loads) = fixture();
        check_all(&net, &loads, fixtures::residential_zip());
        for seed in 0..RANDOM_FEEDERS {
            let (net, loads) = random_feeder(seed);
            check_all(&net, &loads, random_zip(seed, true));
        }
        outcome(true, format!("fixture + {RANDOM_FEEDERS} random feeders"))
    })
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("approximation accuracy", approximation_accuracy),
        ("beta-free closed form exactness", beta_free_exactness),
        ("attack system equivalence", attack_system_equivalence),
        ("inverse/forward round trip", round_trip),
        ("critical count table structure", table_two_structure),
        ("attack demand ordering", table_one_structure),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
