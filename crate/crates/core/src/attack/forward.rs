use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{require_cp, AttackSpec};
use crate::error::{Error, Result};
use crate::loads::{attack_injection, nodal_demand, to_zp, AttackModel, LoadSpec, ZpCoefficients};
use crate::network::RadialNetwork;
use crate::powerflow::{
    assemble_zp_system, path_drops, solve_iter_zip, squared_from_drops, Engine, OmegaSystem, SolverOptions, SolverTag,
    VoltageSolution,
};

fn check_attacked_bus(net: &RadialNetwork, bus: usize) -> Result<()> {
    if bus >= 2 && net.contains(bus) {
        Ok(())
    } else {
        Err(Error::UnknownBus(bus))
    }
}

/// LinDistFlow voltages with CP loads plus a constant extra demand `s` at
/// bus `a`: `U_k = V_1^2 - 2 Delta_k - 2 P r_ka - 2 Q x_ka`, where `Delta_k`
/// is the pre-attack path drop and `(r_ka, x_ka)` the shared impedance.
pub fn voltage_under_cp_injection(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    bus: usize,
    s: Complex64,
    source_v: f64,
) -> Result<VoltageSolution> {
    check_attacked_bus(net, bus)?;
    require_cp(loads)?;
    if !(source_v > 0.0) {
        return Err(Error::NonpositiveVoltage(source_v));
    }
    if let Some(l) = loads.iter().find(|l| !net.contains(l.bus)) {
        return Err(Error::UnknownBus(l.bus));
    }
    let n = net.n_buses();
    let (p, q) = nodal_demand(n, loads, &vec![source_v; n]);
    let mut u = squared_from_drops(&path_drops(net, &p, &q), source_v);
    for (i, uk) in u.iter_mut().enumerate() {
        let (r, x) = net.shared_path_impedance(i + 1, bus)?;
        *uk = *uk - 2.0 * (s.re * r) - 2.0 * (s.im * x);
    }
    VoltageSolution::from_squared(u, SolverTag::LdfCp, 1, 0.0)
}

/// Closed-form CP voltages under `attack` (which must use the CP model).
pub fn voltage_under_attack_cp(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    attack: &AttackSpec,
    source_v: f64,
) -> Result<VoltageSolution> {
    attack.validate(net)?;
    if attack.model != AttackModel::ConstantPower {
        return Err(Error::ModelMismatch {
            expected: "CP",
            found: "ZIP",
            bus: attack.bus,
        });
    }
    let s = attack.device.nominal_pu(attack.count, &net.bases());
    voltage_under_cp_injection(net, loads, attack.bus, s, source_v)
}

/// The ZP system of the base loads plus an extra ZP demand of nominal power
/// `s` at bus `a`.
///
/// The attack adds, in every row i,
/// `-2 sum_{c in D_i and D_a} (P alpha'_p r_c + Q alpha'_q x_c)` to the
/// constant column and the matching gamma' terms to column a.
pub fn assemble_zp_injection_system(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    bus: usize,
    s: Complex64,
    zp: &ZpCoefficients,
    source_v: f64,
) -> Result<OmegaSystem> {
    check_attacked_bus(net, bus)?;
    let mut sys = assemble_zp_system(net, loads, source_v)?;
    let attacked_path = net.path_to(bus)?;
    let col = OmegaSystem::index_of(bus);
    for i in 2..=net.n_buses() {
        let row = OmegaSystem::index_of(i);
        let mut constant = 0.0;
        let mut coefficient = 0.0;
        for &c in net.path_to(i)?.iter().filter(|c| attacked_path.contains(c)) {
            let br = net.upstream_branch(c)?.expect("non-root");
            constant += -2.0 * s.re * zp.alpha_p * br.r - 2.0 * s.im * zp.alpha_q * br.x;
            coefficient += -2.0 * br.r * s.re * zp.gamma_p - 2.0 * br.x * s.im * zp.gamma_q;
        }
        sys.omega_dprime[row] += constant;
        sys.omega_prime[(row, col)] += coefficient;
    }
    Ok(sys)
}

fn attack_zp(attack: &AttackSpec) -> ZpCoefficients {
    match attack.model {
        AttackModel::ConstantPower => ZpCoefficients::CONSTANT_POWER,
        AttackModel::Zip => to_zp(&attack.device.zip),
    }
}

/// ZP system under `attack`; a ZIP attack is reduced to ZP.
pub fn assemble_zp_attack_system(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    attack: &AttackSpec,
    source_v: f64,
) -> Result<OmegaSystem> {
    attack.validate(net)?;
    let s = attack.device.nominal_pu(attack.count, &net.bases());
    assemble_zp_injection_system(net, loads, attack.bus, s, &attack_zp(attack), source_v)
}

/// One linear solve of the attacked ZP system.
pub fn solve_zp_under_attack(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    attack: &AttackSpec,
    source_v: f64,
) -> Result<VoltageSolution> {
    let sys = assemble_zp_attack_system(net, loads, attack, source_v)?;
    crate::powerflow::omega_solution(&sys, source_v)
}

/// Extra demand actually drawn by an attack once voltages settle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandReport {
    pub bus: usize,
    pub count: u64,
    pub additional_p_kw: f64,
    pub additional_q_kvar: f64,
    pub attacked_bus_voltage: f64,
    pub solution: VoltageSolution,
}

/// Solves the attacked network with the AC engine (loads refreshed at each
/// step) and evaluates the attack demand at the attacked bus's voltage.
pub fn attack_demand_report(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    attack: &AttackSpec,
    opts: &SolverOptions,
) -> Result<DemandReport> {
    attack.validate(net)?;
    let bases = net.bases();
    let mut all = loads.to_vec();
    all.push(attack.injected_load(&bases));
    let solution = solve_iter_zip(net, &all, opts, Engine::AcBfs)?;
    let v = solution.voltage(attack.bus);
    let s = attack_injection(&attack.device, attack.count, v, attack.model, &bases)?;
    Ok(DemandReport {
        bus: attack.bus,
        count: attack.count,
        additional_p_kw: bases.pu_to_kw(s.re),
        additional_q_kvar: bases.pu_to_kw(s.im),
        attacked_bus_voltage: v,
        solution,
    })
}
