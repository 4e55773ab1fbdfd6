use nalgebra::{DMatrix, DVector};

use super::{check_threshold, devices_for, require_cp, AttackSpec, CriticalAttackResult, CriticalMethod};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::loads::{nodal_demand, to_zp, AttackModel, DeviceSpec, LoadSpec};
use crate::network::RadialNetwork;
use crate::powerflow::{assemble_zp_system, path_drops, OmegaSystem, SolverTag, VoltageSolution};

use super::forward::{solve_zp_under_attack, voltage_under_attack_cp, voltage_under_cp_injection};

/// Numerators closer to zero than this count as "exactly at threshold".
const AT_THRESHOLD: f64 = 1e-12;

/// Critical CP attack at `bus`: the nominal power that brings the LinDistFlow
/// voltage of the attacked bus down to `v_th`,
/// `P = (U_th - V_1^2 + 2 Delta_a) / (-2 (r_aa + (Q_D/P_D) x_aa))`.
///
/// A threshold equal to the baseline voltage (within rounding) yields a zero
/// count rather than an error.
pub fn critical_devices_cp(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    bus: usize,
    device: &DeviceSpec,
    v_th: f64,
    source_v: f64,
) -> Result<CriticalAttackResult> {
    check_threshold(v_th)?;
    require_cp(loads)?;
    device.validate()?;
    if bus < 2 || !net.contains(bus) {
        return Err(Error::UnknownBus(bus));
    }
    let n = net.n_buses();
    let (p, q) = nodal_demand(n, loads, &vec![source_v; n]);
    let delta = path_drops(net, &p, &q)[bus - 1];
    let u_th = v_th * v_th;
    let (r, x) = net.shared_path_impedance(bus, bus)?;
    let ratio = device.q_over_p();

    let numerator = u_th - source_v * source_v + 2.0 * delta;
    let denominator = -2.0 * (r + ratio * x);
    if !(denominator < 0.0) {
        return Err(Error::NonpositiveDenominator(-denominator));
    }
    if numerator > AT_THRESHOLD {
        let u = source_v * source_v - 2.0 * delta;
        return Err(Error::AlreadyViolated {
            bus,
            v: u.max(0.0).sqrt(),
            v_th,
        });
    }
    let p_attack = if numerator.abs() <= AT_THRESHOLD {
        0.0
    } else {
        numerator / denominator
    };
    let q_attack = ratio * p_attack;
    let voltages = voltage_under_cp_injection(
        net,
        loads,
        bus,
        num_complex::Complex64::new(p_attack, q_attack),
        source_v,
    )?;
    Ok(CriticalAttackResult {
        bus,
        device: device.clone(),
        model: AttackModel::ConstantPower,
        method: CriticalMethod::ClosedFormCp,
        p_attack,
        q_attack,
        device_count: devices_for(p_attack, device, &net.bases()),
        voltages,
        threshold: v_th,
    })
}

/// Critical ZIP attack at a leaf bus `a` from a single linear solve.
///
/// With `U_a = V_th^2` fixed, the attack's nominal power `P` takes the place
/// of `U_a` among the unknowns. Row k of the ZP system then reads
///
/// `U_k - sum_{m != a} W'_km U_m + 2 c_k P = W''_k + W'_ka U_th - [k = a] U_th`
///
/// with `c_k = (alpha'_p + gamma'_p U_th) r_ka + (Q_D/P_D)(alpha'_q + gamma'_q U_th) x_ka`
/// collecting the attack demand evaluated at the threshold voltage.
pub fn critical_devices_zip(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    leaf_bus: usize,
    device: &DeviceSpec,
    v_th: f64,
    source_v: f64,
) -> Result<CriticalAttackResult> {
    check_threshold(v_th)?;
    device.validate()?;
    if leaf_bus < 2 || !net.contains(leaf_bus) {
        return Err(Error::UnknownBus(leaf_bus));
    }
    if !net.is_leaf(leaf_bus)? {
        return Err(Error::NotLeaf(leaf_bus));
    }
    let sys = assemble_zp_system(net, loads, source_v)?;
    let dim = sys.dim();
    let a = OmegaSystem::index_of(leaf_bus);
    let u_th = v_th * v_th;
    let zp = to_zp(&device.zip);
    let ratio = device.q_over_p();
    let fp = zp.alpha_p + zp.gamma_p * u_th;
    let fq = zp.alpha_q + zp.gamma_q * u_th;

    let mut m = DMatrix::identity(dim, dim) - &sys.omega_prime;
    let mut rhs: DVector<f64> = sys.omega_dprime.clone();
    for row in 0..dim {
        let (r, x) = net.shared_path_impedance(OmegaSystem::bus_of(row), leaf_bus)?;
        rhs[row] += sys.omega_prime[(row, a)] * u_th;
        m[(row, a)] = 2.0 * (fp * r + ratio * fq * x);
    }
    rhs[a] -= u_th;

    let x = solve_dense(&m, &rhs)?;
    let p_attack = x[a];
    if p_attack < -AT_THRESHOLD {
        return Err(Error::NegativeCriticalPower {
            bus: leaf_bus,
            p: p_attack,
        });
    }
    let p_attack = p_attack.max(0.0);

    let mut u = Vec::with_capacity(dim + 1);
    u.push(source_v * source_v);
    u.extend(x.iter());
    u[leaf_bus - 1] = u_th;
    let mismatch = {
        let mut check = DVector::from_iterator(dim, u[1..].iter().copied());
        check[a] = u_th;
        let s = num_complex::Complex64::new(p_attack, ratio * p_attack);
        let attacked = crate::attack::forward::assemble_zp_injection_system(net, loads, leaf_bus, s, &zp, source_v)?;
        attacked.residual(&check).amax()
    };
    let voltages = VoltageSolution::from_squared(u, SolverTag::ZpClosed, 1, mismatch)?;
    Ok(CriticalAttackResult {
        bus: leaf_bus,
        device: device.clone(),
        model: AttackModel::Zip,
        method: CriticalMethod::ClosedFormZp,
        p_attack,
        q_attack: ratio * p_attack,
        device_count: devices_for(p_attack, device, &net.bases()),
        voltages,
        threshold: v_th,
    })
}

/// Upper bound on device counts tried by [`critical_devices_search`].
const SEARCH_LIMIT: u64 = 1 << 40;

/// Smallest device count whose attack pulls the system-wide minimum voltage
/// to `v_th` or below, found by bisection on the forward solver (CP closed
/// form for [`AttackModel::ConstantPower`], ZP linear solve for
/// [`AttackModel::Zip`]). Applies to any bus, leaf or not.
pub fn critical_devices_search(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    bus: usize,
    device: &DeviceSpec,
    v_th: f64,
    model: AttackModel,
    source_v: f64,
) -> Result<CriticalAttackResult> {
    check_threshold(v_th)?;
    if model == AttackModel::ConstantPower {
        require_cp(loads)?;
    }
    let forward = |count: u64| -> Result<Option<VoltageSolution>> {
        let attack = AttackSpec::new(net, bus, device.clone(), count, model)?;
        let sol = match model {
            AttackModel::ConstantPower => voltage_under_attack_cp(net, loads, &attack, source_v),
            AttackModel::Zip => solve_zp_under_attack(net, loads, &attack, source_v),
        };
        match sol {
            Ok(s) => Ok(Some(s)),
            // A collapsed operating point is past the threshold.
            Err(Error::NegativeSquaredVoltage { .. }) | Err(Error::SingularSystem { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let violates = |sol: &Option<VoltageSolution>| sol.as_ref().is_none_or(|s| s.min().1 <= v_th);

    let baseline = match model {
        AttackModel::ConstantPower => crate::powerflow::solve_ldf_cp(net, loads, source_v)?,
        AttackModel::Zip => crate::powerflow::solve_zp_closed_form(net, loads, source_v)?,
    };
    let (_, v_min) = baseline.min();
    if v_min <= v_th {
        return Err(Error::AlreadyViolated { bus, v: v_min, v_th });
    }

    let mut lo = 0u64; // known safe
    let mut hi = 1u64;
    let mut hi_sol = forward(hi)?;
    while !violates(&hi_sol) {
        lo = hi;
        hi *= 2;
        if hi > SEARCH_LIMIT {
            return Err(Error::SearchExhausted { limit: SEARCH_LIMIT });
        }
        hi_sol = forward(hi)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let sol = forward(mid)?;
        if violates(&sol) {
            hi = mid;
            hi_sol = sol;
        } else {
            lo = mid;
        }
    }
    let voltages = hi_sol.ok_or(Error::NegativeSquaredVoltage { bus, u: 0.0 })?;
    let s = device.nominal_pu(hi, &net.bases());
    Ok(CriticalAttackResult {
        bus,
        device: device.clone(),
        model,
        method: CriticalMethod::Search,
        p_attack: s.re,
        q_attack: s.im,
        device_count: hi,
        voltages,
        threshold: v_th,
    })
}
