use super::bfs::sweep;
use super::{Engine, SolverOptions, SolverTag, VoltageSolution};
use crate::error::{Error, Result};
use crate::loads::{nodal_demand, LoadModel, LoadSpec};
use crate::network::RadialNetwork;

/// Path voltage-drop terms `sum_{i in D_k} (r_i P_i + x_i Q_i)` for every bus,
/// with lossless branch flows aggregated from the nodal demand.
pub(crate) fn path_drops(net: &RadialNetwork, p_bus: &[f64], q_bus: &[f64]) -> Vec<f64> {
    let (fp, fq) = net.branch_flows(p_bus, q_bus);
    (1..=net.n_buses())
        .map(|k| {
            net.path_to(k)
                .expect("valid bus")
                .iter()
                .map(|&i| {
                    let br = net.upstream_branch(i).expect("valid bus").expect("non-root");
                    br.r * fp[i - 1] + br.x * fq[i - 1]
                })
                .sum()
        })
        .collect()
}

pub(crate) fn squared_from_drops(drops: &[f64], source_v: f64) -> Vec<f64> {
    let u1 = source_v * source_v;
    drops.iter().map(|d| u1 - 2.0 * d).collect()
}

fn ldf_squared(net: &RadialNetwork, p_bus: &[f64], q_bus: &[f64], source_v: f64) -> Vec<f64> {
    squared_from_drops(&path_drops(net, p_bus, q_bus), source_v)
}

fn check_buses(net: &RadialNetwork, loads: &[LoadSpec]) -> Result<()> {
    match loads.iter().find(|l| !net.contains(l.bus)) {
        Some(l) => Err(Error::UnknownBus(l.bus)),
        None => Ok(()),
    }
}

/// LinDistFlow with constant-power loads:
/// `U_k = V_1^2 - 2 sum_{i in D_k} (r_i P_i + x_i Q_i)`.
pub fn solve_ldf_cp(net: &RadialNetwork, loads: &[LoadSpec], source_v: f64) -> Result<VoltageSolution> {
    if !(source_v > 0.0) {
        return Err(Error::NonpositiveVoltage(source_v));
    }
    check_buses(net, loads)?;
    if let Some(l) = loads.iter().find(|l| l.model != LoadModel::ConstantPower) {
        return Err(Error::ModelMismatch {
            expected: "CP",
            found: l.model.tag(),
            bus: l.bus,
        });
    }
    let n = net.n_buses();
    let (p, q) = nodal_demand(n, loads, &vec![source_v; n]);
    VoltageSolution::from_squared(ldf_squared(net, &p, &q, source_v), SolverTag::LdfCp, 1, 0.0)
}

/// Fixed-point iteration on voltage-dependent loads: evaluate every load at
/// the current voltages, solve the network with the chosen engine holding
/// that demand fixed, and repeat until the voltage update is below `tol`.
///
/// Works for any mix of load models; CP loads are simply constant.
pub fn solve_iter_zip(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    opts: &SolverOptions,
    engine: Engine,
) -> Result<VoltageSolution> {
    opts.validate()?;
    check_buses(net, loads)?;
    let n = net.n_buses();
    let mut v = vec![opts.source_v; n];
    let mut mismatch = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let (p, q) = nodal_demand(n, loads, &v);
        let next: Vec<f64> = match engine {
            Engine::AcBfs => {
                let (vc, _, _) = sweep(net, opts, |_| (p.clone(), q.clone()))?;
                vc.iter().map(|c| c.norm()).collect()
            }
            Engine::Ldf => {
                let u = ldf_squared(net, &p, &q, opts.source_v);
                if let Some((i, &bad)) = u.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
                    return Err(Error::NegativeSquaredVoltage { bus: i + 1, u: bad });
                }
                u.iter().map(|x| x.sqrt()).collect()
            }
        };
        mismatch = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if mismatch < opts.tol {
            return Ok(VoltageSolution::from_magnitudes(v, SolverTag::IterZip, iter, mismatch));
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        mismatch,
    })
}
