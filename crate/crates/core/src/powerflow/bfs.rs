use num_complex::Complex64;

use super::{SolverOptions, SolverTag, VoltageSolution};
use crate::error::{Error, Result};
use crate::loads::{nodal_demand, LoadSpec};
use crate::network::RadialNetwork;

/// Current-injection backward/forward sweep.
///
/// `demand` maps the current voltage magnitudes to nodal (P, Q) and is called
/// once per sweep, so voltage-dependent loads are refreshed every iteration.
/// Returns complex voltages, iteration count and the last voltage update norm.
pub(crate) fn sweep<F>(net: &RadialNetwork, opts: &SolverOptions, mut demand: F) -> Result<(Vec<Complex64>, usize, f64)>
where
    F: FnMut(&[f64]) -> (Vec<f64>, Vec<f64>),
{
    opts.validate()?;
    let n = net.n_buses();
    let order = net.order();
    let source = Complex64::new(opts.source_v, 0.0);
    let mut v = vec![source; n];
    let mut vm: Vec<f64> = vec![opts.source_v; n];
    let mut current = vec![Complex64::new(0.0, 0.0); n];
    let mut mismatch = f64::INFINITY;

    for iter in 1..=opts.max_iter {
        let (p, q) = demand(&vm);
        for i in 0..n {
            current[i] = (Complex64::new(p[i], q[i]) / v[i]).conj();
        }
        // backward: accumulate branch currents from the leaves
        for &bus in order[1..].iter().rev() {
            let parent = net.parent(bus)?.expect("non-root");
            let c = current[bus - 1];
            current[parent - 1] += c;
        }
        // forward: voltage drops from the source
        mismatch = 0.0;
        for &bus in &order[1..] {
            let br = net.upstream_branch(bus)?.expect("non-root");
            let next = v[br.parent - 1] - Complex64::new(br.r, br.x) * current[bus - 1];
            if !next.re.is_finite() || !next.im.is_finite() || next.norm() < 1e-6 {
                return Err(Error::SingularNetwork(format!("voltage collapse at bus {bus}")));
            }
            mismatch = f64::max(mismatch, (next - v[bus - 1]).norm());
            v[bus - 1] = next;
        }
        for i in 0..n {
            vm[i] = v[i].norm();
        }
        if mismatch < opts.tol {
            return Ok((v, iter, mismatch));
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        mismatch,
    })
}

/// Full AC power flow including line losses. Loads are evaluated under their
/// own models (CP, ZIP or ZP) at the latest voltage estimate on every sweep.
pub fn solve_ac_bfs(net: &RadialNetwork, loads: &[LoadSpec], opts: &SolverOptions) -> Result<VoltageSolution> {
    for l in loads {
        if !net.contains(l.bus) {
            return Err(Error::UnknownBus(l.bus));
        }
    }
    let n = net.n_buses();
    let (v, iterations, mismatch) = sweep(net, opts, |vm| nodal_demand(n, loads, vm))?;
    let vm = v.iter().map(|c| c.norm()).collect();
    Ok(VoltageSolution::from_magnitudes(
        vm,
        SolverTag::AcBfs,
        iterations,
        mismatch,
    ))
}
