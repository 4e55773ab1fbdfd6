use nalgebra::{DMatrix, DVector};

use super::{SolverTag, VoltageSolution};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::loads::{LoadSpec, ZpCoefficients};
use crate::network::RadialNetwork;

/// Entries above this magnitude are unusual for per-unit feeder data.
const LARGE_ENTRY: f64 = 0.5;

/// A load in affine-in-U form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZpLoad {
    pub bus: usize,
    pub p0: f64,
    pub q0: f64,
    pub zp: ZpCoefficients,
}

impl From<&LoadSpec> for ZpLoad {
    fn from(l: &LoadSpec) -> Self {
        ZpLoad {
            bus: l.bus,
            p0: l.p0,
            q0: l.q0,
            zp: l.model.zp_equivalent(),
        }
    }
}

/// The linear LinDistFlow system `U = Omega'' + Omega' U` over buses 2..N.
///
/// Row and column `j` both correspond to bus `j + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSystem {
    /// Coefficients of the squared voltages.
    pub omega_prime: DMatrix<f64>,
    /// Constant column.
    pub omega_dprime: DVector<f64>,
}

impl OmegaSystem {
    pub fn dim(&self) -> usize {
        self.omega_dprime.len()
    }

    pub fn index_of(bus: usize) -> usize {
        bus - 2
    }

    pub fn bus_of(index: usize) -> usize {
        index + 2
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.omega_prime.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `U - Omega'' - Omega' U` for squared voltages of buses 2..N.
    pub fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        u - &self.omega_dprime - &self.omega_prime * u
    }

    /// Solves `(I - Omega') U = Omega''`.
    pub fn solve(&self) -> Result<DVector<f64>> {
        let n = self.dim();
        let a = DMatrix::identity(n, n) - &self.omega_prime;
        solve_dense(&a, &self.omega_dprime)
    }

    /// Adds a ZP load to the system.
    ///
    /// Substituting the load into every path sum gives, for each bus k,
    /// a constant `-2 (r_ka p alpha'_p + x_ka q alpha'_q)` and a coefficient
    /// `-2 (r_ka p gamma'_p + x_ka q gamma'_q)` on `U_a`, where `(r_ka, x_ka)`
    /// is the impedance shared by the root paths of k and a.
    pub(crate) fn add_load(&mut self, net: &RadialNetwork, load: &ZpLoad) -> Result<()> {
        if !net.contains(load.bus) {
            return Err(Error::UnknownBus(load.bus));
        }
        // Demand at the root has no path to drop voltage over.
        if load.bus == 1 {
            return Ok(());
        }
        let col = Self::index_of(load.bus);
        let zp = &load.zp;
        for k in 2..=net.n_buses() {
            let (r, x) = net.shared_path_impedance(k, load.bus)?;
            let row = Self::index_of(k);
            self.omega_dprime[row] += -2.0 * (r * load.p0 * zp.alpha_p + x * load.q0 * zp.alpha_q);
            self.omega_prime[(row, col)] += -2.0 * (r * load.p0 * zp.gamma_p + x * load.q0 * zp.gamma_q);
        }
        Ok(())
    }

    fn warn_if_large(&self) {
        let m = self.max_abs_entry();
        if m > LARGE_ENTRY {
            log::warn!("omega system has an entry of magnitude {m:.3}; check per-unit data");
        }
    }
}

pub(crate) fn assemble_from(
    net: &RadialNetwork,
    loads: impl IntoIterator<Item = ZpLoad>,
    source_v: f64,
) -> Result<OmegaSystem> {
    let n = net.n_buses() - 1;
    let mut sys = OmegaSystem {
        omega_prime: DMatrix::zeros(n, n),
        omega_dprime: DVector::from_element(n, source_v * source_v),
    };
    for load in loads {
        sys.add_load(net, &load)?;
    }
    Ok(sys)
}

/// Assembles the ZP system for the given loads. ZIP loads are reduced to ZP
/// and CP loads enter with `gamma' = 0`.
pub fn assemble_zp_system(net: &RadialNetwork, loads: &[LoadSpec], source_v: f64) -> Result<OmegaSystem> {
    let sys = assemble_from(net, loads.iter().map(ZpLoad::from), source_v)?;
    sys.warn_if_large();
    Ok(sys)
}

pub(crate) fn solution_from_system(sys: &OmegaSystem, source_v: f64) -> Result<VoltageSolution> {
    let u = sys.solve()?;
    let mut full = Vec::with_capacity(u.len() + 1);
    full.push(source_v * source_v);
    full.extend(u.iter());
    let mismatch = sys.residual(&u).amax();
    VoltageSolution::from_squared(full, SolverTag::ZpClosed, 1, mismatch)
}

/// One-shot voltages from `(I - Omega') U = Omega''`.
pub fn solve_zp_closed_form(net: &RadialNetwork, loads: &[LoadSpec], source_v: f64) -> Result<VoltageSolution> {
    if !(source_v > 0.0) {
        return Err(Error::NonpositiveVoltage(source_v));
    }
    let sys = assemble_zp_system(net, loads, source_v)?;
    solution_from_system(&sys, source_v)
}
