//! Steady-state voltage solvers for radial feeders.
//!
//! * [`solve_ac_bfs`]: full AC backward/forward sweep, the reference solution.
//! * [`solve_ldf_cp`]: LinDistFlow with constant-power loads.
//! * [`solve_iter_zip`]: fixed-point refresh of voltage-dependent loads around
//!   either the AC sweep or LinDistFlow.
//! * [`solve_zp_closed_form`]: one linear solve of the LinDistFlow equations
//!   with ZP loads.

mod bfs;
mod ldf;
mod omega;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bfs::solve_ac_bfs;
pub use ldf::{solve_iter_zip, solve_ldf_cp};
pub use omega::{assemble_zp_system, solve_zp_closed_form, OmegaSystem, ZpLoad};

pub(crate) use ldf::{path_drops, squared_from_drops};
pub(crate) use omega::solution_from_system as omega_solution;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverTag {
    AcBfs,
    LdfCp,
    IterZip,
    ZpClosed,
}

impl SolverTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::AcBfs => "AC_BFS",
            SolverTag::LdfCp => "LDF_CP",
            SolverTag::IterZip => "ITER_ZIP",
            SolverTag::ZpClosed => "ZP_CLOSED",
        }
    }
}

/// Power-flow engine wrapped by the ZIP fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    AcBfs,
    Ldf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub source_v: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            source_v: 1.0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.source_v > 0.0 && self.source_v.is_finite()) {
            return Err(Error::NonpositiveVoltage(self.source_v));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bus voltage magnitudes. Vectors are indexed by `bus id - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageSolution {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub solver: SolverTag,
    pub iterations: usize,
    pub converged: bool,
    pub max_mismatch: f64,
}

impl VoltageSolution {
    /// Builds a solution from squared magnitudes. Any `u <= 0` is an
    /// infeasible operating point.
    pub(crate) fn from_squared(u: Vec<f64>, solver: SolverTag, iterations: usize, max_mismatch: f64) -> Result<Self> {
        if let Some((i, &bad)) = u.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::NegativeSquaredVoltage { bus: i + 1, u: bad });
        }
        let v = u.iter().map(|x| x.sqrt()).collect();
        Ok(VoltageSolution {
            v,
            u,
            solver,
            iterations,
            converged: true,
            max_mismatch,
        })
    }

    pub(crate) fn from_magnitudes(v: Vec<f64>, solver: SolverTag, iterations: usize, max_mismatch: f64) -> Self {
        let u = v.iter().map(|x| x * x).collect();
        VoltageSolution {
            v,
            u,
            solver,
            iterations,
            converged: true,
            max_mismatch,
        }
    }

    /// Voltage magnitude at `bus` (1-based).
    pub fn voltage(&self, bus: usize) -> f64 {
        self.v[bus - 1]
    }

    /// Lowest voltage and the bus where it occurs.
    pub fn min(&self) -> (usize, f64) {
        self.v.iter().enumerate().fold(
            (1, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i + 1, v) } else { acc },
        )
    }

    /// Largest `|v_i - w_i|`.
    pub fn max_abs_diff(&self, other: &VoltageSolution) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest per-bus relative error in percent, taking `reference` as truth.
    pub fn max_relative_error_pct(&self, reference: &VoltageSolution) -> f64 {
        self.v
            .iter()
            .zip(&reference.v)
            .map(|(v, r)| (r - v).abs() / r * 100.0)
            .fold(0.0, f64::max)
    }
}
