//! Load-altering attack analysis on radial distribution feeders.
//!
//! Solvers for bus voltages under constant-power and ZIP loads, a linear
//! closed form for ZP loads, and the critical number of controllable
//! devices an attacker needs to push a bus below a voltage threshold.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod loads;
pub mod network;
pub mod powerflow;
pub mod scenario;

pub use attack::{
    critical_devices_cp, critical_devices_search, critical_devices_zip, sweep_critical, AttackSpec,
    CriticalAttackResult, CriticalMethod, SweepRow,
};
pub use error::{Error, Result};
pub use io::{parse_case, parse_device_catalog, write_case, Catalog};
pub use loads::{AttackModel, DeviceSpec, LoadModel, LoadSpec, ZipCoefficients, ZpCoefficients};
pub use network::{build_network, Bases, Branch, Bus, RadialNetwork};
pub use powerflow::{
    solve_ac_bfs, solve_iter_zip, solve_ldf_cp, solve_zp_closed_form, Engine, SolverOptions, SolverTag, VoltageSolution,
};
pub use scenario::{AttackCoefficients, Scenario, ScenarioConfig};
