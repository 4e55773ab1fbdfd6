//! Load-altering attacks: forward voltage impact and the inverse problem of
//! how many compromised devices breach a voltage threshold.

mod critical;
mod forward;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loads::{AttackModel, DeviceSpec, LoadModel, LoadSpec};
use crate::network::{Bases, RadialNetwork};
use crate::powerflow::VoltageSolution;

pub use critical::{critical_devices_cp, critical_devices_search, critical_devices_zip};
pub use forward::{
    assemble_zp_attack_system, assemble_zp_injection_system, attack_demand_report, solve_zp_under_attack,
    voltage_under_attack_cp, voltage_under_cp_injection, DemandReport,
};
pub use sweep::{sweep_critical, SweepRow};

/// `count` devices of one class switched on at `bus`. The injected demand
/// adds to the bus's existing load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub bus: usize,
    pub device: DeviceSpec,
    pub count: u64,
    pub model: AttackModel,
}

impl AttackSpec {
    pub fn new(net: &RadialNetwork, bus: usize, device: DeviceSpec, count: u64, model: AttackModel) -> Result<Self> {
        let spec = AttackSpec {
            bus,
            device,
            count,
            model,
        };
        spec.validate(net)?;
        Ok(spec)
    }

    pub fn validate(&self, net: &RadialNetwork) -> Result<()> {
        if self.bus < 2 || !net.contains(self.bus) {
            return Err(Error::UnknownBus(self.bus));
        }
        if self.count == 0 {
            return Err(Error::ZeroCount);
        }
        self.device.validate()
    }

    /// The attack as an extra load entry at the attacked bus.
    pub fn injected_load(&self, bases: &Bases) -> LoadSpec {
        let s = self.device.nominal_pu(self.count, bases);
        let model = match self.model {
            AttackModel::ConstantPower => LoadModel::ConstantPower,
            AttackModel::Zip => LoadModel::Zip(self.device.zip),
        };
        LoadSpec {
            bus: self.bus,
            p0: s.re,
            q0: s.im,
            model,
        }
    }
}

/// How a critical attack size was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMethod {
    /// Threshold imposed at the attacked bus of the LinDistFlow/CP equations.
    ClosedFormCp,
    /// Threshold imposed at the attacked leaf of the ZP linear system.
    ClosedFormZp,
    /// Bisection on the device count against the system-wide minimum voltage.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalAttackResult {
    pub bus: usize,
    pub device: DeviceSpec,
    pub model: AttackModel,
    pub method: CriticalMethod,
    /// Critical nominal attack power, p.u.
    pub p_attack: f64,
    pub q_attack: f64,
    /// Smallest whole number of devices whose nominal power reaches `p_attack`.
    pub device_count: u64,
    /// Voltage profile at the critical operating point.
    pub voltages: VoltageSolution,
    pub threshold: f64,
}

impl CriticalAttackResult {
    pub fn p_attack_kw(&self, bases: &Bases) -> f64 {
        bases.pu_to_kw(self.p_attack)
    }

    pub fn q_attack_kvar(&self, bases: &Bases) -> f64 {
        bases.pu_to_kw(self.q_attack)
    }
}

fn check_threshold(v_th: f64) -> Result<()> {
    if v_th > 0.0 && v_th < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "voltage threshold must lie in (0, 1), got {v_th}"
        )))
    }
}

fn require_cp(loads: &[LoadSpec]) -> Result<()> {
    match loads.iter().find(|l| l.model != LoadModel::ConstantPower) {
        Some(l) => Err(Error::ModelMismatch {
            expected: "CP",
            found: l.model.tag(),
            bus: l.bus,
        }),
        None => Ok(()),
    }
}

/// Devices needed to reach a nominal active power of `p_pu`.
fn devices_for(p_pu: f64, device: &DeviceSpec, bases: &Bases) -> u64 {
    (bases.pu_to_kw(p_pu) / device.p_per_device_kw).ceil().max(0.0) as u64
}
