use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{critical_devices_cp, critical_devices_search, critical_devices_zip, CriticalAttackResult};
use crate::error::{Error, Result};
use crate::loads::{with_model, AttackModel, DeviceSpec, LoadModel, LoadSpec};
use crate::network::RadialNetwork;

/// One cell of a critical-attack table. Errors are kept per cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub bus: usize,
    pub device: String,
    pub model: AttackModel,
    #[serde(serialize_with = "serialize_outcome")]
    pub outcome: Result<CriticalAttackResult>,
}

fn serialize_outcome<S: Serializer>(v: &Result<CriticalAttackResult>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Ok(r) => r.serialize(s),
        Err(e) => s.serialize_str(&format!("{}: {}", e.kind(), e)),
    }
}

/// Critical device counts for every (bus, device, model) cell, rows ordered
/// bus-major, then device, then model.
///
/// The CP model runs on the loads' nominal values with every load treated as
/// constant power. The ZIP model uses the loads as given, the closed-form
/// leaf solve at leaves and bisection elsewhere. Cells run in parallel.
pub fn sweep_critical(
    net: &RadialNetwork,
    loads: &[LoadSpec],
    buses: &[usize],
    devices: &[DeviceSpec],
    v_th: f64,
    models: &[AttackModel],
    source_v: f64,
) -> Vec<SweepRow> {
    let cp_loads = with_model(loads, LoadModel::ConstantPower);
    let cells: Vec<(usize, &DeviceSpec, AttackModel)> = buses
        .iter()
        .flat_map(|&b| devices.iter().flat_map(move |d| models.iter().map(move |&m| (b, d, m))))
        .collect();
    cells
        .into_par_iter()
        .map(|(bus, device, model)| {
            let outcome = match model {
                AttackModel::ConstantPower => critical_devices_cp(net, &cp_loads, bus, device, v_th, source_v),
                AttackModel::Zip => match net.is_leaf(bus) {
                    Ok(true) => critical_devices_zip(net, loads, bus, device, v_th, source_v),
                    Ok(false) => critical_devices_search(net, loads, bus, device, v_th, model, source_v),
                    Err(e) => Err(e),
                },
            };
            SweepRow {
                bus,
                device: device.name.clone(),
                model,
                outcome,
            }
        })
        .collect()
}

impl SweepRow {
    pub fn count(&self) -> Option<u64> {
        self.outcome.as_ref().ok().map(|r| r.device_count)
    }

    pub fn error(&self) -> Option<&Error> {
        self.outcome.as_ref().err()
    }
}
