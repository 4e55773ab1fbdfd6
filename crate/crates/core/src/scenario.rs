//! Run configuration shared by the CLI and the tests.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::io::{parse_case, parse_device_catalog, Catalog};
use crate::loads::{scaled, with_model, DeviceSpec, LoadModel, LoadSpec};
use crate::network::RadialNetwork;
use crate::powerflow::{SolverOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Which coefficients an attack device uses for its own voltage dependence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackCoefficients {
    /// The device's catalog entry.
    Device,
    /// The coefficient set of the bus loads.
    Bus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// `None` selects the bundled 33-bus feeder.
    pub case: Option<PathBuf>,
    /// `None` selects the bundled catalog.
    pub catalog: Option<PathBuf>,
    /// Multiplier on the case loads.
    pub scale: f64,
    /// Named ZIP set for the bus loads; `None` means constant power.
    pub zip_set: Option<String>,
    pub v_th: f64,
    pub source_v: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub attack_coefficients: AttackCoefficients,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            case: None,
            catalog: None,
            scale: 0.5,
            zip_set: Some(fixtures::RESIDENTIAL_ZIP.to_string()),
            v_th: 0.95,
            source_v: 1.0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            attack_coefficients: AttackCoefficients::Device,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        if !(self.v_th > 0.5 && self.v_th < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "v_th must lie in (0.5, 1), got {}",
                self.v_th
            )));
        }
        self.solver_options().validate()
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            source_v: self.source_v,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn load(&self) -> Result<Scenario> {
        self.validate()?;
        let (network, nominal) = match &self.case {
            Some(p) => parse_case(p)?,
            None => fixtures::ieee33(),
        };
        let catalog = match &self.catalog {
            Some(p) => parse_device_catalog(p)?,
            None => fixtures::catalog(),
        };
        let model = match &self.zip_set {
            Some(name) => LoadModel::Zip(catalog.require_load_model(name)?),
            None => LoadModel::ConstantPower,
        };
        let nominal = scaled(&nominal, self.scale);
        let loads = with_model(&nominal, model);
        Ok(Scenario {
            config: self.clone(),
            network,
            loads,
            catalog,
        })
    }
}

/// A loaded network, its scaled loads with the configured model, and the catalog.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub network: RadialNetwork,
    pub loads: Vec<LoadSpec>,
    pub catalog: Catalog,
}

impl Scenario {
    /// Catalog device, with its coefficients swapped for the bus set when
    /// configured so.
    pub fn device(&self, name: &str) -> Result<DeviceSpec> {
        let mut d = self.catalog.require_device(name)?.clone();
        if self.config.attack_coefficients == AttackCoefficients::Bus {
            if let Some(LoadModel::Zip(z)) = self.loads.first().map(|l| l.model) {
                d.zip = z;
            } else {
                d.zip = crate::loads::ZipCoefficients::CONSTANT_POWER;
            }
        }
        Ok(d)
    }

    pub fn devices(&self) -> Result<Vec<DeviceSpec>> {
        self.catalog.devices.iter().map(|d| self.device(&d.name)).collect()
    }
}
