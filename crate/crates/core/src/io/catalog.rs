//! Device and load-model catalog (JSON).
//!
//! ```json
//! {
//!   "load_models": [{ "name": "...", "alpha_p": 0.4, "beta_p": 0.3, "gamma_p": 0.3,
//!                     "alpha_q": 0.4, "beta_q": 0.3, "gamma_q": 0.3 }],
//!   "devices": [{ "name": "...", "p_per_device_kw": 1.0, "q_per_device_kvar": 0.2,
//!                 "alpha_p": 1, "beta_p": 0, "gamma_p": 0,
//!                 "alpha_q": 1, "beta_q": 0, "gamma_q": 0 }]
//! }
//! ```
//!
//! Unknown fields such as `note` are ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loads::{DeviceSpec, ZipCoefficients};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedZip {
    pub name: String,
    #[serde(flatten)]
    pub zip: ZipCoefficients,
}

#[derive(Debug, Clone, Deserialize)]
struct DeviceRecord {
    name: String,
    p_per_device_kw: f64,
    q_per_device_kvar: f64,
    #[serde(flatten)]
    zip: ZipCoefficients,
}

#[derive(Debug, Clone, Deserialize)]
struct CatalogFile {
    #[serde(default)]
    load_models: Vec<NamedZip>,
    #[serde(default)]
    devices: Vec<DeviceRecord>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    pub load_models: Vec<NamedZip>,
    pub devices: Vec<DeviceSpec>,
}

impl Catalog {
    pub fn device(&self, name: &str) -> Option<&DeviceSpec> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn load_model(&self, name: &str) -> Option<ZipCoefficients> {
        self.load_models.iter().find(|m| m.name == name).map(|m| m.zip)
    }

    /// Like [`Catalog::device`], as an error when missing.
    pub fn require_device(&self, name: &str) -> Result<&DeviceSpec> {
        self.device(name).ok_or_else(|| Error::UnknownName {
            kind: "device",
            name: name.to_string(),
        })
    }

    pub fn require_load_model(&self, name: &str) -> Result<ZipCoefficients> {
        self.load_model(name).ok_or_else(|| Error::UnknownName {
            kind: "load model",
            name: name.to_string(),
        })
    }
}

pub fn parse_device_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_device_catalog_str(&text, &path.display().to_string())
}

pub fn parse_device_catalog_str(text: &str, origin: &str) -> Result<Catalog> {
    let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::ParseError {
        file: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for m in &file.load_models {
        m.zip.validate().map_err(|e| rename(e, &m.name))?;
    }
    let devices = file
        .devices
        .into_iter()
        .map(|d| {
            let name = d.name.clone();
            DeviceSpec::new(d.name, d.p_per_device_kw, d.q_per_device_kvar, d.zip).map_err(|e| rename(e, &name))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        load_models: file.load_models,
        devices,
    })
}

fn rename(err: Error, name: &str) -> Error {
    match err {
        Error::CoefficientSumError { what, sum } => Error::CoefficientSumError {
            what: format!("{name} {what}"),
            sum,
        },
        other => other,
    }
}
