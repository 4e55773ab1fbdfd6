//! Bundled data: the 33-bus feeder and the default device catalog.

use crate::io::{parse_case_str, parse_device_catalog_str, Catalog};
use crate::loads::{LoadSpec, ZipCoefficients};
use crate::network::RadialNetwork;

pub const IEEE33_CASE: &str = include_str!("../data/ieee33bw.case");
pub const DEVICE_CATALOG: &str = include_str!("../data/devices.json");
pub const RESIDENTIAL_ZIP: &str = "residential-type-F";

/// The 33-bus feeder with nominal constant-power loads in per-unit.
pub fn ieee33() -> (RadialNetwork, Vec<LoadSpec>) {
    parse_case_str(IEEE33_CASE, "ieee33bw.case").expect("bundled case parses")
}

pub fn catalog() -> Catalog {
    parse_device_catalog_str(DEVICE_CATALOG, "devices.json").expect("bundled catalog parses")
}

pub fn residential_zip() -> ZipCoefficients {
    catalog()
        .load_model(RESIDENTIAL_ZIP)
        .expect("bundled residential model")
}
