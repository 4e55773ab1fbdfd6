//! Case and catalog files.

mod case;
mod catalog;

pub use case::{parse_case, parse_case_str, write_case};
pub use catalog::{parse_device_catalog, parse_device_catalog_str, Catalog, NamedZip};
