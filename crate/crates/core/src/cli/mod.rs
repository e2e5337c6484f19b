//! Manifest-driven runs, the built-in catalog and report rendering.

pub mod catalog;
pub mod manifest;
pub mod report;
pub mod runner;

pub use catalog::{catalog_ids, catalog_manifest, catalog_source, run_catalog, CatalogError};
pub use manifest::{load_manifest, parse_manifest, CheckKind, Manifest, ManifestError};
pub use report::{CheckResult, Finding, RunReport};
pub use runner::{planned_checks, run, wormhole_table, RunOptions};
