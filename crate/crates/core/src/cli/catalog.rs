//! Versioned manifests compiled into the binary.

use thiserror::Error;

use super::manifest::{parse_manifest, Manifest, ManifestError};
use super::report::RunReport;
use super::runner::{run, RunOptions};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownExample(String),
    #[error("catalog entry `{id}` is invalid: {source}")]
    Invalid {
        id: String,
        #[source]
        source: ManifestError,
    },
}

macro_rules! entries {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../../catalog/", $id, ".toml")))),*]
    };
}

static CATALOG: &[(&str, &str)] = entries![
    "euclidean3",
    "polar_plane",
    "sphere2",
    "hyperbolic_plane",
    "polar_perturbed",
    "example1",
    "example2",
    "example2_nonconstant",
    "example2_verbatim",
    "example3",
    "example4",
    "example4_nonconstant",
    "example5",
    "example5_verbatim",
    "example6",
    "example7",
    "example8",
    "block_sphere",
    "block_hyperbolic",
    "block_tilde_warp",
    "pointlike_spacetime",
    "pointlike_spacetime_n4",
    "schwarzschild_wormhole",
    "schwarzschild_wormhole_alt",
    "throat_wormhole",
    "cone",
    "graphene_wormhole",
    "m_pndp",
];

/// Catalog ids in listing order.
pub fn catalog_ids() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(id, _)| *id)
}

/// Raw TOML of an entry.
pub fn catalog_source(id: &str) -> Result<&'static str, CatalogError> {
    CATALOG
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| *text)
        .ok_or_else(|| CatalogError::UnknownExample(id.to_string()))
}

pub fn catalog_manifest(id: &str) -> Result<Manifest, CatalogError> {
    let text = catalog_source(id)?;
    parse_manifest(text).map_err(|source| CatalogError::Invalid { id: id.to_string(), source })
}

pub fn run_catalog(id: &str, opts: &RunOptions) -> Result<RunReport, CatalogError> {
    Ok(run(&catalog_manifest(id)?, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_match_manifest_ids() {
        for id in catalog_ids() {
            let m = catalog_manifest(id).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(m.id, id);
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(catalog_source("nope"), Err(CatalogError::UnknownExample(_))));
    }
}
