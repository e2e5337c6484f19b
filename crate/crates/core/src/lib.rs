//! Verification engine for Einstein warped products whose fibers carry a
//! negative virtual dimension.
//!
//! The layers build on each other:
//!
//! - [`symexpr`]: exact symbolic expressions, differentiation, evaluation
//!   and sampled equivalence.
//! - [`chartgeo`]: charts, metrics and curvature.
//! - [`warpfac`]: product, derived-fiber and warped metrics with the block
//!   Ricci decomposition.
//! - [`einstein`]: Einstein-system residual checks.
//! - [`pndp`]: dimension bookkeeping and classification.
//! - [`spacetime`]: wormhole embeddings and related spacetimes.
//! - [`cli`]: manifests, the built-in catalog and reports.

pub mod chartgeo;
pub mod cli;
pub mod einstein;
pub mod error;
pub mod pndp;
pub mod spacetime;
pub mod symexpr;
pub mod warpfac;

pub use error::{GeoError, SymError};
