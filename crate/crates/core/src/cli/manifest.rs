//! TOML manifests.
//!
//! ```toml
//! id = "example1"
//! version = 1
//! description = "flat (4-2) example"
//! checks = ["pndp", "blocks"]
//! lambda = 0.0            # optional; inferred when absent
//!
//! [[factor]]
//! id = "bp"
//! coords = [["t", -1.0, 1.0], ["x", -1.0, 1.0]]
//! diagonal = ["1", "1"]   # or components = [["1", "0"], ["0", "1"]]
//!
//! [warped]
//! base_prime = ["bp"]
//! base_tilde = ["bt"]
//! f_prime = "1/2"
//! f_tilde = "1/2"
//! fiber = { dim = 2, rank = 4 }
//! ```
//!
//! Expressions use the prefix text form of [`crate::symexpr`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::chartgeo::{Chart, Interval, Metric};
use crate::error::{GeoError, SpacetimeError, WarpError};
use crate::spacetime::{
    graphene_wormhole_metric, pointlike_spacetime, schwarzschild_profile, EmbeddingProfile,
    GrapheneParams, PhiVariant,
};
use crate::symexpr::{Binding, Expr, ParseError};
use crate::warpfac::{product_metric, DerivedFiber, WarpedSpec};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("`{field}`: {source}")]
    Expr {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("`{field}`: {source}")]
    Geo {
        field: String,
        #[source]
        source: GeoError,
    },
    #[error("`{field}`: {source}")]
    Warp {
        field: String,
        #[source]
        source: WarpError,
    },
    #[error("`{field}`: {source}")]
    Spacetime {
        field: String,
        #[source]
        source: SpacetimeError,
    },
    #[error("`{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ManifestError {
    ManifestError::Validation { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Curvature,
    Einstein,
    Blocks,
    Pndp,
    Wormhole,
    Spacetime,
    All,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Curvature => "curvature",
            CheckKind::Einstein => "einstein",
            CheckKind::Blocks => "blocks",
            CheckKind::Pndp => "pndp",
            CheckKind::Wormhole => "wormhole",
            CheckKind::Spacetime => "spacetime",
            CheckKind::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub seed: u64,
    /// Points for residual and λ sampling.
    pub samples: usize,
    /// Points for the block decomposition comparison.
    pub block_samples: usize,
    /// Points for symbolic equivalence checks.
    pub equivalence_samples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { seed: 0, samples: 20, block_samples: 50, equivalence_samples: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    /// Normalized Einstein-system residuals.
    pub residual: f64,
    /// Relative deviation between decomposition blocks and direct Ricci.
    pub block: f64,
    /// Absolute size of mixed Ricci blocks.
    pub mixed: f64,
    /// Symbolic equivalence checks.
    pub equivalence: f64,
    /// Ricci symmetry and first Bianchi identity.
    pub identity: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { residual: 1e-8, block: 1e-7, mixed: 1e-9, equivalence: 1e-9, identity: 1e-9 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    id: String,
    #[serde(default = "one")]
    version: u32,
    #[serde(default)]
    description: String,
    checks: Vec<CheckKind>,
    lambda: Option<f64>,
    #[serde(default)]
    mu: f64,
    expect_lambda: Option<f64>,
    expect_einstein: Option<bool>,
    #[serde(default)]
    sampling: Sampling,
    #[serde(default)]
    tolerance: Tolerance,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default)]
    factor: Vec<RawFactor>,
    metric: Option<RawMetric>,
    warped: Option<RawWarped>,
    wormhole: Option<RawWormhole>,
    spacetime: Option<RawSpacetime>,
    #[serde(default)]
    claims: Claims,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    id: String,
    coords: Vec<(String, f64, f64)>,
    diagonal: Option<Vec<String>>,
    components: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    factors: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWarped {
    #[serde(default)]
    base_prime: Vec<String>,
    #[serde(default)]
    base_tilde: Vec<String>,
    f_prime: String,
    #[serde(default = "zero_text")]
    f_tilde: String,
    fiber: RawFiber,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    dim: usize,
    rank: usize,
    coords: Option<Vec<String>>,
    #[serde(default = "minus_one")]
    sign: i8,
}

fn minus_one() -> i8 {
    -1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWormhole {
    #[serde(default = "custom")]
    profile: String,
    xi: Option<String>,
    phi: Option<String>,
    mass: Option<f64>,
    phi_variant: Option<String>,
    r_domain: Option<(f64, f64)>,
    r0: Option<f64>,
    #[serde(default = "hundred")]
    samples: usize,
    table_steps: Option<usize>,
}

fn custom() -> String {
    "custom".into()
}

fn hundred() -> usize {
    100
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpacetime {
    kind: String,
    n: Option<usize>,
    d: Option<usize>,
    #[serde(default = "zero_text")]
    phi: String,
    #[serde(default = "one_text")]
    f: String,
    b: Option<String>,
    r_domain: Option<(f64, f64)>,
}

fn one_text() -> String {
    "1".into()
}

/// Values printed in the source example, compared against the computed
/// descriptor. Mismatches become findings.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub virtual_total: Option<i64>,
    #[serde(rename = "type")]
    pub type_tag: Option<String>,
    pub target: Option<String>,
    pub target_dim: Option<usize>,
    pub order: Option<i64>,
    pub lambda: Option<f64>,
    /// A printed difference `a - b = c`, checked for internal consistency.
    pub arithmetic: Option<(i64, i64, i64)>,
}

impl Claims {
    pub fn is_empty(&self) -> bool {
        *self == Claims::default()
    }
}

#[derive(Debug, Clone)]
pub struct WormholeSection {
    pub profile: EmbeddingProfile,
    pub r0: f64,
    pub samples: usize,
    /// `Some(variant)` for the Schwarzschild profile.
    pub schwarzschild: Option<PhiVariant>,
    pub table_steps: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum SpacetimeKind {
    Pointlike { n: usize, d: usize },
    Graphene,
}

#[derive(Debug, Clone)]
pub struct SpacetimeSection {
    pub kind: SpacetimeKind,
    pub metric: Metric,
}

/// A parsed, validated manifest.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub id: String,
    pub version: u32,
    pub description: String,
    pub checks: Vec<CheckKind>,
    pub lambda: Option<f64>,
    pub mu: f64,
    pub expect_lambda: Option<f64>,
    pub expect_einstein: Option<bool>,
    pub sampling: Sampling,
    pub tolerance: Tolerance,
    pub params: Binding,
    pub metric: Option<Metric>,
    pub warped: Option<WarpedSpec>,
    pub wormhole: Option<WormholeSection>,
    pub spacetime: Option<SpacetimeSection>,
    pub claims: Claims,
    /// Source text, hashed into the report digest.
    pub source: String,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text)
}

fn expr(field: &str, text: &str) -> Result<Expr, ManifestError> {
    Expr::parse(text).map_err(|source| ManifestError::Expr { field: field.into(), source })
}

fn geo(field: &str) -> impl Fn(GeoError) -> ManifestError + '_ {
    move |source| ManifestError::Geo { field: field.into(), source }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let raw: RawManifest = toml::from_str(text)?;
    if raw.checks.is_empty() {
        return Err(invalid("checks", "at least one check is required"));
    }
    let s = raw.sampling;
    if s.samples == 0 || s.block_samples == 0 || s.equivalence_samples == 0 {
        return Err(invalid("sampling", "sample counts must be positive"));
    }
    let t = raw.tolerance;
    for (name, v) in [
        ("residual", t.residual),
        ("block", t.block),
        ("mixed", t.mixed),
        ("equivalence", t.equivalence),
        ("identity", t.identity),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("tolerance.{name}"), "must be positive"));
        }
    }
    let mut params = Binding::new();
    for (k, v) in &raw.params {
        if !v.is_finite() {
            return Err(invalid(format!("params.{k}"), "must be finite"));
        }
        params.set(k.clone(), *v);
    }

    let mut factors: BTreeMap<&str, Metric> = BTreeMap::new();
    for (i, f) in raw.factor.iter().enumerate() {
        let field = format!("factor[{i}] ({})", f.id);
        if factors.contains_key(f.id.as_str()) {
            return Err(invalid(field, "duplicate factor id"));
        }
        factors.insert(&f.id, build_factor(f, &params, &field)?);
    }
    let lookup = |field: &str, ids: &[String]| -> Result<Vec<Metric>, ManifestError> {
        ids.iter()
            .map(|id| {
                factors
                    .get(id.as_str())
                    .cloned()
                    .ok_or_else(|| invalid(field, format!("unknown factor `{id}`")))
            })
            .collect()
    };
    let product = |field: &str, ids: &[String]| -> Result<Metric, ManifestError> {
        let parts = lookup(field, ids)?;
        if parts.is_empty() {
            let chart = Chart::new(Vec::<(String, Interval)>::new())
                .and_then(|c| c.with_params(params.clone()))
                .map_err(geo(field))?;
            return Metric::new(chart, Vec::new()).map_err(geo(field));
        }
        product_metric(&parts).map_err(geo(field))
    };

    let metric = match &raw.metric {
        Some(m) if m.factors.is_empty() => return Err(invalid("metric.factors", "empty factor list")),
        Some(m) => Some(product("metric.factors", &m.factors)?),
        None => None,
    };

    let warped = match &raw.warped {
        None => None,
        Some(w) => {
            let bp = product("warped.base_prime", &w.base_prime)?;
            let bt = product("warped.base_tilde", &w.base_tilde)?;
            let fib_err = |source| ManifestError::Warp { field: "warped.fiber".into(), source };
            let fiber = match &w.fiber.coords {
                Some(c) => DerivedFiber::new(w.fiber.dim, w.fiber.rank, c.clone()),
                None => crate::warpfac::derived_fiber(w.fiber.dim, w.fiber.rank),
            }
            .and_then(|f| f.with_sign(w.fiber.sign))
            .map_err(fib_err)?;
            let fp = expr("warped.f_prime", &w.f_prime)?;
            let ft = expr("warped.f_tilde", &w.f_tilde)?;
            Some(
                WarpedSpec::new(bp, bt, fiber, fp, ft)
                    .map_err(|source| ManifestError::Warp { field: "warped".into(), source })?,
            )
        }
    };

    let wormhole = raw.wormhole.as_ref().map(|w| build_wormhole(w, &params)).transpose()?;
    let spacetime = raw.spacetime.as_ref().map(|s| build_spacetime(s, &params)).transpose()?;

    for c in &raw.checks {
        let ok = match c {
            CheckKind::Curvature | CheckKind::Einstein => {
                metric.is_some() || warped.is_some() || spacetime.is_some()
            }
            CheckKind::Blocks | CheckKind::Pndp => warped.is_some(),
            CheckKind::Wormhole => wormhole.is_some(),
            CheckKind::Spacetime => spacetime.is_some(),
            CheckKind::All => true,
        };
        if !ok {
            return Err(invalid("checks", format!("`{}` has no section to run on", c.name())));
        }
    }

    Ok(Manifest {
        id: raw.id,
        version: raw.version,
        description: raw.description,
        checks: raw.checks,
        lambda: raw.lambda,
        mu: raw.mu,
        expect_lambda: raw.expect_lambda,
        expect_einstein: raw.expect_einstein,
        sampling: s,
        tolerance: t,
        params,
        metric,
        warped,
        wormhole,
        spacetime,
        claims: raw.claims,
        source: text.to_string(),
    })
}

fn build_factor(f: &RawFactor, params: &Binding, field: &str) -> Result<Metric, ManifestError> {
    let mut coords = Vec::new();
    for (name, lo, hi) in &f.coords {
        coords.push((name.clone(), Interval::new(*lo, *hi).map_err(geo(field))?));
    }
    let chart = Chart::new(coords)
        .and_then(|c| c.with_params(params.clone()))
        .map_err(geo(field))?;
    let n = chart.dim();
    let g = match (&f.diagonal, &f.components) {
        (Some(diag), None) => {
            if diag.len() != n {
                return Err(invalid(field, format!("{} diagonal entries for {n} coordinates", diag.len())));
            }
            let mut g = vec![vec![Expr::zero(); n]; n];
            for (i, e) in diag.iter().enumerate() {
                g[i][i] = expr(&format!("{field}.diagonal[{i}]"), e)?;
            }
            g
        }
        (None, Some(rows)) => rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| expr(&format!("{field}.components[{i}][{j}]"), e))
                    .collect()
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(invalid(field, "exactly one of `diagonal` or `components` is required")),
    };
    Metric::new(chart, g).map_err(geo(field))
}

fn interval(field: &str, r: (f64, f64)) -> Result<Interval, ManifestError> {
    Interval::new(r.0, r.1).map_err(geo(field))
}

fn build_wormhole(w: &RawWormhole, params: &Binding) -> Result<WormholeSection, ManifestError> {
    let st = |source| ManifestError::Spacetime { field: "wormhole".into(), source };
    let (profile, schwarzschild) = match w.profile.as_str() {
        "schwarzschild" => {
            let mass = w.mass.ok_or_else(|| invalid("wormhole.mass", "required for schwarzschild"))?;
            let variant = match w.phi_variant.as_deref().unwrap_or("verbatim") {
                "verbatim" => PhiVariant::Verbatim,
                "alternative" => PhiVariant::Alternative,
                other => return Err(invalid("wormhole.phi_variant", format!("unknown variant `{other}`"))),
            };
            let mut p = schwarzschild_profile(mass, variant).map_err(st)?;
            if let Some(r) = w.r_domain {
                p.r_domain = interval("wormhole.r_domain", r)?;
            }
            (p, Some(variant))
        }
        "custom" => {
            let xi = expr("wormhole.xi", w.xi.as_deref().ok_or_else(|| invalid("wormhole.xi", "required"))?)?;
            let phi = expr("wormhole.phi", w.phi.as_deref().unwrap_or("0"))?;
            let r = w.r_domain.ok_or_else(|| invalid("wormhole.r_domain", "required"))?;
            let p = EmbeddingProfile::new(xi, phi, interval("wormhole.r_domain", r)?, params.clone()).map_err(st)?;
            (p, None)
        }
        other => return Err(invalid("wormhole.profile", format!("unknown profile `{other}`"))),
    };
    let r0 = w
        .r0
        .or(profile.r_throat)
        .ok_or_else(|| invalid("wormhole.r0", "required"))?;
    if w.samples < 10 {
        return Err(invalid("wormhole.samples", "at least 10 samples are required"));
    }
    let profile = profile.with_throat(r0);
    Ok(WormholeSection { profile, r0, samples: w.samples, schwarzschild, table_steps: w.table_steps })
}

fn build_spacetime(s: &RawSpacetime, params: &Binding) -> Result<SpacetimeSection, ManifestError> {
    let st = |source| ManifestError::Spacetime { field: "spacetime".into(), source };
    let phi = expr("spacetime.phi", &s.phi)?;
    let f = expr("spacetime.f", &s.f)?;
    match s.kind.as_str() {
        "pointlike" => {
            let n = s.n.ok_or_else(|| invalid("spacetime.n", "required"))?;
            let d = s.d.unwrap_or(n);
            let metric = pointlike_spacetime(n, d, &phi, &f, params).map_err(st)?;
            Ok(SpacetimeSection { kind: SpacetimeKind::Pointlike { n, d }, metric })
        }
        "graphene" => {
            let b = expr("spacetime.b", s.b.as_deref().ok_or_else(|| invalid("spacetime.b", "required"))?)?;
            let r = s.r_domain.ok_or_else(|| invalid("spacetime.r_domain", "required"))?;
            let p = GrapheneParams { b, phi, f, r_domain: interval("spacetime.r_domain", r)?, params: params.clone() };
            let metric = graphene_wormhole_metric(&p).map_err(st)?;
            Ok(SpacetimeSection { kind: SpacetimeKind::Graphene, metric })
        }
        other => Err(invalid("spacetime.kind", format!("unknown kind `{other}`"))),
    }
}
