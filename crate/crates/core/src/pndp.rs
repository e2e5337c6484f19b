//! Dimension bookkeeping, definition checklist and classification of
//! warped products with a derived fiber.

use std::fmt;

use serde::Serialize;

use crate::chartgeo::riemann;
use crate::einstein::{infer_lambda, EinsteinReport, LambdaEstimate, SamplingOptions};
use crate::error::{ClassifyError, EinsteinError};
use crate::symexpr::Expr;
use crate::warpfac::WarpedSpec;

/// Agreement required between the shared λ and a factor's λ.
pub const LAMBDA_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypeTag {
    /// Total virtual dimension zero.
    TypeI,
    /// Total virtual dimension positive.
    TypeII,
    NegativeVirtual,
}

impl TypeTag {
    pub fn from_virtual_total(v: i64) -> TypeTag {
        match v.signum() {
            0 => TypeTag::TypeI,
            1 => TypeTag::TypeII,
            _ => TypeTag::NegativeVirtual,
        }
    }
}

/// Where the projection `π_(n−d)` lands. Descriptors only; no map is built.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectionTarget {
    /// The Einstein factor `B̃`, by its coordinates.
    EinsteinFactor { coords: Vec<String>, dim: usize, lambda: f64, flat: bool },
    Point,
    /// `Σ^order(p)` with `order < 0`.
    Desuspension { order: i64 },
}

impl fmt::Display for ProjectionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionTarget::EinsteinFactor { coords, dim, flat: true, .. } => {
                write!(f, "R^{dim} ({})", coords.join(","))
            }
            ProjectionTarget::EinsteinFactor { coords, lambda, .. } => {
                write!(f, "Einstein factor ({}) with lambda {lambda}", coords.join(","))
            }
            ProjectionTarget::Point => f.write_str("point"),
            ProjectionTarget::Desuspension { order } => write!(f, "Sigma^{order}(p)"),
        }
    }
}

/// The identifying quadruple `(π_(n−d), λ, (n, m), g)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identification {
    pub projection_order: i64,
    pub lambda: f64,
    pub dims: (usize, i64),
    /// Coordinates of the assembled metric, `B'`, `B̃`, then fiber.
    pub metric_coords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PndpDescriptor {
    pub n: usize,
    pub n_prime: usize,
    pub n_tilde: usize,
    pub d: usize,
    pub m: i64,
    pub lambda: f64,
    pub virtual_total: i64,
    pub type_tag: TypeTag,
    pub projection_target: ProjectionTarget,
    pub identification: Identification,
}

impl PndpDescriptor {
    /// `(n−d)-PNDP`, e.g. `(4-2)-PNDP`.
    pub fn label(&self) -> String {
        format!("({}-{})-PNDP", self.n, self.d)
    }
}

/// Classifies a spec whose PNDP system check passed.
pub fn classify(spec: &WarpedSpec, report: &EinsteinReport) -> Result<PndpDescriptor, ClassifyError> {
    if !report.system.starts_with("pndp") {
        return Err(ClassifyError::NotValidated(format!(
            "report is for the `{}` system",
            report.system
        )));
    }
    if !report.einstein {
        let failed: Vec<&str> = report
            .equations
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.name.as_str())
            .collect();
        return Err(ClassifyError::NotValidated(format!("failed: {}", failed.join(", "))));
    }
    let (n, d) = (spec.n(), spec.d());
    let m = spec.fiber().virtual_dim();
    let virtual_total = n as i64 + m;
    let excess = n as i64 - d as i64;
    let type_tag = TypeTag::from_virtual_total(virtual_total);
    let projection_target = match excess.signum() {
        1 => {
            if spec.n_tilde() as i64 != excess {
                return Err(ClassifyError::DimensionMismatch { tilde: spec.n_tilde(), excess });
            }
            ProjectionTarget::EinsteinFactor {
                coords: spec.base_tilde().coords().to_vec(),
                dim: spec.n_tilde(),
                lambda: report.lambda,
                flat: riemann(spec.base_tilde()).iter().flatten().flatten().flatten().all(Expr::is_zero),
            }
        }
        0 => ProjectionTarget::Point,
        _ => ProjectionTarget::Desuspension { order: excess },
    };
    let metric_coords = spec.chart().map(|c| c.coords().to_vec()).unwrap_or_default();
    Ok(PndpDescriptor {
        n,
        n_prime: spec.n_prime(),
        n_tilde: spec.n_tilde(),
        d,
        m,
        lambda: report.lambda,
        virtual_total,
        type_tag,
        projection_target,
        identification: Identification {
            projection_order: excess,
            lambda: report.lambda,
            dims: (n, m),
            metric_coords,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecklistItem {
    pub key: char,
    pub description: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Definition4Checklist {
    pub items: Vec<ChecklistItem>,
    /// `n − d > 0` with `B'` Einstein for the same λ, so `B'` may be
    /// identified with `B̃`.
    pub special_case: bool,
}

impl Definition4Checklist {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, key: char) -> Option<&ChecklistItem> {
        self.items.iter().find(|i| i.key == key)
    }
}

fn lambda_matches(est: LambdaEstimate, lambda: f64) -> bool {
    matches!(est, LambdaEstimate::Einstein(v) if (v - lambda).abs() <= LAMBDA_MATCH_TOL * (1.0 + lambda.abs()))
}

fn describe(est: &Result<LambdaEstimate, EinsteinError>) -> String {
    match est {
        Ok(LambdaEstimate::Einstein(v)) => format!("lambda = {v}"),
        Ok(LambdaEstimate::NotEinstein) => "not Einstein".into(),
        Err(e) => e.to_string(),
    }
}

/// Itemized structural checks:
///
/// - (a) `B̃` is Einstein with the shared λ
/// - (b) `f = f' + f̃` with each part on its own factor
/// - (c) fiber metric `−δ` and `rank(E) = 2d`
/// - (d) `n − d > 0` implies `n' = d`
///
/// plus the special-case flag.
pub fn validate_definition4(spec: &WarpedSpec, lambda: f64, opts: &SamplingOptions) -> Definition4Checklist {
    let tilde = infer_lambda(spec.base_tilde(), opts);
    let a = matches!(tilde, Ok(est) if lambda_matches(est, lambda));

    let prime_ok = spec
        .f_prime()
        .free_symbols()
        .iter()
        .all(|s| spec.base_prime().chart().knows(s));
    let tilde_ok = spec
        .f_tilde()
        .free_symbols()
        .iter()
        .all(|s| spec.base_tilde().chart().knows(s));

    let fib = spec.fiber();
    let c = fib.sign() == -1 && fib.is_special();

    let excess = spec.n() as i64 - spec.d() as i64;
    let d_ok = excess <= 0 || spec.n_prime() == spec.d();

    let prime = infer_lambda(spec.base_prime(), opts);
    let special_case = excess > 0 && matches!(prime, Ok(est) if lambda_matches(est, lambda));

    Definition4Checklist {
        items: vec![
            ChecklistItem {
                key: 'a',
                description: "Einstein factor has the shared lambda",
                pass: a,
                detail: format!("{} (shared lambda = {lambda})", describe(&tilde)),
            },
            ChecklistItem {
                key: 'b',
                description: "warping function splits as f' + f~",
                pass: prime_ok && tilde_ok,
                detail: format!("f' = {}, f~ = {}", spec.f_prime(), spec.f_tilde()),
            },
            ChecklistItem {
                key: 'c',
                description: "fiber metric is -delta with rank(E) = 2d",
                pass: c,
                detail: format!(
                    "sign = {}, d = {}, rank(E) = {}, m = {}",
                    fib.sign(),
                    fib.underlying_dim(),
                    fib.obstruction_rank(),
                    fib.virtual_dim()
                ),
            },
            ChecklistItem {
                key: 'd',
                description: "n - d > 0 requires n' = d",
                pass: d_ok,
                detail: format!("n - d = {excess}, n' = {}, d = {}", spec.n_prime(), spec.d()),
            },
        ],
        special_case,
    }
}

/// A formal dimension under suspension (`+1`) and desuspension (`−1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SuspensionDim(pub i64);

impl SuspensionDim {
    /// Applies `k` suspensions; negative `k` desuspends.
    pub fn suspend(self, k: i64) -> SuspensionDim {
        SuspensionDim(self.0 + k)
    }

    pub fn desuspend(self) -> SuspensionDim {
        self.suspend(-1)
    }
}

pub fn suspend(dim: SuspensionDim, k: i64) -> SuspensionDim {
    dim.suspend(k)
}

/// `dim E* = dim M* − dim F*`.
pub fn inverse_bundle_dim(total: i64, fiber: i64) -> i64 {
    total - fiber
}
