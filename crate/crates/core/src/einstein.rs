//! Einstein-condition checks by sampled residuals.
//!
//! Every equation is written as `expr + λ·lam + μ·mu = 0` and normalized
//! per component by `1 + |λ·lam| + |μ·mu|`, so a residual is absolute near
//! zero and relative where the λ term is large.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::chartgeo::{
    gradient_norm_sq, hessian, laplacian, ricci, scalar_curvature, Chart, Metric,
};
use crate::error::EinsteinError;
use crate::symexpr::{deviation, Binding, EvalError, Expr};
use crate::warpfac::WarpedSpec;

/// Threshold below which a metric component counts as zero when forming
/// `Ric_ij / g_ij`.
pub const PATTERN_EPS: f64 = 1e-12;
/// Agreement required between the ratios, and bound on Ricci components
/// where the metric vanishes.
pub const LAMBDA_AGREEMENT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingOptions {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions { seed: 0, samples: 20, tol: 1e-8 }
    }
}

/// Result of [`infer_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaEstimate {
    Einstein(f64),
    NotEinstein,
}

impl LambdaEstimate {
    pub fn value(self) -> Option<f64> {
        match self {
            LambdaEstimate::Einstein(v) => Some(v),
            LambdaEstimate::NotEinstein => None,
        }
    }
}

impl Serialize for LambdaEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LambdaEstimate::Einstein(v) => s.serialize_f64(*v),
            LambdaEstimate::NotEinstein => s.serialize_str("not Einstein"),
        }
    }
}

/// Estimates λ in `Ric = λg` from `Ric_ij / g_ij` at sampled points.
pub fn infer_lambda(g: &Metric, opts: &SamplingOptions) -> Result<LambdaEstimate, EinsteinError> {
    infer_lambda_with_ricci(g, &ricci(g), opts)
}

/// [`infer_lambda`] with a precomputed Ricci tensor.
pub fn infer_lambda_with_ricci(
    g: &Metric,
    ric: &[Vec<Expr>],
    opts: &SamplingOptions,
) -> Result<LambdaEstimate, EinsteinError> {
    let n = g.geometric_dim();
    if n == 0 {
        return Ok(LambdaEstimate::Einstein(0.0));
    }
    let mut ratios = Vec::new();
    let mut valid = 0;
    for p in g.chart().sample_points(opts.samples.max(1), opts.seed) {
        let vals = (|| -> Result<Vec<(f64, f64)>, EvalError> {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push((g.component(i, j).evaluate(&p)?, ric[i][j].evaluate(&p)?));
                }
            }
            Ok(out)
        })();
        let vals = match vals {
            Ok(v) => v,
            Err(EvalError::Domain(_)) => continue,
            Err(EvalError::UnboundSymbol(s)) => {
                return Err(crate::error::GeoError::UnboundSymbol(s).into())
            }
        };
        valid += 1;
        for (gv, rv) in vals {
            if gv.abs() > PATTERN_EPS {
                ratios.push(rv / gv);
            } else if rv.abs() > LAMBDA_AGREEMENT {
                return Ok(LambdaEstimate::NotEinstein);
            }
        }
    }
    if valid == 0 {
        return Err(EinsteinError::NoValidSamples);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if ratios.iter().all(|r| (r - mean).abs() <= LAMBDA_AGREEMENT * (1.0 + mean.abs())) {
        // snap round-off so that flat metrics report exactly zero
        let snapped = if mean.abs() < 1e-12 { 0.0 } else { mean };
        Ok(LambdaEstimate::Einstein(snapped))
    } else {
        Ok(LambdaEstimate::NotEinstein)
    }
}

/// Residual statistics of one equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationResidual {
    pub name: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinReport {
    pub system: String,
    pub lambda: f64,
    pub mu: f64,
    pub lambda_estimate: Option<LambdaEstimate>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub equations: Vec<EquationResidual>,
    pub einstein: bool,
}

impl EinsteinReport {
    pub fn equation(&self, name: &str) -> Option<&EquationResidual> {
        self.equations.iter().find(|e| e.name == name)
    }
}

/// One scalar residual `expr + λ·lam + μ·mu`.
#[derive(Debug, Clone)]
struct Term {
    expr: Expr,
    lam: Expr,
    mu: Expr,
}

impl Term {
    fn new(expr: Expr, lam: Expr) -> Term {
        Term { expr, lam, mu: Expr::zero() }
    }

    fn with_mu(mut self, mu: Expr) -> Term {
        self.mu = mu;
        self
    }

    fn normalized(&self, p: &Binding, lambda: f64, mu: f64) -> Result<f64, EvalError> {
        let e = self.expr.evaluate(p)?;
        let l = lambda * self.lam.evaluate(p)?;
        let m = mu * self.mu.evaluate(p)?;
        Ok((e + l + m).abs() / (1.0 + l.abs() + m.abs()))
    }
}

struct Equation {
    name: &'static str,
    terms: Vec<Term>,
}

fn sample_equations(
    system: &str,
    equations: &[Equation],
    chart: &Chart,
    lambda: f64,
    mu: f64,
    opts: &SamplingOptions,
) -> Result<EinsteinReport, EinsteinError> {
    let mut max = vec![0.0f64; equations.len()];
    let mut sum = vec![0.0f64; equations.len()];
    let mut valid = 0usize;
    for p in chart.sample_points(opts.samples.max(1), opts.seed) {
        let row = (|| -> Result<Vec<f64>, EvalError> {
            equations
                .iter()
                .map(|eq| {
                    eq.terms
                        .iter()
                        .try_fold(0.0f64, |acc, t| Ok(acc.max(t.normalized(&p, lambda, mu)?)))
                })
                .collect()
        })();
        let row = match row {
            Ok(r) => r,
            Err(EvalError::Domain(_)) => continue,
            Err(EvalError::UnboundSymbol(s)) => {
                return Err(crate::error::GeoError::UnboundSymbol(s).into())
            }
        };
        valid += 1;
        for (k, v) in row.into_iter().enumerate() {
            max[k] = max[k].max(v);
            sum[k] += v;
        }
    }
    if valid == 0 {
        return Err(EinsteinError::NoValidSamples);
    }
    let equations: Vec<EquationResidual> = equations
        .iter()
        .enumerate()
        .map(|(k, eq)| EquationResidual {
            name: eq.name.to_string(),
            max_abs: max[k],
            mean_abs: sum[k] / valid as f64,
            pass: max[k] <= opts.tol,
        })
        .collect();
    let einstein = equations.iter().all(|e| e.pass);
    Ok(EinsteinReport {
        system: system.to_string(),
        lambda,
        mu,
        lambda_estimate: None,
        seed: opts.seed,
        samples: valid,
        tol: opts.tol,
        equations,
        einstein,
    })
}

fn matrix_terms(expr: &[Vec<Expr>], lam: Option<&[Vec<Expr>]>) -> Vec<Term> {
    let mut out = Vec::new();
    for (i, row) in expr.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let lam = lam.map_or_else(Expr::zero, |g| -&g[i][j]);
            out.push(Term::new(e.clone(), lam));
        }
    }
    out
}

/// The general warped-product Einstein system on `B ×_f F`:
///
/// - `ricci_base`: `Ric − (d/f)∇²f = λg`
/// - `ricci_fiber`: `R̈ic = μg̈`
/// - `warp_scalar`: `fΔf + (d−1)|∇f|² + λf² = μ`
pub fn check_system_1(
    spec: &WarpedSpec,
    lambda: f64,
    mu: f64,
    opts: &SamplingOptions,
) -> Result<EinsteinReport, EinsteinError> {
    let d = spec.d();
    if d < 2 {
        return Err(crate::error::WarpError::FiberTooSmall(d).into());
    }
    let base = spec.base()?;
    let fiber = spec.fiber().metric()?;
    let f = spec.f();
    let coef = Expr::int(d as i64) / &f;
    let ric = ricci(&base);
    let hess = hessian(&base, &f)?;
    let lhs: Vec<Vec<Expr>> = ric
        .iter()
        .zip(&hess)
        .map(|(r, h)| r.iter().zip(h).map(|(a, b)| a - &coef * b).collect())
        .collect();
    let fiber_terms = ricci(&fiber)
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            let fiber = &fiber;
            row.iter()
                .enumerate()
                .map(move |(j, e)| Term::new(e.clone(), Expr::zero()).with_mu(-fiber.component(i, j)))
        })
        .collect();
    let scalar = &f * laplacian(&base, &f)?
        + Expr::int(d as i64 - 1) * gradient_norm_sq(&base, &f)?;
    let equations = [
        Equation { name: "ricci_base", terms: matrix_terms(&lhs, Some(base.components())) },
        Equation { name: "ricci_fiber", terms: fiber_terms },
        Equation {
            name: "warp_scalar",
            terms: vec![Term::new(scalar, Expr::powi(f, 2)).with_mu(Expr::int(-1))],
        },
    ];
    sample_equations("general", &equations, &spec.chart()?, lambda, mu, opts)
}

/// Outcome of the contracted-identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub samples_with_d_eq_n: usize,
    pub max_residual: f64,
    pub holds: bool,
    /// With `λ = μ = R_B = 0` the identity forces `|∇f|² = 0`.
    pub flat_forces_constant: bool,
}

/// Residual bound for [`check_contracted_identity`].
pub const IDENTITY_TOL: f64 = 1e-10;

/// Checks that the trace of the base equation,
/// `R_B f − d·Δf = n f λ`, together with the scalar warp equation
/// `fΔf + (d−1)|∇f|² + λf² = μ` implies
/// `|∇f|² + [(λ(d−n) + R_B) / (d(d−1))] f² = μ/(d−1)`.
///
/// `Δf` is eliminated symbolically from the first relation and `μ` from the
/// second; the remaining symbols are sampled with `d ∈ {2..6}`, and every
/// fifth sample sets `n = d`.
pub fn check_contracted_identity(samples: usize, seed: u64) -> IdentityReport {
    let s = Expr::symbol;
    let (rb, f, grad, lam, n, d) = (s("R_B"), s("f"), s("grad2"), s("lambda"), s("n"), s("d"));
    // trace relation solved for Δf
    let lap = &f * (&rb - &n * &lam) / &d;
    // scalar warp equation solved for μ
    let mu = &f * &lap + (&d - 1) * &grad + &lam * Expr::powi(f.clone(), 2);
    let lhs = &grad
        + (&lam * (&d - &n) + &rb) / (&d * (&d - 1)) * Expr::powi(f.clone(), 2);
    let rhs = &mu / (&d - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentityReport {
        samples: 0,
        samples_with_d_eq_n: 0,
        max_residual: 0.0,
        holds: true,
        flat_forces_constant: false,
    };
    for k in 0..samples.max(1) {
        let dv = rng.gen_range(2..=6) as f64;
        let nv = if k % 5 == 0 { dv } else { rng.gen_range(1..=8) as f64 };
        let b = Binding::new()
            .with("d", dv)
            .with("n", nv)
            .with("R_B", rng.gen_range(-5.0..5.0))
            .with("f", rng.gen_range(0.1..3.0))
            .with("grad2", rng.gen_range(0.0..4.0))
            .with("lambda", rng.gen_range(-2.0..2.0));
        let (Ok(a), Ok(c)) = (lhs.evaluate(&b), rhs.evaluate(&b)) else {
            continue;
        };
        out.samples += 1;
        if dv == nv {
            out.samples_with_d_eq_n += 1;
        }
        out.max_residual = out.max_residual.max(deviation(a, c));
    }
    out.holds = out.samples > 0 && out.max_residual < IDENTITY_TOL;

    // λ = μ = R_B = 0: solve the identity for |∇f|²
    let forced = (Expr::zero() - (&lam * (&d - &n) + &rb) / (&d * (&d - 1)) * Expr::powi(f, 2))
        .substitute("lambda", &Expr::zero())
        .substitute("R_B", &Expr::zero())
        .simplify();
    out.flat_forces_constant = forced.is_zero();
    out
}

/// Which form of the PNDP system applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n − d > 0`, which requires `d = n'`.
    PositiveExcess,
    /// `n − d ≤ 0`.
    NonPositiveExcess,
}

/// The PNDP Einstein system for flat fibers:
///
/// - `base_prime_scalar`: `R'f − k·Δ'f' = n' f λ`
/// - `tilde_laplacian`: `Δ̃f̃ = 0`
/// - `tilde_scalar`: `R̃ = λñ`
/// - `fiber_ricci`: `R̈ic = 0`
/// - `warp_scalar`: `fΔ'f' + (k−1)|∇f|² + λf² = 0`
///
/// with `k = d`, or `k = n'` when `n − d > 0`; the two coincide because that
/// regime requires `d = n'`.
pub fn check_pndp_system(
    spec: &WarpedSpec,
    lambda: f64,
    opts: &SamplingOptions,
) -> Result<EinsteinReport, EinsteinError> {
    let (np, nt, d) = (spec.n_prime(), spec.n_tilde(), spec.d());
    let excess = spec.n() as i64 - d as i64;
    let regime = if excess > 0 { Regime::PositiveExcess } else { Regime::NonPositiveExcess };
    if regime == Regime::PositiveExcess && d != np {
        return Err(EinsteinError::RegimeMismatch { excess, d, n_prime: np });
    }
    let k = match regime {
        Regime::PositiveExcess => np as i64,
        Regime::NonPositiveExcess => d as i64,
    };
    let f = spec.f();
    let bp = spec.base_prime();
    let bt = spec.base_tilde();
    let lap_p = laplacian(bp, spec.f_prime())?;
    let grad = gradient_norm_sq(bp, spec.f_prime())? + gradient_norm_sq(bt, spec.f_tilde())?;

    let base_prime_scalar = Term::new(
        scalar_curvature(bp) * &f - Expr::int(k) * &lap_p,
        -(Expr::int(np as i64) * &f),
    );
    let tilde_laplacian = Term::new(laplacian(bt, spec.f_tilde())?, Expr::zero());
    let tilde_scalar = Term::new(scalar_curvature(bt), Expr::int(-(nt as i64)));
    let fiber_ricci = matrix_terms(&ricci(&spec.fiber().metric()?), None);
    let warp_scalar = Term::new(
        &f * &lap_p + Expr::int(k - 1) * grad,
        Expr::powi(f.clone(), 2),
    );
    let equations = [
        Equation { name: "base_prime_scalar", terms: vec![base_prime_scalar] },
        Equation { name: "tilde_laplacian", terms: vec![tilde_laplacian] },
        Equation { name: "tilde_scalar", terms: vec![tilde_scalar] },
        Equation { name: "fiber_ricci", terms: fiber_ricci },
        Equation { name: "warp_scalar", terms: vec![warp_scalar] },
    ];
    let system = match regime {
        Regime::PositiveExcess => "pndp_positive_excess",
        Regime::NonPositiveExcess => "pndp_nonpositive_excess",
    };
    sample_equations(system, &equations, &spec.chart()?, lambda, 0.0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgeo::Interval;
    use crate::warpfac::derived_fiber;

    fn flat(names: &[&str], lo: f64, hi: f64) -> Metric {
        let iv = Interval::new(lo, hi).unwrap();
        let chart = Chart::new(names.iter().map(|n| (*n, iv))).unwrap();
        Metric::diagonal(chart, vec![Expr::one(); names.len()]).unwrap()
    }

    fn sphere() -> Metric {
        let chart = Chart::new([
            ("theta", Interval::new(0.3, 2.8).unwrap()),
            ("phi", Interval::new(0.0, 6.0).unwrap()),
        ])
        .unwrap();
        let s = Expr::sin(Expr::symbol("theta"));
        Metric::diagonal(chart, vec![Expr::one(), Expr::powi(s, 2)]).unwrap()
    }

    #[test]
    fn lambda_of_standard_metrics() {
        let opts = SamplingOptions::default();
        assert_eq!(infer_lambda(&flat(&["x", "y", "z"], -1.0, 1.0), &opts).unwrap(), LambdaEstimate::Einstein(0.0));
        let l = infer_lambda(&sphere(), &opts).unwrap().value().unwrap();
        assert!((l - 1.0).abs() < 1e-7);
        let chart = Chart::new([
            ("r", Interval::new(1.0, 3.0).unwrap()),
            ("theta", Interval::new(0.0, 6.0).unwrap()),
        ])
        .unwrap();
        let r = Expr::symbol("r");
        let g = Metric::diagonal(chart, vec![Expr::one(), Expr::powi(r, 3)]).unwrap();
        assert_eq!(infer_lambda(&g, &opts).unwrap(), LambdaEstimate::NotEinstein);
    }

    #[test]
    fn contracted_identity() {
        let r = check_contracted_identity(200, 0);
        assert!(r.holds, "{r:?}");
        assert_eq!(r.samples, 200);
        assert!(r.samples_with_d_eq_n >= 40);
        assert!(r.flat_forces_constant);
    }

    #[test]
    fn nonconstant_warp_leaves_gradient_residual() {
        let spec = WarpedSpec::new(
            flat(&["y"], 1.0, 2.0),
            flat(&["x", "z"], -1.0, 1.0),
            derived_fiber(3, 6).unwrap(),
            Expr::symbol("y"),
            Expr::zero(),
        )
        .unwrap();
        let rep = check_pndp_system(&spec, 0.0, &SamplingOptions::default()).unwrap();
        let w = rep.equation("warp_scalar").unwrap();
        assert!((w.max_abs - 2.0).abs() < 1e-12 && (w.mean_abs - 2.0).abs() < 1e-12);
        assert!(!rep.einstein);
        let rep = check_system_1(&spec, 0.0, 0.0, &SamplingOptions::default()).unwrap();
        assert!((rep.equation("warp_scalar").unwrap().max_abs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn regime_mismatch() {
        let spec = WarpedSpec::new(
            flat(&["a"], 1.0, 2.0),
            flat(&["b", "c", "e"], 1.0, 2.0),
            derived_fiber(2, 4).unwrap(),
            Expr::one(),
            Expr::zero(),
        )
        .unwrap();
        assert_eq!(
            check_pndp_system(&spec, 0.0, &SamplingOptions::default()).unwrap_err(),
            EinsteinError::RegimeMismatch { excess: 2, d: 2, n_prime: 1 }
        );
    }
}
