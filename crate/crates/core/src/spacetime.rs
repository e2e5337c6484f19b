//! Static spacetimes built from a base with a derived fiber: point-like
//! metrics, cylindrical reduction, embedding profiles and the wormhole
//! quantities derived from them.

use std::fmt::Write as _;

use serde::Serialize;

use crate::chartgeo::{Chart, Interval, Metric};
use crate::error::{GeoError, SpacetimeError};
use crate::symexpr::{deviation, Binding, EvalError, Expr};

/// Radial coordinate used by every profile.
pub const R: &str = "r";

fn r() -> Expr {
    Expr::symbol(R)
}

/// Spatial names for a flat `R^n` base: `x, y, z, w` up to four, else
/// `x1..xn`.
fn base_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Fiber names: `psi, varphi, sigma` for three directions, else `v1..vd`.
fn fiber_names(d: usize) -> Vec<String> {
    if d == 3 {
        vec!["psi".into(), "varphi".into(), "sigma".into()]
    } else {
        (1..=d).map(|i| format!("v{i}")).collect()
    }
}

fn check_symbols(e: &Expr, allowed: &[&str], params: &Binding, what: &str) -> Result<(), SpacetimeError> {
    for s in e.free_symbols() {
        if !allowed.contains(&s.as_str()) && !params.contains(&s) {
            return Err(SpacetimeError::InvalidInput(format!("{what} uses unknown symbol `{s}`")));
        }
    }
    Ok(())
}

/// `−e^{2Φ(r)}dt² + Σdxᵢ² − f²Σdψⱼ²` with `n` base and `d` fiber directions.
///
/// `Φ` is a function of `r`, read as the cylindrical radius
/// `r = √(x² + y²)` of the first two base coordinates. The virtual
/// dimension is `n − d` spatial plus one for time.
pub fn pointlike_spacetime(
    n: usize,
    d: usize,
    phi: &Expr,
    f: &Expr,
    params: &Binding,
) -> Result<Metric, SpacetimeError> {
    if n < 2 {
        return Err(SpacetimeError::InvalidInput(format!("base dimension {n} < 2")));
    }
    check_symbols(phi, &[R], params, "Phi")?;
    check_symbols(f, &[], params, "f")?;
    let names = base_names(n);
    let radius = Expr::sqrt(
        Expr::powi(Expr::symbol(&names[0]), 2) + Expr::powi(Expr::symbol(&names[1]), 2),
    );
    let phi = phi.substitute(R, &radius);

    let base_iv = Interval::new(0.5, 2.0)?;
    let mut coords = vec![("t".to_string(), Interval::new(0.0, 1.0)?)];
    coords.extend(names.into_iter().map(|c| (c, base_iv)));
    coords.extend(fiber_names(d).into_iter().map(|c| (c, Interval::new(-1.0, 1.0).unwrap())));
    let chart = Chart::new(coords)?.with_params(params.clone())?;

    let mut diag = vec![-Expr::exp(Expr::int(2) * phi)];
    diag.extend(std::iter::repeat_n(Expr::one(), n));
    diag.extend(std::iter::repeat_n(-Expr::powi(f.clone(), 2), d));
    let virtual_dim = n as i64 - d as i64 + 1;
    Ok(Metric::diagonal(chart, diag)?.with_virtual_dim(virtual_dim)?)
}

/// Embedding `z = ξ(r)` and redshift `Φ(r)` over a radial interval.
#[derive(Debug, Clone)]
pub struct EmbeddingProfile {
    pub xi: Expr,
    pub phi: Expr,
    pub r_throat: Option<f64>,
    pub r_domain: Interval,
    pub params: Binding,
}

impl EmbeddingProfile {
    pub fn new(xi: Expr, phi: Expr, r_domain: Interval, params: Binding) -> Result<EmbeddingProfile, SpacetimeError> {
        check_symbols(&xi, &[R], &params, "xi")?;
        check_symbols(&phi, &[R], &params, "Phi")?;
        Ok(EmbeddingProfile { xi, phi, r_throat: None, r_domain, params })
    }

    pub fn with_throat(mut self, r0: f64) -> EmbeddingProfile {
        self.r_throat = Some(r0);
        self
    }

    pub fn xi_prime(&self) -> Expr {
        self.xi.differentiate(R)
    }

    pub fn xi_second(&self) -> Expr {
        self.xi_prime().differentiate(R)
    }

    pub fn at(&self, r: f64) -> Binding {
        self.params.clone().with(R, r)
    }

    /// Seeded radii strictly inside `r_domain`.
    pub fn sample_radii(&self, count: usize, seed: u64) -> Vec<f64> {
        let chart = Chart::new([(R, self.r_domain)]).expect("single valid interval");
        chart
            .sample_points(count, seed)
            .iter()
            .map(|b| b.get(R).expect("sampled radius"))
            .collect()
    }
}

/// `−e^{2Φ}dt² + (1 + ξ'²)dr² + r²dθ²`.
pub fn cylindrical_reduction(profile: &EmbeddingProfile) -> Result<Metric, SpacetimeError> {
    let xp = profile.xi_prime();
    let chart = Chart::new([
        ("t", Interval::new(0.0, 1.0)?),
        (R, profile.r_domain),
        ("theta", Interval::new(0.0, 6.0)?),
    ])?
    .with_params(profile.params.clone())?;
    let diag = vec![
        -Expr::exp(Expr::int(2) * profile.phi.clone()),
        Expr::one() + Expr::powi(xp, 2),
        Expr::powi(r(), 2),
    ];
    Metric::diagonal(chart, diag).map_err(|e| match e {
        GeoError::Domain(m) => SpacetimeError::Domain(m),
        other => other.into(),
    })
}

/// `b(r) = r ξ'² / (1 + ξ'²)`.
pub fn shape_function(profile: &EmbeddingProfile) -> Expr {
    let x2 = Expr::powi(profile.xi_prime(), 2);
    r() * &x2 / (Expr::one() + x2)
}

/// `ρ = ξ'ξ'' / (r (1 + ξ'²)²)`.
pub fn energy_density(profile: &EmbeddingProfile) -> Expr {
    let xp = profile.xi_prime();
    let xpp = profile.xi_second();
    &xp * xpp / (r() * Expr::powi(Expr::one() + Expr::powi(xp, 2), 2))
}

/// `2rξ'ξ''/(1 + ξ'²)²`, the ξ-form of `b' − b/r`.
pub fn flare_identity_rhs(profile: &EmbeddingProfile) -> Expr {
    let xp = profile.xi_prime();
    let xpp = profile.xi_second();
    Expr::int(2) * r() * &xp * xpp / Expr::powi(Expr::one() + Expr::powi(xp, 2), 2)
}

/// `1/(1 − b/r)`, the Morris–Thorne radial component.
pub fn morris_thorne_grr(profile: &EmbeddingProfile) -> Expr {
    Expr::recip(Expr::one() - shape_function(profile) / r())
}

/// Largest `k` in the throat approach `r0(1 + 2^−k)`.
pub const THROAT_K_MAX: u32 = 20;
pub const THROAT_K_MIN: u32 = 4;
pub const THROAT_TOL: f64 = 1e-4;
/// Tolerance for the sampled identities in the report.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroatVerdict {
    pub r0: f64,
    /// `(k, b(r)/r)` along `r = r0(1 + 2^−k)`.
    pub approach: Vec<(u32, f64)>,
    pub final_deviation: f64,
    pub pass: bool,
    /// `ξ(r0)`, or its value at the last approach point when `ξ` is
    /// undefined at `r0`.
    pub xi_at_throat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WormholeReport {
    pub b: String,
    pub rho: String,
    pub seed: u64,
    pub samples: usize,
    pub throat: ThroatVerdict,
    /// `b' < b/r` at every sampled radius.
    pub flare_b_form: bool,
    /// `ξ'ξ'' < 0` at every sampled radius.
    pub flare_xi_form: bool,
    /// Both forms gave the same sign at every radius.
    pub forms_agree: bool,
    /// Max deviation between `b' − b/r` and its ξ-form.
    pub identity_max_deviation: f64,
    /// Max deviation between `1 + ξ'²` and `1/(1 − b/r)`.
    pub morris_thorne_max_deviation: f64,
    /// `ρ < 0` at every sampled radius.
    pub rho_negative: bool,
    /// `b` when it is constant over the samples.
    pub b_constant: Option<f64>,
}

impl WormholeReport {
    pub fn flare_out_pass(&self) -> bool {
        self.throat.pass && self.flare_b_form && self.flare_xi_form && self.forms_agree
    }
}

fn eval(e: &Expr, b: &Binding) -> Result<f64, SpacetimeError> {
    e.evaluate(b).map_err(|err| match err {
        EvalError::Domain(m) => SpacetimeError::Domain(m),
        EvalError::UnboundSymbol(s) => SpacetimeError::InvalidInput(format!("unbound symbol `{s}`")),
    })
}

/// Throat condition `b(r0) = r0` as a limit from above, and the flare-out
/// condition `b' < b/r` (equivalently `ξ'ξ'' < 0`) at `samples` radii in
/// `r_range`.
pub fn flare_out_check(
    profile: &EmbeddingProfile,
    r0: f64,
    r_range: Interval,
    samples: usize,
    seed: u64,
) -> Result<WormholeReport, SpacetimeError> {
    if !(r0.is_finite() && r0 > 0.0) || r_range.lo < r0 {
        return Err(SpacetimeError::InvalidInput(format!(
            "range [{}, {}] must lie above the throat r0 = {r0}",
            r_range.lo, r_range.hi
        )));
    }
    if samples < 10 {
        return Err(SpacetimeError::InvalidInput(format!("{samples} samples; at least 10 needed")));
    }
    let b = shape_function(profile);
    let bp = b.differentiate(R);
    let rho = energy_density(profile);
    let xp = profile.xi_prime();
    let xpp = profile.xi_second();
    let rhs = flare_identity_rhs(profile);
    let mt_lhs = Expr::one() + Expr::powi(xp.clone(), 2);
    let mt_rhs = morris_thorne_grr(profile);

    let mut approach = Vec::new();
    for k in THROAT_K_MIN..=THROAT_K_MAX {
        let rk = r0 * (1.0 + 2f64.powi(-(k as i32)));
        if let Ok(v) = b.evaluate(&profile.at(rk)) {
            approach.push((k, v / rk));
        }
    }
    let Some(&(k_last, ratio)) = approach.last() else {
        return Err(SpacetimeError::ThroatUndefined(format!(
            "b(r) is undefined along the approach to r0 = {r0}"
        )));
    };
    let final_deviation = (ratio - 1.0).abs();
    let xi_at_throat = profile.xi.evaluate(&profile.at(r0)).ok().or_else(|| {
        let rk = r0 * (1.0 + 2f64.powi(-(k_last as i32)));
        profile.xi.evaluate(&profile.at(rk)).ok()
    });
    let throat = ThroatVerdict {
        r0,
        approach,
        final_deviation,
        pass: k_last == THROAT_K_MAX && final_deviation < THROAT_TOL,
        xi_at_throat,
    };

    let probe = EmbeddingProfile { r_domain: r_range, ..profile.clone() };
    let mut out = WormholeReport {
        b: b.to_string(),
        rho: rho.to_string(),
        seed,
        samples: 0,
        throat,
        flare_b_form: true,
        flare_xi_form: true,
        forms_agree: true,
        identity_max_deviation: 0.0,
        morris_thorne_max_deviation: 0.0,
        rho_negative: true,
        b_constant: None,
    };
    let mut b_range = (f64::INFINITY, f64::NEG_INFINITY);
    for rv in probe.sample_radii(samples, seed) {
        let at = profile.at(rv);
        let vals = (|| -> Result<[f64; 8], SpacetimeError> {
            Ok([
                eval(&b, &at)?,
                eval(&bp, &at)?,
                eval(&xp, &at)?,
                eval(&xpp, &at)?,
                eval(&rhs, &at)?,
                eval(&rho, &at)?,
                eval(&mt_lhs, &at)?,
                eval(&mt_rhs, &at)?,
            ])
        })();
        let [bv, bpv, xpv, xppv, rhsv, rhov, mtl, mtr] = match vals {
            Ok(v) => v,
            Err(SpacetimeError::Domain(_)) => continue,
            Err(e) => return Err(e),
        };
        out.samples += 1;
        let lhs = bpv - bv / rv;
        let b_form = lhs < 0.0;
        let xi_form = xpv * xppv < 0.0;
        out.flare_b_form &= b_form;
        out.flare_xi_form &= xi_form;
        out.forms_agree &= b_form == xi_form;
        out.identity_max_deviation = out.identity_max_deviation.max(deviation(lhs, rhsv));
        out.morris_thorne_max_deviation = out.morris_thorne_max_deviation.max(deviation(mtl, mtr));
        out.rho_negative &= rhov < 0.0;
        b_range = (b_range.0.min(bv), b_range.1.max(bv));
    }
    if out.samples == 0 {
        return Err(SpacetimeError::Domain("no sampled radius was inside the profile's domain".into()));
    }
    if b_range.1 - b_range.0 <= IDENTITY_TOL * (1.0 + b_range.1.abs()) {
        out.b_constant = Some(0.5 * (b_range.0 + b_range.1));
    }
    Ok(out)
}

/// Which redshift function [`schwarzschild_profile`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiVariant {
    /// `Φ = ½ ln(2M/r − 1)`: the logarithm's argument is negative for
    /// `r > 2M`.
    Verbatim,
    /// `Φ = ½ ln(1 − 2M/r)`, which tends to zero as `r → ∞`.
    Alternative,
}

/// Mass symbol used by the Schwarzschild profile.
pub const MASS: &str = "M";

/// `ξ = 4M / (2M/(r − 2M))^{1/2}` with the selected `Φ`, on `r ∈ (2M, 10M)`
/// and throat `r0 = 2M`. `M` is a parameter of the profile.
pub fn schwarzschild_profile(mass: f64, variant: PhiVariant) -> Result<EmbeddingProfile, SpacetimeError> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(SpacetimeError::InvalidInput(format!("mass must be positive, got {mass}")));
    }
    let m = Expr::symbol(MASS);
    let two_m = Expr::int(2) * &m;
    let xi = Expr::int(4) * &m / Expr::sqrt(&two_m / (r() - &two_m));
    let half = Expr::ratio(1, 2).expect("nonzero denominator");
    let phi = match variant {
        PhiVariant::Verbatim => &half * Expr::ln(&two_m / r() - 1),
        PhiVariant::Alternative => &half * Expr::ln(Expr::one() - &two_m / r()),
    };
    let params = Binding::new().with(MASS, mass);
    Ok(EmbeddingProfile::new(xi, phi, Interval::new(2.0 * mass, 10.0 * mass)?, params)?
        .with_throat(2.0 * mass))
}

/// Flamm paraboloid `√(8M(r − 2M))`.
pub fn flamm_form() -> Expr {
    let m = Expr::symbol(MASS);
    Expr::sqrt(Expr::int(8) * &m * (r() - Expr::int(2) * &m))
}

/// Fraction of sampled radii at which `Φ` itself is undefined.
pub fn phi_domain_failures(profile: &EmbeddingProfile, samples: usize, seed: u64) -> (usize, usize) {
    let radii = profile.sample_radii(samples, seed);
    let bad = radii
        .iter()
        .filter(|&&rv| matches!(profile.phi.evaluate(&profile.at(rv)), Err(EvalError::Domain(_))))
        .count();
    (bad, radii.len())
}

/// Inputs of the spherically symmetric wormhole with a derived fiber.
#[derive(Debug, Clone)]
pub struct GrapheneParams {
    pub b: Expr,
    pub phi: Expr,
    pub f: Expr,
    pub r_domain: Interval,
    pub params: Binding,
}

/// `−e^{2Φ}dt² + dr²/(1 − b/r) + r²(dθ² + sin²θ dζ²) − f²(dψ² + dφ² + dσ²)`
/// on `(t, r, theta, zeta, psi, varphi, sigma)`. Spatial virtual dimension
/// is `3 − 3 = 0`; the metric records `1` for time.
pub fn graphene_wormhole_metric(p: &GrapheneParams) -> Result<Metric, SpacetimeError> {
    check_symbols(&p.b, &[R], &p.params, "b")?;
    check_symbols(&p.phi, &[R], &p.params, "Phi")?;
    check_symbols(&p.f, &[], &p.params, "f")?;
    let one_minus = Expr::one() - p.b.clone() / r();
    let probe = Chart::new([(R, p.r_domain)])?.with_params(p.params.clone())?;
    let mut points = vec![probe.midpoint()];
    points.extend(probe.sample_points(32, 0));
    for pt in &points {
        let v = eval(&one_minus, pt)?;
        if v <= 0.0 {
            return Err(SpacetimeError::Domain(format!(
                "1 - b/r = {v} at r = {}",
                pt.get(R).unwrap_or(f64::NAN)
            )));
        }
    }
    let fiber_iv = Interval::new(-1.0, 1.0)?;
    let chart = Chart::new([
        ("t", Interval::new(0.0, 1.0)?),
        (R, p.r_domain),
        ("theta", Interval::new(0.3, 2.8)?),
        ("zeta", Interval::new(0.0, 6.0)?),
        ("psi", fiber_iv),
        ("varphi", fiber_iv),
        ("sigma", fiber_iv),
    ])?
    .with_params(p.params.clone())?;
    let f2 = Expr::powi(p.f.clone(), 2);
    let r2 = Expr::powi(r(), 2);
    let diag = vec![
        -Expr::exp(Expr::int(2) * p.phi.clone()),
        Expr::recip(one_minus),
        r2.clone(),
        r2 * Expr::powi(Expr::sin(Expr::symbol("theta")), 2),
        -f2.clone(),
        -f2.clone(),
        -f2,
    ];
    Ok(Metric::diagonal(chart, diag)?.with_virtual_dim(1)?)
}

/// Two-column `r ξ(r)` table, `#` header, over `steps + 1` evenly spaced
/// radii of `range`; radii outside the domain of `ξ` are omitted.
pub fn embedding_table(profile: &EmbeddingProfile, range: Interval, steps: usize) -> String {
    let mut out = String::from("# r xi(r)\n");
    let steps = steps.max(1);
    for i in 0..=steps {
        let rv = range.lo + range.len() * i as f64 / steps as f64;
        if let Ok(v) = profile.xi.evaluate(&profile.at(rv)) {
            let _ = writeln!(out, "{rv:.9} {v:.9}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn throat_profile() -> EmbeddingProfile {
        let xi = Expr::sqrt(Expr::powi(r(), 2) - 1);
        EmbeddingProfile::new(xi, Expr::zero(), Interval::new(1.0, 5.0).unwrap(), Binding::new())
            .unwrap()
            .with_throat(1.0)
    }

    #[test]
    fn catenoid_like_profile_flares_out() {
        let p = throat_profile();
        let rep = flare_out_check(&p, 1.0, Interval::new(1.0, 5.0).unwrap(), 100, 0).unwrap();
        assert!(rep.flare_out_pass(), "{rep:?}");
        assert!(rep.throat.final_deviation < 1e-4);
        assert!(rep.identity_max_deviation < 1e-9);
        assert!(rep.morris_thorne_max_deviation < 1e-9);
        assert!(rep.rho_negative);
        assert_eq!(rep.throat.xi_at_throat, Some(0.0));
    }

    #[test]
    fn cone_has_no_throat() {
        let p = EmbeddingProfile::new(r(), Expr::zero(), Interval::new(1.0, 5.0).unwrap(), Binding::new()).unwrap();
        let rep = flare_out_check(&p, 1.0, Interval::new(1.0, 5.0).unwrap(), 20, 0).unwrap();
        assert!(!rep.throat.pass);
        assert!((rep.throat.approach.last().unwrap().1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schwarzschild_shape_is_constant() {
        let p = schwarzschild_profile(1.0, PhiVariant::Verbatim).unwrap();
        let rep = flare_out_check(&p, 2.0, Interval::new(2.0, 10.0).unwrap(), 50, 0).unwrap();
        assert!(rep.flare_out_pass());
        assert!((rep.b_constant.unwrap() - 2.0).abs() < 1e-9);
        let xi3 = p.xi.evaluate(&p.at(3.0)).unwrap();
        assert!((xi3 - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(phi_domain_failures(&p, 10, 0), (10, 10));
        let alt = schwarzschild_profile(1.0, PhiVariant::Alternative).unwrap();
        assert_eq!(phi_domain_failures(&alt, 10, 0).0, 0);
    }

    #[test]
    fn reduction_with_flat_profile_is_minkowski() {
        let p = EmbeddingProfile::new(Expr::zero(), Expr::zero(), Interval::new(1.0, 2.0).unwrap(), Binding::new())
            .unwrap();
        let g = cylindrical_reduction(&p).unwrap();
        assert_eq!(g.component(0, 0), &Expr::int(-1));
        assert_eq!(g.component(1, 1), &Expr::one());
        assert_eq!(g.signature_counts(), (2, 1));
    }

    #[test]
    fn pointlike_dimensions() {
        let g = pointlike_spacetime(3, 3, &Expr::zero(), &Expr::one(), &Binding::new()).unwrap();
        assert_eq!(g.geometric_dim(), 7);
        assert_eq!(g.virtual_dim(), 1);
        let g = pointlike_spacetime(4, 3, &Expr::zero(), &Expr::one(), &Binding::new()).unwrap();
        assert_eq!(g.coords()[4], "w");
        assert_eq!(g.virtual_dim(), 2);
    }

    #[test]
    fn graphene_rejects_horizon_inside_domain() {
        let p = GrapheneParams {
            b: Expr::int(2),
            phi: Expr::zero(),
            f: Expr::one(),
            r_domain: Interval::new(1.0, 3.0).unwrap(),
            params: Binding::new(),
        };
        assert!(matches!(graphene_wormhole_metric(&p), Err(SpacetimeError::Domain(_))));
    }

    #[test]
    fn table_format() {
        let t = embedding_table(&throat_profile(), Interval::new(1.0, 2.0).unwrap(), 2);
        assert_eq!(t.lines().next(), Some("# r xi(r)"));
        assert_eq!(t.lines().count(), 4);
    }
}
