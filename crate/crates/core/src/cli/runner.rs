//! Executes the checks a manifest requests and assembles a [`RunReport`].
//!
//! Module errors never abort a run; they become failing check entries.

use serde_json::{json, Value};

use super::manifest::{CheckKind, Manifest, SpacetimeKind, WormholeSection};
use super::report::{digest, CheckResult, Finding, RunReport};
use crate::chartgeo::{riemann, CurvatureBundle, Interval, Metric};
use crate::einstein::{
    check_pndp_system, check_system_1, infer_lambda, infer_lambda_with_ricci, EinsteinReport,
    LambdaEstimate, SamplingOptions,
};
use crate::pndp::{classify, validate_definition4, PndpDescriptor, ProjectionTarget};
use crate::spacetime::{
    embedding_table, flamm_form, flare_identity_rhs, flare_out_check, morris_thorne_grr,
    phi_domain_failures, shape_function, PhiVariant, MASS, R,
};
use crate::symexpr::{deviation, equivalent, EquivalenceOptions, Expr, SampleDomain};
use crate::warpfac::{
    block_ricci, compare_blocks, direct_blocks, tilde_hessian, warped_metric, RicciBlocks, WarpedSpec,
};

/// Command-line overrides applied on top of the manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Replaces the residual tolerance.
    pub tol: Option<f64>,
}

struct Ctx<'a> {
    m: &'a Manifest,
    seed: u64,
    samples: usize,
    residual_tol: f64,
    findings: Vec<Finding>,
}

impl Ctx<'_> {
    fn sampling(&self) -> SamplingOptions {
        SamplingOptions { seed: self.seed, samples: self.samples, tol: self.residual_tol }
    }

    fn equivalence(&self) -> EquivalenceOptions {
        EquivalenceOptions::default()
            .with_seed(self.seed)
            .with_samples(self.m.sampling.equivalence_samples)
            .with_tol(self.m.tolerance.equivalence)
    }

    fn find(&mut self, code: &str, message: impl Into<String>) {
        self.findings.push(Finding::new(code, message));
    }
}

/// Checks that will actually run, in pipeline order.
pub fn planned_checks(m: &Manifest) -> Vec<CheckKind> {
    let has_metric = m.metric.is_some() || m.warped.is_some() || m.spacetime.is_some();
    let mut out: Vec<CheckKind> = Vec::new();
    for &c in &m.checks {
        if c == CheckKind::All {
            if has_metric {
                out.extend([CheckKind::Curvature, CheckKind::Einstein]);
            }
            if m.warped.is_some() {
                out.extend([CheckKind::Blocks, CheckKind::Pndp]);
            }
            if m.wormhole.is_some() {
                out.push(CheckKind::Wormhole);
            }
            if m.spacetime.is_some() {
                out.push(CheckKind::Spacetime);
            }
        } else {
            out.push(c);
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn run(m: &Manifest, opts: &RunOptions) -> RunReport {
    let mut ctx = Ctx {
        m,
        seed: opts.seed.unwrap_or(m.sampling.seed),
        samples: opts.samples.unwrap_or(m.sampling.samples).max(1),
        residual_tol: opts.tol.unwrap_or(m.tolerance.residual),
        findings: Vec::new(),
    };
    let mut checks = Vec::new();
    for kind in planned_checks(m) {
        let result = match kind {
            CheckKind::Curvature => curvature_check(&mut ctx),
            CheckKind::Einstein => einstein_check(&mut ctx),
            CheckKind::Blocks => blocks_check(&mut ctx),
            CheckKind::Pndp => pndp_check(&mut ctx),
            CheckKind::Wormhole => wormhole_check(&mut ctx),
            CheckKind::Spacetime => spacetime_check(&mut ctx),
            CheckKind::All => unreachable!("expanded by planned_checks"),
        };
        checks.push(result.unwrap_or_else(|e| CheckResult {
            name: kind.name().into(),
            pass: false,
            summary: format!("error: {e}"),
            detail: json!({ "error": e }),
        }));
    }
    let status = if checks.iter().all(|c| c.pass) { 0 } else { 1 };
    RunReport {
        id: m.id.clone(),
        version: m.version,
        description: m.description.clone(),
        manifest_digest: digest(&m.source),
        seed: ctx.seed,
        checks,
        findings: ctx.findings,
        status,
    }
}

type CheckOutcome = Result<CheckResult, String>;

fn result(name: &str, pass: bool, summary: String, detail: Value) -> CheckOutcome {
    Ok(CheckResult { name: name.into(), pass, summary, detail })
}

fn primary_metric(m: &Manifest) -> Result<Metric, String> {
    if let Some(g) = &m.metric {
        return Ok(g.clone());
    }
    if let Some(w) = &m.warped {
        return warped_metric(w).map_err(|e| e.to_string());
    }
    if let Some(s) = &m.spacetime {
        return Ok(s.metric.clone());
    }
    Err("manifest has no metric".into())
}

fn estimate_text(est: &LambdaEstimate) -> String {
    match est {
        LambdaEstimate::Einstein(v) => format!("lambda = {v}"),
        LambdaEstimate::NotEinstein => "not Einstein".into(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * (1.0 + b.abs())
}

/// Compares an inferred estimate against the manifest's expectations.
fn expectations(m: &Manifest, est: &LambdaEstimate) -> (bool, Vec<String>) {
    let mut failures = Vec::new();
    if let Some(want) = m.expect_einstein {
        let got = matches!(est, LambdaEstimate::Einstein(_));
        if got != want {
            failures.push(format!("expected einstein = {want}"));
        }
    }
    if let Some(want) = m.expect_lambda {
        if !matches!(est, LambdaEstimate::Einstein(v) if close(*v, want)) {
            failures.push(format!("expected lambda = {want}"));
        }
    }
    (failures.is_empty(), failures)
}

fn curvature_check(ctx: &mut Ctx) -> CheckOutcome {
    let g = primary_metric(ctx.m)?;
    let n = g.geometric_dim();
    let cb = CurvatureBundle::compute(&g);
    let tol = ctx.m.tolerance.identity;
    let mut symmetry = 0.0f64;
    let mut bianchi = 0.0f64;
    let mut valid = 0usize;
    for p in g.chart().sample_points(ctx.samples, ctx.seed) {
        let ev = |e: &Expr| e.evaluate(&p);
        let point = (|| -> Result<(f64, f64), crate::symexpr::EvalError> {
            let mut sym = 0.0f64;
            let mut bia = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    sym = sym.max(deviation(ev(&cb.ricci[i][j])?, ev(&cb.ricci[j][i])?));
                }
            }
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let r = &cb.riemann[l];
                            let s = ev(&r[i][j][k])? + ev(&r[j][k][i])? + ev(&r[k][i][j])?;
                            bia = bia.max(s.abs());
                        }
                    }
                }
            }
            Ok((sym, bia))
        })();
        match point {
            Ok((s, b)) => {
                valid += 1;
                symmetry = symmetry.max(s);
                bianchi = bianchi.max(b);
            }
            Err(crate::symexpr::EvalError::Domain(_)) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    if valid == 0 {
        return Err("no sample point was inside the metric's domain".into());
    }
    let mid = g.chart().midpoint();
    let scalar_mid = cb.scalar.evaluate(&mid).ok();
    let pass = symmetry <= tol && bianchi <= tol;
    result(
        "curvature",
        pass,
        format!("dim {n}, ricci symmetry {symmetry:.3e}, first bianchi {bianchi:.3e} over {valid} points"),
        json!({
            "dim": n,
            "signature": g.signature(),
            "virtual_dim": g.virtual_dim(),
            "samples": valid,
            "ricci_symmetry_max": symmetry,
            "first_bianchi_max": bianchi,
            "scalar": cb.scalar.to_string(),
            "scalar_at_midpoint": scalar_mid,
        }),
    )
}

fn einstein_check(ctx: &mut Ctx) -> CheckOutcome {
    let g = primary_metric(ctx.m)?;
    let opts = ctx.sampling();
    let est = infer_lambda(&g, &opts).map_err(|e| e.to_string())?;
    let (mut pass, failures) = expectations(ctx.m, &est);
    let mut summary = estimate_text(&est);
    let mut detail = json!({ "lambda": est, "expectation_failures": failures });
    if let Some(spec) = &ctx.m.warped {
        let lambda = ctx
            .m
            .lambda
            .or(est.value())
            .or_else(|| infer_lambda(spec.base_tilde(), &opts).ok().and_then(LambdaEstimate::value))
            .unwrap_or(0.0);
        match check_system_1(spec, lambda, ctx.m.mu, &opts) {
            Ok(rep) => {
                pass &= rep.einstein;
                summary.push_str(&format!("; general system {}", verdict(rep.einstein)));
                if !rep.einstein {
                    let failed = failed_equations(&rep);
                    ctx.find("general-system-failed", format!("general warped system fails: {failed}"));
                }
                detail["general_system"] = json!(rep);
            }
            Err(e) => {
                pass = false;
                summary.push_str(&format!("; general system error: {e}"));
                detail["general_system"] = json!({ "error": e.to_string() });
            }
        }
    }
    if !failures.is_empty() {
        summary.push_str(&format!(" ({})", failures.join(", ")));
    }
    result("einstein", pass, summary, detail)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn failed_equations(rep: &EinsteinReport) -> String {
    rep.equations
        .iter()
        .filter(|e| !e.pass)
        .map(|e| format!("{} (max residual {})", e.name, e.max_abs))
        .collect::<Vec<_>>()
        .join(", ")
}

fn negate_fiber(b: &RicciBlocks) -> RicciBlocks {
    let mut out = b.clone();
    for row in &mut out.fiber {
        for e in row.iter_mut() {
            *e = -e.clone();
        }
    }
    out
}

/// True when some Hessian entry of `f̃` is nonzero at a sampled point.
fn tilde_hessian_nonzero(spec: &WarpedSpec, samples: usize, seed: u64) -> Result<bool, String> {
    let h = tilde_hessian(spec).map_err(|e| e.to_string())?;
    if h.iter().flatten().all(Expr::is_zero) {
        return Ok(false);
    }
    for p in spec.base_tilde().chart().sample_points(samples, seed) {
        for e in h.iter().flatten() {
            if let Ok(v) = e.evaluate(&p) {
                if v.abs() > 1e-12 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

fn blocks_check(ctx: &mut Ctx) -> CheckOutcome {
    let spec = ctx.m.warped.as_ref().ok_or("manifest has no [warped] section")?;
    let formula = block_ricci(spec).map_err(|e| e.to_string())?;
    let direct = direct_blocks(spec).map_err(|e| e.to_string())?;
    let chart = spec.chart().map_err(|e| e.to_string())?;
    let samples = ctx.m.sampling.block_samples;
    let (tol, mixed_tol) = (ctx.m.tolerance.block, ctx.m.tolerance.mixed);
    let cmp = compare_blocks(&formula, &direct, &chart, samples, ctx.seed).map_err(|e| e.to_string())?;
    let pass = cmp.agrees(tol, mixed_tol);
    let mut detail = json!({ "comparison": cmp, "tolerance": tol, "mixed_tolerance": mixed_tol });
    if !pass {
        if tilde_hessian_nonzero(spec, samples, ctx.seed)? {
            ctx.find(
                "tilde-warp-terms-omitted",
                format!(
                    "decomposition omits the Hessian of f~ = {}; B~ block deviates by {:.3e}",
                    spec.f_tilde(),
                    cmp.tilde
                ),
            );
        }
        let flipped = negate_fiber(&formula);
        if let Ok(alt) = compare_blocks(&flipped, &direct, &chart, samples, ctx.seed) {
            if alt.fiber <= tol && cmp.fiber > tol {
                ctx.find("fiber-block-sign", "fiber block matches the direct Ricci only with the opposite sign");
            }
            detail["negated_fiber"] = json!(alt);
        }
    }
    result(
        "blocks",
        pass,
        format!(
            "max block deviation {:.3e}, mixed {:.3e}/{:.3e} over {} points",
            cmp.max_block_deviation(),
            cmp.mixed_formula,
            cmp.mixed_direct,
            cmp.samples
        ),
        detail,
    )
}

fn target_tag(t: &ProjectionTarget) -> String {
    match t {
        ProjectionTarget::EinsteinFactor { dim, flat: true, .. } => format!("R^{dim}"),
        ProjectionTarget::EinsteinFactor { .. } => "einstein_factor".into(),
        ProjectionTarget::Point => "point".into(),
        ProjectionTarget::Desuspension { order } => format!("Sigma^{order}(p)"),
    }
}

fn compare_claims(ctx: &mut Ctx, desc: Option<&PndpDescriptor>) {
    let claims = ctx.m.claims.clone();
    if let Some((a, b, c)) = claims.arithmetic {
        if a - b != c {
            ctx.find(
                "arithmetic-slip",
                format!("printed difference {a}-{b}={c} is inconsistent; {a}-{b}={}", a - b),
            );
        }
    }
    let Some(desc) = desc else { return };
    let mut mismatch = |what: &str, claimed: String, computed: String| {
        if claimed != computed {
            ctx.find("claim-mismatch", format!("{what}: claimed {claimed}, computed {computed}"));
        }
    };
    if let Some(n) = claims.n {
        mismatch("n", n.to_string(), desc.n.to_string());
    }
    if let Some(d) = claims.d {
        mismatch("d", d.to_string(), desc.d.to_string());
    }
    if let Some(v) = claims.virtual_total {
        mismatch("virtual_total", v.to_string(), desc.virtual_total.to_string());
    }
    if let Some(t) = &claims.type_tag {
        mismatch("type", t.clone(), format!("{:?}", desc.type_tag));
    }
    if let Some(t) = &claims.target {
        mismatch("target", t.clone(), target_tag(&desc.projection_target));
    }
    if let Some(k) = claims.target_dim {
        let dim = match &desc.projection_target {
            ProjectionTarget::EinsteinFactor { dim, .. } => *dim,
            _ => 0,
        };
        mismatch("target_dim", k.to_string(), dim.to_string());
    }
    if let Some(o) = claims.order {
        mismatch("order", o.to_string(), desc.identification.projection_order.to_string());
    }
    if let Some(l) = claims.lambda {
        if !close(desc.lambda, l) {
            mismatch("lambda", l.to_string(), desc.lambda.to_string());
        }
    }
}

fn is_flat(g: &Metric) -> bool {
    riemann(g).iter().flatten().flatten().flatten().all(Expr::is_zero)
}

fn pndp_check(ctx: &mut Ctx) -> CheckOutcome {
    let spec = ctx.m.warped.as_ref().ok_or("manifest has no [warped] section")?;
    let opts = ctx.sampling();
    let lambda = match ctx.m.lambda {
        Some(l) => l,
        None => [spec.base_tilde(), spec.base_prime()]
            .into_iter()
            .find_map(|g| infer_lambda(g, &opts).ok().and_then(LambdaEstimate::value))
            .unwrap_or(0.0),
    };
    let checklist = validate_definition4(spec, lambda, &opts);
    for item in checklist.items.iter().filter(|i| !i.pass) {
        ctx.find(
            &format!("definition-item-{}", item.key),
            format!("{}: {}", item.description, item.detail),
        );
    }
    if spec.fiber().sign() > 0 {
        ctx.find("fiber-sign-positive", "fiber metric taken as +delta instead of -delta");
    }
    let mut detail = json!({ "lambda": lambda, "checklist": checklist });
    let system = match check_pndp_system(spec, lambda, &opts) {
        Ok(rep) => rep,
        Err(e) => {
            ctx.find("pndp-system-failed", e.to_string());
            compare_claims(ctx, None);
            detail["system"] = json!({ "error": e.to_string() });
            return result("pndp", false, format!("system error: {e}"), detail);
        }
    };
    if !system.einstein {
        ctx.find("pndp-system-failed", failed_equations(&system));
        let nonconstant = !spec.f().free_symbols().is_empty();
        if lambda == 0.0 && nonconstant && is_flat(spec.base_prime()) && is_flat(spec.base_tilde()) {
            ctx.find(
                "flat-warp-forces-constant",
                "with lambda = 0 and flat factors the warp equation forces f to be constant",
            );
        }
    }
    detail["system"] = json!(system);

    // the traced system can hold without the assembled metric being Einstein
    if system.einstein {
        let g = warped_metric(spec).map_err(|e| e.to_string())?;
        let ric = crate::chartgeo::ricci(&g);
        let est = infer_lambda_with_ricci(&g, &ric, &opts).map_err(|e| e.to_string())?;
        let scalar = crate::chartgeo::trace(&g, &ric);
        let dim = g.geometric_dim() as f64;
        let scalar_mid = scalar.evaluate(&g.chart().midpoint()).ok();
        detail["assembled"] = json!({
            "lambda": est,
            "scalar_at_midpoint": scalar_mid,
            "lambda_times_dim": lambda * dim,
        });
        if !matches!(est, LambdaEstimate::Einstein(v) if close(v, lambda)) {
            ctx.find(
                "scalar-system-not-einstein",
                format!(
                    "PNDP system holds but the assembled metric gives {}; scalar {} vs lambda*dim {}",
                    estimate_text(&est),
                    scalar_mid.map_or("undefined".into(), |v| format!("{v}")),
                    lambda * dim
                ),
            );
        }
    }

    let desc = match classify(spec, &system) {
        Ok(d) => Some(d),
        Err(e) => {
            detail["classification"] = json!({ "error": e.to_string() });
            None
        }
    };
    compare_claims(ctx, desc.as_ref());
    let pass = checklist.all_pass() && system.einstein && desc.is_some();
    let summary = match &desc {
        Some(d) => format!(
            "{} lambda = {}, {:?}, virtual total {}, target {}",
            d.label(),
            d.lambda,
            d.type_tag,
            d.virtual_total,
            d.projection_target
        ),
        None if !system.einstein => format!("system fails: {}", failed_equations(&system)),
        None => "not classified".into(),
    };
    if let Some(d) = &desc {
        detail["descriptor"] = json!(d);
        detail["label"] = json!(d.label());
    }
    result("pndp", pass, summary, detail)
}

fn profile_domain(w: &WormholeSection) -> Result<Interval, String> {
    let lo = w.profile.r_domain.lo.max(w.r0);
    Interval::new(lo, w.profile.r_domain.hi).map_err(|e| e.to_string())
}

fn wormhole_check(ctx: &mut Ctx) -> CheckOutcome {
    let w = ctx.m.wormhole.as_ref().ok_or("manifest has no [wormhole] section")?;
    let p = &w.profile;
    let range = profile_domain(w)?;
    let report = flare_out_check(p, w.r0, range, w.samples, ctx.seed).map_err(|e| e.to_string())?;
    let domain = SampleDomain::new().interval(R, range.lo, range.hi).with_fixed(&p.params);
    let eq = ctx.equivalence();
    let mut identities = Vec::new();
    let mut check = |name: &str, a: &Expr, b: &Expr| -> Result<bool, String> {
        let e = equivalent(a, b, &domain, &eq).map_err(|e| e.to_string())?;
        identities.push(json!({ "name": name, "result": e }));
        Ok(e.holds)
    };
    let b = shape_function(p);
    let xp = p.xi_prime();
    let mt = check("morris_thorne", &(Expr::one() + Expr::powi(xp, 2)), &morris_thorne_grr(p))?;
    let flare_lhs = b.differentiate(R) - b.clone() / Expr::symbol(R);
    let fi = check("flare_identity", &flare_lhs, &flare_identity_rhs(p))?;
    let mut pass = mt && fi && report.flare_out_pass();
    if let Some(variant) = w.schwarzschild {
        let m = Expr::symbol(MASS);
        let b2m = check("shape_is_2M", &b, &(Expr::int(2) * &m))?;
        let flamm = check("flamm_form", &p.xi, &flamm_form())?;
        pass &= b2m && flamm;
        if variant == PhiVariant::Verbatim {
            let (bad, total) = phi_domain_failures(p, w.samples, ctx.seed);
            if bad > 0 {
                ctx.find(
                    "phi-domain",
                    format!("Phi = {} is undefined at {bad} of {total} radii in the exterior r > 2M", p.phi),
                );
            }
        }
    }
    if let Some(bc) = report.b_constant {
        ctx.find("shape-function-constant", format!("b(r) is constant, b = {bc}"));
    }
    if !report.throat.pass {
        ctx.find(
            "no-throat",
            format!(
                "b(r)/r does not approach 1 at r0 = {}: final deviation {}",
                w.r0, report.throat.final_deviation
            ),
        );
    }
    if !report.rho_negative && report.flare_xi_form {
        ctx.find("rho-sign", "flare-out holds but rho is not negative at every radius");
    }
    let mut detail = json!({ "report": report, "identities": identities, "r_range": [range.lo, range.hi] });
    if let Some(steps) = w.table_steps {
        detail["embedding_table"] = json!(embedding_table(p, range, steps));
    }
    result(
        "wormhole",
        pass,
        format!(
            "throat {}, flare-out {}, identities {}",
            verdict(report.throat.pass),
            verdict(report.flare_b_form && report.flare_xi_form && report.forms_agree),
            verdict(mt && fi)
        ),
        detail,
    )
}

fn spacetime_check(ctx: &mut Ctx) -> CheckOutcome {
    let s = ctx.m.spacetime.as_ref().ok_or("manifest has no [spacetime] section")?;
    let est = infer_lambda(&s.metric, &ctx.sampling()).map_err(|e| e.to_string())?;
    let (pass, failures) = expectations(ctx.m, &est);
    let kind = match s.kind {
        SpacetimeKind::Pointlike { n, d } => json!({ "kind": "pointlike", "n": n, "d": d }),
        SpacetimeKind::Graphene => json!({ "kind": "graphene" }),
    };
    let (pos, neg) = s.metric.signature_counts();
    let mut summary = format!(
        "dim {} (+{pos}/-{neg}), virtual {}, {}",
        s.metric.geometric_dim(),
        s.metric.virtual_dim(),
        estimate_text(&est)
    );
    if !failures.is_empty() {
        summary.push_str(&format!(" ({})", failures.join(", ")));
    }
    result(
        "spacetime",
        pass,
        summary,
        json!({
            "spacetime": kind,
            "coords": s.metric.coords(),
            "virtual_dim": s.metric.virtual_dim(),
            "lambda": est,
            "expectation_failures": failures,
        }),
    )
}

/// Embedding table of a manifest's wormhole profile over its sampled range.
pub fn wormhole_table(m: &Manifest, steps: usize) -> Result<String, String> {
    let w = m.wormhole.as_ref().ok_or("manifest has no [wormhole] section")?;
    Ok(embedding_table(&w.profile, profile_domain(w)?, w.table_steps.unwrap_or(steps)))
}
