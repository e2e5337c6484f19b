mod common;

use nalgebra::DMatrix;
use pndp::chartgeo::{hessian, laplacian, ricci, scalar_curvature, Chart, Interval, Metric};
use pndp::einstein::{infer_lambda, LambdaEstimate, SamplingOptions};
use pndp::pndp::validate_definition4;
use pndp::spacetime::{cylindrical_reduction, graphene_wormhole_metric, pointlike_spacetime, EmbeddingProfile, GrapheneParams};
use pndp::symexpr::{Binding, Expr};
use pndp::warpfac::{derived_fiber, WarpedSpec};

use common::{curvature, diag, rel};

fn sym(s: &str) -> Expr {
    Expr::symbol(s)
}

fn compare(g: &Metric, oracle: &common::MetricFn, tol: f64) {
    let ric = ricci(g);
    let scalar = scalar_curvature(g);
    let n = g.geometric_dim();
    for p in g.chart().sample_points(10, 5) {
        let x: Vec<f64> = g.coords().iter().map(|c| p.get(c).unwrap()).collect();
        let num = curvature(oracle, &x);
        for i in 0..n {
            for j in 0..n {
                let s = ric[i][j].evaluate(&p).unwrap();
                assert!(rel(s, num.ricci[(i, j)]) < tol, "Ric[{i}][{j}] {s} vs {}", num.ricci[(i, j)]);
            }
        }
        assert!(rel(scalar.evaluate(&p).unwrap(), num.scalar) < tol);
    }
}

#[test]
fn non_diagonal_metric_matches_finite_differences() {
    // dx^2 + 2xy dx dy + (2 + y^2) dy^2
    let chart = Chart::new([("x", Interval::new(0.1, 0.9).unwrap()), ("y", Interval::new(0.1, 0.9).unwrap())]).unwrap();
    let xy = sym("x") * sym("y");
    let g = Metric::new(
        chart,
        vec![vec![Expr::one(), xy.clone()], vec![xy, Expr::int(2) + Expr::powi(sym("y"), 2)]],
    )
    .unwrap();
    let oracle = |p: &[f64]| {
        let (x, y) = (p[0], p[1]);
        DMatrix::from_row_slice(2, 2, &[1.0, x * y, x * y, 2.0 + y * y])
    };
    compare(&g, &oracle, 1e-5);
}

#[test]
fn graphene_metric_matches_finite_differences() {
    let m = sym("M");
    let p = GrapheneParams {
        b: Expr::int(2) * &m,
        phi: Expr::ratio(1, 2).unwrap() * Expr::ln(Expr::one() - Expr::int(2) * &m / sym("r")),
        f: Expr::int(2),
        r_domain: Interval::new(3.0, 8.0).unwrap(),
        params: Binding::new().with("M", 1.0),
    };
    let g = graphene_wormhole_metric(&p).unwrap();
    assert_eq!(g.virtual_dim(), 1);
    let oracle = |x: &[f64]| {
        let (r, th) = (x[1], x[2]);
        let a = 1.0 - 2.0 / r;
        diag(&[-a, 1.0 / a, r * r, r * r * th.sin().powi(2), -4.0, -4.0, -4.0])
    };
    compare(&g, &oracle, 1e-5);
    let est = infer_lambda(&g, &SamplingOptions::default()).unwrap();
    assert_eq!(est, LambdaEstimate::Einstein(0.0));
}

#[test]
fn pointlike_spacetime_coordinates() {
    let g = pointlike_spacetime(3, 3, &Expr::zero(), &Expr::one(), &Binding::new()).unwrap();
    assert_eq!(g.coords(), ["t", "x", "y", "z", "psi", "varphi", "sigma"]);
    assert_eq!(g.virtual_dim(), 1);
    let g4 = pointlike_spacetime(4, 3, &Expr::zero(), &Expr::one(), &Binding::new()).unwrap();
    assert!(g4.coords().contains(&"w".to_string()));
    assert_eq!(g4.signature_counts(), (4, 4));
}

#[test]
fn cylindrical_reduction_of_flat_profile_is_minkowski() {
    let prof = EmbeddingProfile::new(Expr::zero(), Expr::zero(), Interval::new(0.5, 2.0).unwrap(), Binding::new()).unwrap();
    let g = cylindrical_reduction(&prof).unwrap();
    let p = g.chart().midpoint();
    let r = p.get("r").unwrap();
    let num = g.numeric(&p).unwrap();
    assert_eq!(num, diag(&[-1.0, 1.0, r * r]));
    assert_eq!(infer_lambda(&g, &SamplingOptions::default()).unwrap(), LambdaEstimate::Einstein(0.0));
}

#[test]
fn laplacian_is_trace_of_hessian_on_sphere() {
    let chart = Chart::new([("theta", Interval::new(0.3, 2.8).unwrap()), ("phi", Interval::new(0.0, 6.0).unwrap())]).unwrap();
    let g = Metric::diagonal(chart, vec![Expr::one(), Expr::powi(Expr::sin(sym("theta")), 2)]).unwrap();
    // cos(theta) is a first eigenfunction: Δ cos θ = −2 cos θ
    let f = Expr::cos(sym("theta"));
    let lap = laplacian(&g, &f).unwrap();
    let h = hessian(&g, &f).unwrap();
    for p in g.chart().sample_points(10, 2) {
        let th = p.get("theta").unwrap();
        assert!(rel(lap.evaluate(&p).unwrap(), -2.0 * th.cos()) < 1e-12);
        let tr = h[0][0].evaluate(&p).unwrap() + h[1][1].evaluate(&p).unwrap() / th.sin().powi(2);
        assert!(rel(tr, -2.0 * th.cos()) < 1e-12);
    }
}

fn flat_line(name: &str) -> Metric {
    Metric::diagonal(Chart::new([(name, Interval::new(-1.0, 1.0).unwrap())]).unwrap(), vec![Expr::one()]).unwrap()
}

fn plane(a: &str, b: &str) -> Metric {
    let chart = Chart::new([(a, Interval::new(-1.0, 1.0).unwrap()), (b, Interval::new(-1.0, 1.0).unwrap())]).unwrap();
    Metric::diagonal(chart, vec![Expr::one(), Expr::one()]).unwrap()
}

#[test]
fn definition_checklist_flags_wrong_rank() {
    let opts = SamplingOptions::default();
    let spec = WarpedSpec::new(plane("t", "x"), plane("y", "z"), derived_fiber(2, 3).unwrap(), Expr::one(), Expr::zero())
        .unwrap();
    let c = validate_definition4(&spec, 0.0, &opts);
    assert!(!c.item('c').unwrap().pass);
    assert!(c.item('a').unwrap().pass && c.item('b').unwrap().pass && c.item('d').unwrap().pass);

    let ok = WarpedSpec::new(plane("t", "x"), plane("y", "z"), derived_fiber(2, 4).unwrap(), Expr::one(), Expr::zero())
        .unwrap();
    let c = validate_definition4(&ok, 0.0, &opts);
    assert!(c.all_pass() && c.special_case);
}

#[test]
fn definition_checklist_flags_excess_without_matching_prime_dim() {
    // n = 3, d = 2 > 0 excess but n' = 1
    let spec = WarpedSpec::new(flat_line("x"), plane("y", "z"), derived_fiber(2, 4).unwrap(), Expr::one(), Expr::zero())
        .unwrap();
    let c = validate_definition4(&spec, 0.0, &SamplingOptions::default());
    assert!(!c.item('d').unwrap().pass);
}
