use super::metric::{Christoffel, Metric};
use crate::error::GeoError;
use crate::symexpr::Expr;

/// `R^l_ijk`, indexed `[l][i][j][k]`.
pub type Riemann = Vec<Vec<Vec<Vec<Expr>>>>;

/// Christoffel symbols, Riemann and Ricci tensors and scalar curvature of
/// one metric.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    pub ricci: Vec<Vec<Expr>>,
    pub scalar: Expr,
}

impl CurvatureBundle {
    pub fn compute(g: &Metric) -> CurvatureBundle {
        let christoffel = christoffel(g).clone();
        let riemann = riemann(g);
        let n = g.geometric_dim();
        // contract the full tensor rather than reuse `ricci` so the bundle is
        // internally consistent by construction
        let ricci: Vec<Vec<Expr>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| Expr::add((0..n).map(|i| riemann[i][i][j][k].clone()).collect()))
                    .collect()
            })
            .collect();
        let scalar = trace(g, &ricci);
        CurvatureBundle { christoffel, riemann, ricci, scalar }
    }
}

fn mul_nonzero(a: &Expr, b: &Expr) -> Option<Expr> {
    if a.is_zero() || b.is_zero() {
        None
    } else {
        Some(a * b)
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`, cached on the metric.
pub fn christoffel(g: &Metric) -> &Christoffel {
    g.christoffel_cache().get_or_init(|| {
        let n = g.geometric_dim();
        let coords = g.coords();
        // dg[l][i][j] = ∂_l g_ij
        let dg: Vec<Vec<Vec<Expr>>> = coords
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| (0..n).map(|j| g.component(i, j).differentiate(c)).collect())
                    .collect()
            })
            .collect();
        let inv = g.inverse();
        let half = Expr::ratio(1, 2).expect("nonzero denominator");
        let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                // lowered symbol Γ_lij
                let lowered: Vec<Expr> = (0..n)
                    .map(|l| dg[i][j][l].clone() + dg[j][i][l].clone() - dg[l][i][j].clone())
                    .collect();
                for k in 0..n {
                    let terms: Vec<Expr> = (0..n)
                        .filter_map(|l| mul_nonzero(&inv[k][l], &lowered[l]))
                        .collect();
                    let v = &half * Expr::add(terms);
                    gamma[k][i][j] = v.clone();
                    gamma[k][j][i] = v;
                }
            }
        }
        gamma
    })
}

/// `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`.
pub fn riemann(g: &Metric) -> Riemann {
    let n = g.geometric_dim();
    let gamma = christoffel(g);
    let coords = g.coords();
    let mut r = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let mut terms = vec![
                        gamma[l][j][k].differentiate(&coords[i]),
                        -gamma[l][i][k].differentiate(&coords[j]),
                    ];
                    for m in 0..n {
                        terms.extend(mul_nonzero(&gamma[l][i][m], &gamma[m][j][k]));
                        terms.extend(mul_nonzero(&gamma[l][j][m], &gamma[m][i][k]).map(Expr::neg));
                    }
                    let v = Expr::add(terms);
                    r[l][j][i][k] = -&v;
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    r
}

/// `Ric_jk = R^i_ijk`, contracted directly from the Christoffel symbols.
pub fn ricci(g: &Metric) -> Vec<Vec<Expr>> {
    let n = g.geometric_dim();
    let gamma = christoffel(g);
    let coords = g.coords();
    let mut ric = vec![vec![Expr::zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            let mut terms = Vec::new();
            for i in 0..n {
                terms.push(gamma[i][j][k].differentiate(&coords[i]));
                terms.push(-gamma[i][i][k].differentiate(&coords[j]));
                for m in 0..n {
                    terms.extend(mul_nonzero(&gamma[i][i][m], &gamma[m][j][k]));
                    terms.extend(mul_nonzero(&gamma[i][j][m], &gamma[m][i][k]).map(Expr::neg));
                }
            }
            ric[j][k] = Expr::add(terms);
        }
    }
    ric
}

/// `R = g^{jk} Ric_jk`.
pub fn scalar_curvature(g: &Metric) -> Expr {
    trace(g, &ricci(g))
}

/// `g^{ij} T_ij` for a rank-2 covariant tensor.
pub fn trace(g: &Metric, t: &[Vec<Expr>]) -> Expr {
    let n = g.geometric_dim();
    let inv = g.inverse();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            terms.extend(mul_nonzero(&inv[i][j], &t[i][j]));
        }
    }
    Expr::add(terms)
}

fn check_scalar(g: &Metric, f: &Expr) -> Result<(), GeoError> {
    match f.free_symbols().into_iter().find(|s| !g.chart().knows(s)) {
        Some(s) => Err(GeoError::UnboundSymbol(s)),
        None => Ok(()),
    }
}

/// `(∇²f)_ij = ∂_i∂_j f − Γ^k_ij ∂_k f`.
pub fn hessian(g: &Metric, f: &Expr) -> Result<Vec<Vec<Expr>>, GeoError> {
    check_scalar(g, f)?;
    let n = g.geometric_dim();
    let coords = g.coords();
    let gamma = christoffel(g);
    let df: Vec<Expr> = coords.iter().map(|c| f.differentiate(c)).collect();
    let mut h = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut terms = vec![df[i].differentiate(&coords[j])];
            for k in 0..n {
                terms.extend(mul_nonzero(&gamma[k][i][j], &df[k]).map(Expr::neg));
            }
            let v = Expr::add(terms);
            h[j][i] = v.clone();
            h[i][j] = v;
        }
    }
    Ok(h)
}

/// `|∇f|² = g^{ij} ∂_i f ∂_j f`.
pub fn gradient_norm_sq(g: &Metric, f: &Expr) -> Result<Expr, GeoError> {
    check_scalar(g, f)?;
    let df: Vec<Expr> = g.coords().iter().map(|c| f.differentiate(c)).collect();
    let outer: Vec<Vec<Expr>> = df
        .iter()
        .map(|a| df.iter().map(|b| mul_nonzero(a, b).unwrap_or_else(Expr::zero)).collect())
        .collect();
    Ok(trace(g, &outer))
}

/// `Δf = g^{ij}(∇²f)_ij`; positive on `x²` in Euclidean space.
pub fn laplacian(g: &Metric, f: &Expr) -> Result<Expr, GeoError> {
    Ok(trace(g, &hessian(g, f)?))
}

#[cfg(test)]
mod tests {
    use super::super::chart::{Chart, Interval};
    use super::*;
    use crate::symexpr::{equivalent, EquivalenceOptions};

    fn sphere() -> Metric {
        let chart = Chart::new([
            ("theta", Interval::new(0.3, 2.8).unwrap()),
            ("phi", Interval::new(0.0, 6.0).unwrap()),
        ])
        .unwrap();
        let th = Expr::symbol("theta");
        Metric::diagonal(chart, vec![Expr::one(), Expr::powi(Expr::sin(th), 2)]).unwrap()
    }

    fn same(g: &Metric, a: &Expr, b: &Expr) -> bool {
        equivalent(a, b, &g.chart().sample_domain(), &EquivalenceOptions::default())
            .unwrap()
            .holds
    }

    #[test]
    fn sphere_christoffel_and_ricci() {
        let g = sphere();
        let th = Expr::symbol("theta");
        let gamma = christoffel(&g);
        assert!(same(&g, &gamma[0][1][1], &-(Expr::sin(th.clone()) * Expr::cos(th.clone()))));
        assert!(same(&g, &gamma[1][0][1], &(Expr::cos(th.clone()) / Expr::sin(th.clone()))));
        assert!(gamma[0][0][0].is_zero());
        let ric = ricci(&g);
        for i in 0..2 {
            for j in 0..2 {
                assert!(same(&g, &ric[i][j], g.component(i, j)));
            }
        }
        assert!(same(&g, &scalar_curvature(&g), &Expr::int(2)));
    }

    #[test]
    fn bundle_contraction_matches_direct_ricci() {
        let g = sphere();
        let b = CurvatureBundle::compute(&g);
        let direct = ricci(&g);
        for i in 0..2 {
            for j in 0..2 {
                assert!(same(&g, &b.ricci[i][j], &direct[i][j]));
            }
        }
        assert!(same(&g, &b.scalar, &Expr::int(2)));
    }

    #[test]
    fn sphere_hessian_and_laplacian() {
        let g = sphere();
        let th = Expr::symbol("theta");
        let f = Expr::cos(th.clone());
        let h = hessian(&g, &f).unwrap();
        assert!(same(&g, &h[0][0], &-Expr::cos(th.clone())));
        let want = -(Expr::cos(th.clone()) * Expr::powi(Expr::sin(th.clone()), 2));
        assert!(same(&g, &h[1][1], &want));
        assert!(h[0][1].is_zero());
        let lap = laplacian(&g, &f).unwrap();
        assert!(same(&g, &lap, &(Expr::int(-2) * Expr::cos(th))));
    }

    #[test]
    fn euclidean_operators() {
        let chart = Chart::new([
            ("x", Interval::new(-2.0, 2.0).unwrap()),
            ("y", Interval::new(-2.0, 2.0).unwrap()),
        ])
        .unwrap();
        let g = Metric::diagonal(chart, vec![Expr::one(), Expr::one()]).unwrap();
        let (x, y) = (Expr::symbol("x"), Expr::symbol("y"));
        let f = Expr::powi(x.clone(), 2) + Expr::powi(y, 2);
        assert_eq!(laplacian(&g, &f).unwrap(), Expr::int(4));
        assert_eq!(gradient_norm_sq(&g, &x).unwrap(), Expr::one());
        assert_eq!(
            hessian(&g, &Expr::symbol("q")).unwrap_err(),
            GeoError::UnboundSymbol("q".into())
        );
    }
}
