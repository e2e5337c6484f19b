//! Finite-difference curvature, computed from hand-written metric closures
//! so that nothing here depends on the symbolic engine.
#![allow(dead_code)]

use nalgebra::DMatrix;

pub const H: f64 = 1e-4;

pub type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64>;

pub struct Numeric {
    /// `gamma[k][i][j]`
    pub gamma: Vec<Vec<Vec<f64>>>,
    /// `riemann[l][i][j][k]`
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, d) in moves {
        y[i] += d;
    }
    y
}

/// `∂_a g` by central differences.
fn d1(g: &MetricFn, x: &[f64], a: usize) -> DMatrix<f64> {
    (g(&shifted(x, &[(a, H)])) - g(&shifted(x, &[(a, -H)]))) / (2.0 * H)
}

/// `∂_a ∂_b g` by central differences.
fn d2(g: &MetricFn, x: &[f64], a: usize, b: usize) -> DMatrix<f64> {
    if a == b {
        (g(&shifted(x, &[(a, H)])) - g(x) * 2.0 + g(&shifted(x, &[(a, -H)]))) / (H * H)
    } else {
        (g(&shifted(x, &[(a, H), (b, H)])) - g(&shifted(x, &[(a, H), (b, -H)]))
            - g(&shifted(x, &[(a, -H), (b, H)]))
            + g(&shifted(x, &[(a, -H), (b, -H)])))
            / (4.0 * H * H)
    }
}

/// Christoffel symbols, Riemann, Ricci and scalar curvature at `x`, with the
/// conventions
/// `Γ^k_ij = ½g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
/// `R^l_ijk = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_imΓ^m_jk − Γ^l_jmΓ^m_ik`,
/// `Ric_jk = R^i_ijk`.
pub fn curvature(g: &MetricFn, x: &[f64]) -> Numeric {
    let n = x.len();
    let g0 = g(x);
    let inv = g0.clone().try_inverse().expect("nondegenerate metric");
    let dg: Vec<DMatrix<f64>> = (0..n).map(|a| d1(g, x, a)).collect();
    let ddg: Vec<Vec<DMatrix<f64>>> = (0..n).map(|a| (0..n).map(|b| d2(g, x, a, b)).collect()).collect();
    // ∂_a g^{-1} = −g^{-1} (∂_a g) g^{-1}
    let dinv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&inv * d * &inv)).collect();

    // lowered[l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let lowered = |l: usize, i: usize, j: usize| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
    let dlowered =
        |m: usize, l: usize, i: usize, j: usize| 0.5 * (ddg[m][i][(j, l)] + ddg[m][j][(i, l)] - ddg[m][l][(i, j)]);

    let gamma: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|l| inv[(k, l)] * lowered(l, i, j)).sum()).collect())
                .collect()
        })
        .collect();
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let dgamma = |m: usize, k: usize, i: usize, j: usize| -> f64 {
        (0..n)
            .map(|l| dinv[m][(k, l)] * lowered(l, i, j) + inv[(k, l)] * dlowered(m, l, i, j))
            .sum()
    };
    let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma(i, l, j, k) - dgamma(j, l, i, k);
                    for m in 0..n {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    riemann[l][i][j][k] = v;
                }
            }
        }
    }
    let ricci = DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| riemann[i][i][j][k]).sum());
    let scalar = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| inv[(j, k)] * ricci[(j, k)]).sum();
    Numeric { gamma, riemann, ricci, scalar }
}

pub fn diag(entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

/// `|a − b| / (1 + max(|a|, |b|))`, written out independently.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
