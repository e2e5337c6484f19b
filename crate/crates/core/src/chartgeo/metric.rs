use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chart::Chart;
use crate::error::GeoError;
use crate::symexpr::{equivalent, Binding, EquivalenceOptions, EvalError, Expr};

/// Largest dense block of the component matrix that is inverted
/// symbolically. Block-diagonal metrics may have any number of blocks.
pub const MAX_DENSE_BLOCK: usize = 8;

/// Sample points used for the nondegeneracy scan at construction.
const DEGENERACY_SAMPLES: usize = 16;

/// Christoffel symbols of the second kind, indexed `[k][i][j]` for
/// `Γ^k_ij`.
pub type Christoffel = Vec<Vec<Vec<Expr>>>;

/// Symmetric component matrix over a chart.
///
/// `virtual_dim` is a bookkeeping dimension; it equals the number of
/// coordinates unless a derived-fiber annotation lowers it.
#[derive(Debug, Clone)]
pub struct Metric {
    chart: Chart,
    components: Vec<Vec<Expr>>,
    inverse: Vec<Vec<Expr>>,
    virtual_dim: i64,
    signature: Vec<i8>,
    christoffel: OnceLock<Christoffel>,
}

impl Metric {
    pub fn new(chart: Chart, components: Vec<Vec<Expr>>) -> Result<Metric, GeoError> {
        let n = chart.dim();
        if components.len() != n || components.iter().any(|row| row.len() != n) {
            return Err(GeoError::Shape(format!("expected a {n}x{n} component matrix")));
        }
        let mut g: Vec<Vec<Expr>> = components
            .iter()
            .map(|row| row.iter().map(Expr::simplify).collect())
            .collect();

        for row in &g {
            for e in row {
                if let Some(s) = e.free_symbols().into_iter().find(|s| !chart.knows(s)) {
                    return Err(GeoError::UnboundSymbol(s));
                }
            }
        }

        let domain = chart.sample_domain();
        let opts = EquivalenceOptions::default().with_samples(16).with_tol(1e-12);
        for i in 0..n {
            for j in (i + 1)..n {
                if g[i][j] != g[j][i] {
                    let same = equivalent(&g[i][j], &g[j][i], &domain, &opts)
                        .map(|v| v.holds)
                        .unwrap_or(false);
                    if !same {
                        return Err(GeoError::NotSymmetric(i, j));
                    }
                    g[j][i] = g[i][j].clone();
                }
            }
        }

        let inverse = symbolic_inverse(&g)?;
        let signature = scan_nondegenerate(&chart, &g)?;

        Ok(Metric {
            chart,
            components: g,
            inverse,
            virtual_dim: n as i64,
            signature,
            christoffel: OnceLock::new(),
        })
    }

    pub fn diagonal(chart: Chart, diag: Vec<Expr>) -> Result<Metric, GeoError> {
        let n = diag.len();
        let mut g = vec![vec![Expr::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            g[i][i] = d;
        }
        Metric::new(chart, g)
    }

    /// Annotates a virtual dimension, which may be negative but never
    /// exceeds the geometric dimension.
    pub fn with_virtual_dim(mut self, m: i64) -> Result<Metric, GeoError> {
        if m > self.geometric_dim() as i64 {
            return Err(GeoError::Shape(format!(
                "virtual dimension {m} exceeds geometric dimension {}",
                self.geometric_dim()
            )));
        }
        self.virtual_dim = m;
        Ok(self)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coords(&self) -> &[String] {
        self.chart.coords()
    }

    pub fn components(&self) -> &[Vec<Expr>] {
        &self.components
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i][j]
    }

    pub fn inverse(&self) -> &[Vec<Expr>] {
        &self.inverse
    }

    pub fn geometric_dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn virtual_dim(&self) -> i64 {
        self.virtual_dim
    }

    /// Eigenvalue signs at the reference point, positive first.
    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    pub fn signature_counts(&self) -> (usize, usize) {
        let pos = self.signature.iter().filter(|&&s| s > 0).count();
        (pos, self.signature.len() - pos)
    }

    /// True when every off-diagonal component is structurally zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.geometric_dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.components[i][j].is_zero()))
    }

    pub fn numeric(&self, b: &Binding) -> Result<DMatrix<f64>, EvalError> {
        evaluate_matrix(&self.components, b)
    }

    pub(crate) fn christoffel_cache(&self) -> &OnceLock<Christoffel> {
        &self.christoffel
    }
}

pub fn evaluate_matrix(m: &[Vec<Expr>], b: &Binding) -> Result<DMatrix<f64>, EvalError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = DMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out[(i, j)] = e.evaluate(b)?;
        }
    }
    Ok(out)
}

/// Inverse via adjugate over the connected blocks of the nonzero pattern.
fn symbolic_inverse(g: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>, GeoError> {
    let n = g.len();
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for block in nonzero_blocks(g) {
        if block.len() > MAX_DENSE_BLOCK {
            return Err(GeoError::TooLarge { size: block.len(), max: MAX_DENSE_BLOCK });
        }
        let sub: Vec<Vec<Expr>> = block
            .iter()
            .map(|&i| block.iter().map(|&j| g[i][j].clone()).collect())
            .collect();
        let det = determinant(&sub);
        if det.is_zero() {
            return Err(GeoError::DegenerateMetric(format!(
                "determinant of block {block:?} is identically zero"
            )));
        }
        let inv_det = Expr::recip(det);
        if block.len() == 1 {
            inv[block[0]][block[0]] = inv_det;
            continue;
        }
        for a in 0..block.len() {
            for b in a..block.len() {
                let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                let cof = Expr::int(sign) * determinant(&minor(&sub, a, b)) * &inv_det;
                inv[block[a]][block[b]] = cof.clone();
                inv[block[b]][block[a]] = cof;
            }
        }
    }
    Ok(inv)
}

fn nonzero_blocks(g: &[Vec<Expr>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !g[i][j].is_zero() {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => blocks[k].push(i),
            None => {
                roots.push(r);
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Laplace expansion along the sparsest row.
pub(crate) fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => {
            let row = (0..n)
                .max_by_key(|&i| m[i].iter().filter(|e| e.is_zero()).count())
                .unwrap_or(0);
            let mut terms = Vec::new();
            for j in 0..n {
                if m[row][j].is_zero() {
                    continue;
                }
                let sign = if (row + j) % 2 == 0 { 1 } else { -1 };
                terms.push(Expr::int(sign) * &m[row][j] * determinant(&minor(m, row, j)));
            }
            Expr::add(terms)
        }
    }
}

/// Checks `det(g) != 0` at the midpoint and at seeded samples; returns the
/// signature at the first valid point.
fn scan_nondegenerate(chart: &Chart, g: &[Vec<Expr>]) -> Result<Vec<i8>, GeoError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut points = vec![chart.midpoint()];
    points.extend((0..DEGENERACY_SAMPLES).map(|_| chart.sample(&mut rng)));

    let mut signature = None;
    let mut last_err = None;
    for p in &points {
        let m = match evaluate_matrix(g, p) {
            Ok(m) => m,
            Err(EvalError::Domain(msg)) => {
                last_err = Some(msg);
                continue;
            }
            Err(EvalError::UnboundSymbol(s)) => return Err(GeoError::UnboundSymbol(s)),
        };
        if m.nrows() == 0 {
            return Ok(Vec::new());
        }
        let scale: f64 = m.row_iter().map(|r| r.norm()).product();
        let det = m.determinant();
        // negated so a NaN determinant is also rejected
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(det.abs() > 1e-12 * scale) {
            return Err(GeoError::DegenerateMetric(format!("det(g) = {det:e} at {:?}", p)));
        }
        if signature.is_none() {
            signature = Some(signature_of(&m));
        }
    }
    signature.ok_or_else(|| {
        GeoError::Domain(format!(
            "metric is undefined at every sampled point ({})",
            last_err.unwrap_or_default()
        ))
    })
}

fn signature_of(m: &DMatrix<f64>) -> Vec<i8> {
    let sym = (m + m.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig.into_iter().map(|v| if v > 0.0 { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::super::chart::Interval;
    use super::*;

    fn plane_polar() -> Metric {
        let chart = Chart::new([
            ("r", Interval::new(0.5, 3.0).unwrap()),
            ("theta", Interval::new(0.0, 6.0).unwrap()),
        ])
        .unwrap();
        let r = Expr::symbol("r");
        Metric::diagonal(chart, vec![Expr::one(), Expr::powi(r, 2)]).unwrap()
    }

    #[test]
    fn diagonal_inverse() {
        let g = plane_polar();
        assert_eq!(g.inverse()[1][1], Expr::powi(Expr::symbol("r"), -2));
        assert_eq!(g.signature(), &[1, 1]);
        assert_eq!(g.virtual_dim(), 2);
    }

    #[test]
    fn dense_inverse_matches_numeric() {
        let chart = Chart::new([
            ("x", Interval::new(1.0, 2.0).unwrap()),
            ("y", Interval::new(1.0, 2.0).unwrap()),
            ("z", Interval::new(1.0, 2.0).unwrap()),
        ])
        .unwrap();
        let (x, y, z) = (Expr::symbol("x"), Expr::symbol("y"), Expr::symbol("z"));
        let g = vec![
            vec![Expr::int(3) + &x, y.clone(), Expr::zero()],
            vec![y.clone(), Expr::int(4), z.clone()],
            vec![Expr::zero(), z.clone(), Expr::int(5) + &y],
        ];
        let m = Metric::new(chart, g).unwrap();
        let b = Binding::new().with("x", 1.3).with("y", 1.7).with("z", 1.1);
        let num = m.numeric(&b).unwrap().try_inverse().unwrap();
        let sym = evaluate_matrix(m.inverse(), &b).unwrap();
        assert!((num - sym).abs().max() < 1e-12);
    }

    #[test]
    fn degenerate_and_asymmetric_metrics_are_rejected() {
        let chart = Chart::new([
            ("x", Interval::new(1.0, 2.0).unwrap()),
            ("y", Interval::new(1.0, 2.0).unwrap()),
        ])
        .unwrap();
        let x = Expr::symbol("x");
        let degenerate = vec![vec![x.clone(), x.clone()], vec![x.clone(), x.clone()]];
        assert!(matches!(
            Metric::new(chart.clone(), degenerate),
            Err(GeoError::DegenerateMetric(_))
        ));
        let asym = vec![vec![Expr::one(), x.clone()], vec![Expr::zero(), Expr::one()]];
        assert_eq!(Metric::new(chart.clone(), asym).unwrap_err(), GeoError::NotSymmetric(0, 1));
        let unbound = vec![vec![Expr::symbol("q"), Expr::zero()], vec![Expr::zero(), Expr::one()]];
        assert_eq!(
            Metric::new(chart, unbound).unwrap_err(),
            GeoError::UnboundSymbol("q".into())
        );
    }

    #[test]
    fn lorentzian_signature() {
        let chart = Chart::new([
            ("t", Interval::new(-1.0, 1.0).unwrap()),
            ("x", Interval::new(-1.0, 1.0).unwrap()),
        ])
        .unwrap();
        let g = Metric::diagonal(chart, vec![Expr::int(-1), Expr::one()]).unwrap();
        assert_eq!(g.signature(), &[1, -1]);
        assert_eq!(g.signature_counts(), (1, 1));
    }
}
