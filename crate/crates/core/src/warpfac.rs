//! Product metrics, derived fibers and warped products.
//!
//! A derived fiber is flat `R^d` with metric `-δ` plus an obstruction bundle
//! of rank `r`; only the rank enters, through the virtual dimension
//! `d - r`. All curvature formulas use the positive underlying `d`.

use serde::Serialize;

use crate::chartgeo::{gradient_norm_sq, hessian, laplacian, ricci, Chart, Interval, Metric};
use crate::error::{GeoError, WarpError};
use crate::symexpr::{deviation, Binding, EvalError, Expr};

/// Points at which `f > 0` is checked when a spec is built.
const POSITIVITY_SAMPLES: usize = 32;

/// Block-diagonal metric on the concatenated chart.
pub fn product_metric(factors: &[Metric]) -> Result<Metric, GeoError> {
    if factors.is_empty() {
        return Err(GeoError::Shape("product of an empty list of factors".into()));
    }
    let chart = Chart::concat(factors.iter().map(Metric::chart))?;
    let blocks: Vec<&[Vec<Expr>]> = factors.iter().map(Metric::components).collect();
    let virtual_dim = factors.iter().map(Metric::virtual_dim).sum();
    Metric::new(chart, block_diagonal(&blocks))?.with_virtual_dim(virtual_dim)
}

pub(crate) fn block_diagonal(blocks: &[&[Vec<Expr>]]) -> Vec<Vec<Expr>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut g = vec![vec![Expr::zero(); n]; n];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                g[off + i][off + j] = e.clone();
            }
        }
        off += b.len();
    }
    g
}

/// Flat `R^d` with metric `sign·δ` and an obstruction bundle of rank
/// `obstruction_rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFiber {
    underlying_dim: usize,
    obstruction_rank: usize,
    chart: Chart,
    sign: i8,
}

/// Fiber over `R^d` with coordinates `u1..ud` and metric `-δ`.
pub fn derived_fiber(d: usize, rank: usize) -> Result<DerivedFiber, WarpError> {
    let coords: Vec<String> = (1..=d).map(|i| format!("u{i}")).collect();
    DerivedFiber::new(d, rank, coords)
}

impl DerivedFiber {
    pub fn new(d: usize, rank: usize, coords: Vec<String>) -> Result<DerivedFiber, WarpError> {
        if d == 0 {
            return Err(WarpError::InvalidFiber("underlying dimension must be positive".into()));
        }
        if rank <= d {
            return Err(WarpError::RankTooSmall { dim: d, rank });
        }
        if coords.len() != d {
            return Err(WarpError::InvalidFiber(format!(
                "expected {d} fiber coordinates, got {}",
                coords.len()
            )));
        }
        let iv = Interval::new(-1.0, 1.0)?;
        let chart = Chart::new(coords.into_iter().map(|c| (c, iv)))?;
        Ok(DerivedFiber { underlying_dim: d, obstruction_rank: rank, chart, sign: -1 })
    }

    /// Replaces the `-δ` metric by `+δ` (`sign = 1`) or restores it.
    pub fn with_sign(mut self, sign: i8) -> Result<DerivedFiber, WarpError> {
        if sign != 1 && sign != -1 {
            return Err(WarpError::InvalidFiber(format!("sign must be ±1, got {sign}")));
        }
        self.sign = sign;
        Ok(self)
    }

    pub fn underlying_dim(&self) -> usize {
        self.underlying_dim
    }

    pub fn obstruction_rank(&self) -> usize {
        self.obstruction_rank
    }

    pub fn virtual_dim(&self) -> i64 {
        self.underlying_dim as i64 - self.obstruction_rank as i64
    }

    /// `m = -d`, i.e. rank 2d.
    pub fn is_special(&self) -> bool {
        self.obstruction_rank == 2 * self.underlying_dim
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `sign·Σ vⁱwⁱ`.
    pub fn inner(&self, v: &[f64], w: &[f64]) -> f64 {
        f64::from(self.sign) * v.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Fiber metric `g̈ = sign·δ` on the underlying chart.
    pub fn metric(&self) -> Result<Metric, GeoError> {
        let diag = vec![Expr::int(self.sign.into()); self.underlying_dim];
        // the virtual dimension is recorded on the warped metric; a bare
        // fiber keeps its geometric one so it stays usable as a factor
        Metric::diagonal(self.chart.clone(), diag)
    }
}

/// `(B' × B̃) ×_f F` with `f = f' + f̃`.
#[derive(Debug, Clone)]
pub struct WarpedSpec {
    base_prime: Metric,
    base_tilde: Metric,
    fiber: DerivedFiber,
    f_prime: Expr,
    f_tilde: Expr,
}

impl WarpedSpec {
    pub fn new(
        base_prime: Metric,
        base_tilde: Metric,
        fiber: DerivedFiber,
        f_prime: Expr,
        f_tilde: Expr,
    ) -> Result<WarpedSpec, WarpError> {
        let chart = Chart::concat([base_prime.chart(), base_tilde.chart(), fiber.chart()])?;
        for (which, f, owner) in [("f'", &f_prime, &base_prime), ("f~", &f_tilde, &base_tilde)] {
            if let Some(s) = f.free_symbols().into_iter().find(|s| !owner.chart().knows(s)) {
                return Err(WarpError::WarpSymbols { which, symbol: s });
            }
        }
        let spec = WarpedSpec {
            base_prime,
            base_tilde,
            fiber,
            f_prime: f_prime.simplify(),
            f_tilde: f_tilde.simplify(),
        };
        let f = spec.f();
        let mut points = vec![chart.midpoint()];
        points.extend(chart.sample_points(POSITIVITY_SAMPLES, 0));
        for p in &points {
            match f.evaluate(p) {
                Ok(v) if v <= 0.0 => return Err(WarpError::NonPositiveWarp { value: v }),
                Ok(_) | Err(EvalError::Domain(_)) => {}
                Err(EvalError::UnboundSymbol(s)) => return Err(GeoError::UnboundSymbol(s).into()),
            }
        }
        Ok(spec)
    }

    pub fn base_prime(&self) -> &Metric {
        &self.base_prime
    }

    pub fn base_tilde(&self) -> &Metric {
        &self.base_tilde
    }

    pub fn fiber(&self) -> &DerivedFiber {
        &self.fiber
    }

    pub fn f_prime(&self) -> &Expr {
        &self.f_prime
    }

    pub fn f_tilde(&self) -> &Expr {
        &self.f_tilde
    }

    /// `f = f' + f̃`.
    pub fn f(&self) -> Expr {
        &self.f_prime + &self.f_tilde
    }

    pub fn n_prime(&self) -> usize {
        self.base_prime.geometric_dim()
    }

    pub fn n_tilde(&self) -> usize {
        self.base_tilde.geometric_dim()
    }

    /// `n = n' + ñ`.
    pub fn n(&self) -> usize {
        self.n_prime() + self.n_tilde()
    }

    pub fn d(&self) -> usize {
        self.fiber.underlying_dim()
    }

    /// `n + m`.
    pub fn virtual_total(&self) -> i64 {
        self.n() as i64 + self.fiber.virtual_dim()
    }

    pub fn base(&self) -> Result<Metric, GeoError> {
        product_metric(&[self.base_prime.clone(), self.base_tilde.clone()])
    }

    /// Chart of the assembled metric: `B'`, then `B̃`, then the fiber.
    pub fn chart(&self) -> Result<Chart, GeoError> {
        Chart::concat([self.base_prime.chart(), self.base_tilde.chart(), self.fiber.chart()])
    }
}

/// `ḡ = g' ⊕ g̃ ⊕ f²·g̈` with virtual dimension `n + m`.
pub fn warped_metric(spec: &WarpedSpec) -> Result<Metric, WarpError> {
    let f2 = Expr::powi(spec.f(), 2);
    let fiber = spec.fiber.metric()?;
    let scaled: Vec<Vec<Expr>> = fiber
        .components()
        .iter()
        .map(|row| row.iter().map(|e| e * &f2).collect())
        .collect();
    let g = block_diagonal(&[spec.base_prime.components(), spec.base_tilde.components(), &scaled]);
    let m = Metric::new(spec.chart()?, g)?.with_virtual_dim(spec.virtual_total())?;
    Ok(m)
}

/// The five Ricci blocks of a warped product, in chart order
/// `B'`, `B̃`, `F`.
#[derive(Debug, Clone)]
pub struct RicciBlocks {
    pub prime: Vec<Vec<Expr>>,
    pub tilde: Vec<Vec<Expr>>,
    pub fiber: Vec<Vec<Expr>>,
    /// `(B', B̃)`, `n' × ñ`.
    pub prime_tilde: Vec<Vec<Expr>>,
    /// `(B, F)`, `n × d`.
    pub base_fiber: Vec<Vec<Expr>>,
}

impl RicciBlocks {
    fn from_full(spec: &WarpedSpec, ric: &[Vec<Expr>]) -> RicciBlocks {
        let (np, nt, d) = (spec.n_prime(), spec.n_tilde(), spec.d());
        let n = np + nt;
        let slice = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> Vec<Vec<Expr>> {
            rows.map(|i| cols.clone().map(|j| ric[i][j].clone()).collect()).collect()
        };
        RicciBlocks {
            prime: slice(0..np, 0..np),
            tilde: slice(np..n, np..n),
            fiber: slice(n..n + d, n..n + d),
            prime_tilde: slice(0..np, np..n),
            base_fiber: slice(0..n, n..n + d),
        }
    }

    /// Mixed-block entries.
    pub fn mixed(&self) -> impl Iterator<Item = &Expr> {
        self.prime_tilde.iter().chain(&self.base_fiber).flatten()
    }
}

/// `f* = Δ'f'/f + (d−1)(|∇'f'|² + |∇̃f̃|²)/f²`.
pub fn f_star(spec: &WarpedSpec) -> Result<Expr, WarpError> {
    let f = spec.f();
    let d = spec.d() as i64;
    let lap = laplacian(&spec.base_prime, &spec.f_prime)?;
    let grad = gradient_norm_sq(&spec.base_prime, &spec.f_prime)?
        + gradient_norm_sq(&spec.base_tilde, &spec.f_tilde)?;
    Ok(lap / &f + Expr::int(d - 1) * grad / Expr::powi(f, 2))
}

/// Ricci blocks from the decomposition formula:
///
/// - `(B', B')`: `Ric' − (d/f)∇'²f'`
/// - `(B̃, B̃)`: `R̃ic`
/// - `(F, F)`: `R̈ic − f²·g̈·f*`, with `R̈ic = 0`
/// - mixed blocks: `0`
///
/// The formula carries no `f̃` Hessian or Laplacian terms; it matches the
/// assembled metric only when `∇̃²f̃ = 0`.
pub fn block_ricci(spec: &WarpedSpec) -> Result<RicciBlocks, WarpError> {
    let d = spec.d();
    if d < 2 {
        return Err(WarpError::FiberTooSmall(d));
    }
    let f = spec.f();
    let coef = Expr::int(d as i64) / &f;
    let ric_p = ricci(&spec.base_prime);
    let hess_p = hessian(&spec.base_prime, &spec.f_prime)?;
    let prime = ric_p
        .iter()
        .zip(&hess_p)
        .map(|(r, h)| r.iter().zip(h).map(|(a, b)| a - &coef * b).collect())
        .collect();
    let tilde = ricci(&spec.base_tilde);
    let fs = f_star(spec)?;
    let scale = -(Expr::powi(f, 2) * fs);
    let sign = Expr::int(spec.fiber.sign().into());
    let fiber = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { &sign * &scale } else { Expr::zero() })
                .collect()
        })
        .collect();
    let (np, nt) = (spec.n_prime(), spec.n_tilde());
    Ok(RicciBlocks {
        prime,
        tilde,
        fiber,
        prime_tilde: vec![vec![Expr::zero(); nt]; np],
        base_fiber: vec![vec![Expr::zero(); d]; np + nt],
    })
}

/// Ricci of the assembled warped metric, cut into the same blocks.
pub fn direct_blocks(spec: &WarpedSpec) -> Result<RicciBlocks, WarpError> {
    let g = warped_metric(spec)?;
    Ok(RicciBlocks::from_full(spec, &ricci(&g)))
}

/// Hessian of `f̃` on `B̃`; the decomposition formula assumes it vanishes.
pub fn tilde_hessian(spec: &WarpedSpec) -> Result<Vec<Vec<Expr>>, WarpError> {
    Ok(hessian(&spec.base_tilde, &spec.f_tilde)?)
}

/// Sampled agreement between two block sets.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BlockComparison {
    pub samples: usize,
    pub prime: f64,
    pub tilde: f64,
    pub fiber: f64,
    /// Largest `|entry|` over the mixed blocks of the first argument.
    pub mixed_formula: f64,
    /// Largest `|entry|` over the mixed blocks of the second argument.
    pub mixed_direct: f64,
}

impl BlockComparison {
    pub fn max_block_deviation(&self) -> f64 {
        self.prime.max(self.tilde).max(self.fiber)
    }

    pub fn agrees(&self, tol: f64, mixed_tol: f64) -> bool {
        self.max_block_deviation() <= tol
            && self.mixed_formula <= mixed_tol
            && self.mixed_direct <= mixed_tol
    }
}

/// Evaluates both block sets at `samples` seeded points of `chart`;
/// points outside the domain of either side are skipped.
pub fn compare_blocks(
    formula: &RicciBlocks,
    direct: &RicciBlocks,
    chart: &Chart,
    samples: usize,
    seed: u64,
) -> Result<BlockComparison, GeoError> {
    let mut out = BlockComparison {
        samples: 0,
        prime: 0.0,
        tilde: 0.0,
        fiber: 0.0,
        mixed_formula: 0.0,
        mixed_direct: 0.0,
    };
    for p in chart.sample_points(samples, seed) {
        let Some(vals) = eval_blocks(formula, direct, &p)? else {
            continue;
        };
        out.samples += 1;
        out.prime = out.prime.max(vals[0]);
        out.tilde = out.tilde.max(vals[1]);
        out.fiber = out.fiber.max(vals[2]);
        out.mixed_formula = out.mixed_formula.max(vals[3]);
        out.mixed_direct = out.mixed_direct.max(vals[4]);
    }
    if out.samples == 0 {
        return Err(GeoError::NoValidSamples);
    }
    Ok(out)
}

fn eval_blocks(a: &RicciBlocks, b: &RicciBlocks, p: &Binding) -> Result<Option<[f64; 5]>, GeoError> {
    fn dev(x: &[Vec<Expr>], y: &[Vec<Expr>], p: &Binding) -> Result<f64, EvalError> {
        let mut worst = 0.0f64;
        for (rx, ry) in x.iter().zip(y) {
            for (ex, ey) in rx.iter().zip(ry) {
                worst = worst.max(deviation(ex.evaluate(p)?, ey.evaluate(p)?));
            }
        }
        Ok(worst)
    }
    fn abs_max<'a>(it: impl Iterator<Item = &'a Expr>, p: &Binding) -> Result<f64, EvalError> {
        let mut worst = 0.0f64;
        for e in it {
            worst = worst.max(e.evaluate(p)?.abs());
        }
        Ok(worst)
    }
    let res = (|| -> Result<[f64; 5], EvalError> {
        Ok([
            dev(&a.prime, &b.prime, p)?,
            dev(&a.tilde, &b.tilde, p)?,
            dev(&a.fiber, &b.fiber, p)?,
            abs_max(a.mixed(), p)?,
            abs_max(b.mixed(), p)?,
        ])
    })();
    match res {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::Domain(_)) => Ok(None),
        Err(EvalError::UnboundSymbol(s)) => Err(GeoError::UnboundSymbol(s)),
    }
}
