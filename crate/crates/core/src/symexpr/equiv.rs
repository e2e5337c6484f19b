use std::collections::BTreeMap;

use rand::distributions::Open01;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{Binding, EvalError};
use super::expr::Expr;
use crate::error::SymError;

/// Per-symbol sampling intervals plus fixed parameter values.
#[derive(Debug, Clone, Default)]
pub struct SampleDomain {
    intervals: BTreeMap<String, (f64, f64)>,
    fixed: Binding,
}

impl SampleDomain {
    pub fn new() -> SampleDomain {
        SampleDomain::default()
    }

    /// # Panics
    /// If the interval is not finite with positive length.
    pub fn interval(mut self, name: impl Into<String>, lo: f64, hi: f64) -> SampleDomain {
        assert!(lo.is_finite() && hi.is_finite() && hi > lo, "invalid sampling interval");
        self.intervals.insert(name.into(), (lo, hi));
        self
    }

    pub fn fixed(mut self, name: impl Into<String>, value: f64) -> SampleDomain {
        self.fixed.set(name, value);
        self
    }

    pub fn with_fixed(mut self, b: &Binding) -> SampleDomain {
        self.fixed = self.fixed.merged(b);
        self
    }

    /// Draws one point from the open box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Binding {
        let mut b = self.fixed.clone();
        for (name, &(lo, hi)) in &self.intervals {
            let u: f64 = rng.sample(Open01);
            b.set(name.clone(), lo + (hi - lo) * u);
        }
        b
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EquivalenceOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions { samples: 100, tol: 1e-9, seed: 0 }
    }
}

impl EquivalenceOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Equivalence {
    pub holds: bool,
    /// Points where both sides evaluated.
    pub checked: usize,
    /// Points where both sides were out of domain.
    pub skipped: usize,
    /// Points where exactly one side was out of domain.
    pub one_sided: usize,
    /// Largest `|a - b| / (1 + max(|a|, |b|))` over checked points.
    pub max_deviation: f64,
}

/// Relative deviation used by every sampled comparison in the crate.
pub fn deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Compares `a` and `b` at `opts.samples` seeded points of `domain`.
///
/// The verdict holds iff every point where both sides evaluate satisfies
/// `|a - b| <= tol * (1 + max(|a|, |b|))` and no point is in the domain of
/// only one side.
pub fn equivalent(
    a: &Expr,
    b: &Expr,
    domain: &SampleDomain,
    opts: &EquivalenceOptions,
) -> Result<Equivalence, SymError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Equivalence {
        holds: true,
        checked: 0,
        skipped: 0,
        one_sided: 0,
        max_deviation: 0.0,
    };
    for _ in 0..opts.samples.max(1) {
        let point = domain.sample(&mut rng);
        let va = eval_or_domain(a, &point)?;
        let vb = eval_or_domain(b, &point)?;
        match (va, vb) {
            (Some(x), Some(y)) => {
                out.checked += 1;
                let d = deviation(x, y);
                out.max_deviation = out.max_deviation.max(d);
                if d > opts.tol {
                    out.holds = false;
                }
            }
            (None, None) => out.skipped += 1,
            _ => {
                out.one_sided += 1;
                out.holds = false;
            }
        }
    }
    if out.checked == 0 && out.one_sided == 0 {
        return Err(SymError::NoValidSamples);
    }
    Ok(out)
}

fn eval_or_domain(e: &Expr, b: &Binding) -> Result<Option<f64>, SymError> {
    match e.evaluate(b) {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::Domain(_)) => Ok(None),
        Err(EvalError::UnboundSymbol(s)) => Err(SymError::UnboundSymbol(s)),
    }
}
