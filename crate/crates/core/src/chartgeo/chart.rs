use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeoError;
use crate::symexpr::{Binding, SampleDomain};

/// Finite sampling interval with positive length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, GeoError> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(GeoError::InvalidChart(format!("interval [{lo}, {hi}] is empty or unbounded")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Ordered coordinate names with a sampling interval each, plus fixed
/// parameter values (for example a mass `M`) that every evaluation sees.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    intervals: Vec<Interval>,
    params: Binding,
}

impl Chart {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = (S, Interval)>) -> Result<Chart, GeoError> {
        let (coords, intervals): (Vec<String>, Vec<Interval>) =
            coords.into_iter().map(|(s, i)| (s.into(), i)).unzip();
        let mut seen = BTreeSet::new();
        for c in &coords {
            if !seen.insert(c.as_str()) {
                return Err(GeoError::InvalidChart(format!("duplicate coordinate `{c}`")));
            }
        }
        for i in &intervals {
            Interval::new(i.lo, i.hi)?;
        }
        Ok(Chart { coords, intervals, params: Binding::new() })
    }

    pub fn with_params(mut self, params: Binding) -> Result<Chart, GeoError> {
        if let Some((name, _)) = params.iter().find(|(n, _)| self.coords.iter().any(|c| c == n)) {
            return Err(GeoError::SymbolCollision(name.to_string()));
        }
        self.params = params;
        Ok(self)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn params(&self) -> &Binding {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// True if `name` is a coordinate or a fixed parameter.
    pub fn knows(&self, name: &str) -> bool {
        self.index_of(name).is_some() || self.params.contains(name)
    }

    pub fn sample_domain(&self) -> SampleDomain {
        self.coords
            .iter()
            .zip(&self.intervals)
            .fold(SampleDomain::new(), |d, (c, i)| d.interval(c.clone(), i.lo, i.hi))
            .with_fixed(&self.params)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Binding {
        self.sample_domain().sample(rng)
    }

    /// `count` seeded points drawn with ChaCha8.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Binding> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dom = self.sample_domain();
        (0..count).map(|_| dom.sample(&mut rng)).collect()
    }

    pub fn midpoint(&self) -> Binding {
        let mut b = self.params.clone();
        for (c, i) in self.coords.iter().zip(&self.intervals) {
            b.set(c.clone(), i.midpoint());
        }
        b
    }

    /// Concatenation of charts with pairwise disjoint coordinates. Shared
    /// parameters must agree.
    pub fn concat<'a>(charts: impl IntoIterator<Item = &'a Chart>) -> Result<Chart, GeoError> {
        let mut coords = Vec::new();
        let mut params = Binding::new();
        for ch in charts {
            for (c, i) in ch.coords.iter().zip(&ch.intervals) {
                if coords.iter().any(|(n, _): &(String, Interval)| n == c) || params.contains(c) {
                    return Err(GeoError::SymbolCollision(c.clone()));
                }
                coords.push((c.clone(), *i));
            }
            for (name, v) in ch.params.iter() {
                match params.get(name) {
                    Some(prev) if prev != v => return Err(GeoError::SymbolCollision(name.to_string())),
                    _ => {}
                }
                if coords.iter().any(|(n, _)| n == name) {
                    return Err(GeoError::SymbolCollision(name.to_string()));
                }
                params.set(name, v);
            }
        }
        Chart::new(coords)?.with_params(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn rejects_duplicates_and_bad_intervals() {
        assert!(Chart::new([("x", iv(0.0, 1.0)), ("x", iv(0.0, 1.0))]).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn concat_detects_collisions() {
        let a = Chart::new([("x", iv(0.0, 1.0))]).unwrap();
        let b = Chart::new([("y", iv(0.0, 1.0))]).unwrap();
        let ab = Chart::concat([&a, &b]).unwrap();
        assert_eq!(ab.coords(), &["x".to_string(), "y".to_string()]);
        assert_eq!(Chart::concat([&a, &a]), Err(GeoError::SymbolCollision("x".into())));
    }

    #[test]
    fn params_are_part_of_every_sample() {
        let c = Chart::new([("r", iv(2.0, 10.0))])
            .unwrap()
            .with_params(Binding::new().with("M", 1.0))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = c.sample(&mut rng);
        assert_eq!(b.get("M"), Some(1.0));
        let r = b.get("r").unwrap();
        assert!(r > 2.0 && r < 10.0);
    }

    #[test]
    fn sample_points_are_reproducible() {
        let c = Chart::new([("x", iv(0.0, 1.0))]).unwrap();
        assert_eq!(c.sample_points(5, 7), c.sample_points(5, 7));
        assert_ne!(c.sample_points(5, 7), c.sample_points(5, 8));
    }
}
