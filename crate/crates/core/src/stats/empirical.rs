//! Empirical distribution helpers.

use crate::{Error, Result};

/// Kolmogorov-Smirnov distance `sup |F_n(t) - F(t)|` between a sample and a model CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    d
}

/// Fixed-width histogram normalized as a density.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lo: f64,
    width: f64,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::param("bins", "at least one bin"));
        }
        if !(hi > lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::param("hi", format!("range [{lo}, {hi}) is empty")));
        }
        Ok(Self { lo, width: (hi - lo) / bins as f64, counts: vec![0; bins], total: 0 })
    }

    /// Histogram spanning the sample range.
    pub fn from_samples(samples: &[f64], bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("samples", "empty sample"));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + 1.0;
        }
        let pad = (hi - lo) * 1e-9;
        let mut h = Self::new(lo, hi + pad, bins)?;
        h.extend(samples);
        Ok(h)
    }

    /// Values outside the range are counted in `total` but not in any bin.
    pub fn push(&mut self, x: f64) {
        self.total += 1;
        let pos = (x - self.lo) / self.width;
        if pos >= 0.0 && (pos as usize) < self.counts.len() {
            self.counts[pos as usize] += 1;
        }
    }

    pub fn extend(&mut self, xs: &[f64]) {
        for &x in xs {
            self.push(x);
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bin_width(&self) -> f64 {
        self.width
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.lo + (i as f64 + 0.5) * self.width).collect()
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len()).map(|i| self.lo + i as f64 * self.width).collect()
    }

    pub fn density(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let norm = self.total as f64 * self.width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }
}
