//! Small-argument approximation (SAA) for a sum of `L` i.i.d. Rayleigh variates.
//!
//! The law is written for the sum scaled by `1/sqrt(L)` (statistic histograms are read
//! on the `t = t_h / sqrt(L)` axis): a chi-type density
//! `t^{2L-1} exp(-t²/(2b)) / (2^{L-1} b^L (L-1)!)` whose CDF is a finite Poisson sum.

use crate::{Error, Result};

use super::invert_increasing;

/// Products of at most this many factors stay exact in `u128` before switching to logs.
const EXACT_LIMIT: u64 = 20;

fn check_seq(x: u64, c: u64) -> Result<()> {
    if x == 0 || c == 0 {
        return Err(Error::param("x", "x and c must be at least 1"));
    }
    if (x - 1) % c != 0 {
        return Err(Error::param("x", format!("{x} is not 1 mod {c}")));
    }
    Ok(())
}

/// `x!^c = 1 · (1 + c) · (1 + 2c) ··· x`.
pub fn seq_factorial(x: u64, c: u64) -> Result<f64> {
    check_seq(x, c)?;
    let factors = (x - 1) / c + 1;
    if factors <= EXACT_LIMIT {
        let mut acc: u128 = 1;
        let mut f = 1u128;
        while f <= x as u128 {
            acc *= f;
            f += c as u128;
        }
        return Ok(acc as f64);
    }
    Ok(ln_seq_factorial(x, c)?.exp())
}

/// `ln(x!^c)`.
pub fn ln_seq_factorial(x: u64, c: u64) -> Result<f64> {
    check_seq(x, c)?;
    let mut acc = 0.0;
    let mut f = 1u64;
    while f <= x {
        acc += (f as f64).ln();
        f += c;
    }
    Ok(acc)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// SAA law of a normalized sum of `L` Rayleigh magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaaSum {
    l: usize,
    b: f64,
    ln_norm: f64,
}

impl SaaSum {
    pub fn new(l: usize, b: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::param("l", "at least one summand"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", format!("{b} must be positive")));
        }
        let lf = l as f64;
        let ln_norm = (lf - 1.0) * std::f64::consts::LN_2 + lf * b.ln() + ln_factorial(l - 1);
        Ok(Self { l, b, ln_norm })
    }

    /// `b_H0 = [(2L-1)!^2]^{1/L} / L` for unit-scale Rayleigh summands.
    pub fn h0_scale(l: usize) -> Result<f64> {
        if l == 0 {
            return Err(Error::param("l", "at least one summand"));
        }
        let ln_df = ln_seq_factorial(2 * l as u64 - 1, 2)?;
        Ok((ln_df / l as f64).exp() / l as f64)
    }

    /// Noise-only statistic.
    pub fn h0(l: usize) -> Result<Self> {
        Self::new(l, Self::h0_scale(l)?)
    }

    /// Statistic when band jamming raises the bin variance by `1 + σ_J²/σ²`.
    pub fn band_h1(l: usize, jam_to_noise: f64) -> Result<Self> {
        if !(jam_to_noise >= 0.0 && jam_to_noise.is_finite()) {
            return Err(Error::param("jam_to_noise", format!("{jam_to_noise} must be >= 0")));
        }
        Self::new(l, (1.0 + jam_to_noise) * Self::h0_scale(l)?)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let lf = self.l as f64;
        ((2.0 * lf - 1.0) * t.ln() - t * t / (2.0 * self.b) - self.ln_norm).exp()
    }

    /// Survival `exp(-x) Σ_{l<L} x^l / l!` with `x = t²/(2b)`.
    pub fn sf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let x = t * t / (2.0 * self.b);
        let ln_x = x.ln();
        let mut ln_fact = 0.0;
        let mut sum = 0.0;
        for l in 0..self.l {
            if l > 0 {
                ln_fact += (l as f64).ln();
            }
            sum += (l as f64 * ln_x - x - ln_fact).exp();
        }
        sum.min(1.0)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let x = t * t / (2.0 * self.b);
        if x >= self.l as f64 {
            return 1.0 - self.sf(t);
        }
        // Lower tail `exp(-x) Σ_{l>=L} x^l / l!`, accurate when the CDF is tiny.
        let ln_x = x.ln();
        let mut ln_term = self.l as f64 * ln_x - x - ln_factorial(self.l);
        let mut sum = 0.0;
        let mut k = self.l;
        loop {
            let term = ln_term.exp();
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
            k += 1;
            ln_term += ln_x - (k as f64).ln();
        }
        sum.min(1.0)
    }

    /// `t` with `cdf(t) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("{p} is outside (0, 1)")));
        }
        if p > 0.5 {
            return self.isf(1.0 - p);
        }
        Ok(invert_increasing(|t| self.cdf(t), p))
    }

    /// `t` with `sf(t) = q`; accurate for tiny tail probabilities.
    pub fn isf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::param("q", format!("{q} is outside (0, 1)")));
        }
        if q > 0.5 {
            return self.quantile(1.0 - q);
        }
        Ok(invert_increasing(|t| -self.sf(t), -q))
    }

    /// `sqrt(2b) Γ(L + 1/2) / Γ(L)`.
    pub fn mean(&self) -> f64 {
        use statrs::function::gamma::ln_gamma;
        let lf = self.l as f64;
        (2.0 * self.b).sqrt() * (ln_gamma(lf + 0.5) - ln_gamma(lf)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn seq_factorial_values() {
        assert_eq!(seq_factorial(5, 2).unwrap(), 15.0);
        assert_eq!(seq_factorial(4, 1).unwrap(), 24.0);
        assert_eq!(seq_factorial(1, 3).unwrap(), 1.0);
        assert_eq!(seq_factorial(15, 2).unwrap(), 2_027_025.0);
        let direct: f64 = (1..=127u64).step_by(2).map(|v| v as f64).product();
        let big = seq_factorial(127, 2).unwrap();
        assert!((big / direct - 1.0).abs() < 1e-12);
        assert!(seq_factorial(4, 2).is_err());
        assert!(seq_factorial(0, 1).is_err());
        assert!(seq_factorial(3, 0).is_err());
    }

    #[test]
    fn h0_scale_small_l() {
        assert_eq!(SaaSum::h0_scale(1).unwrap(), 1.0);
        // L = 2: sqrt(3)/2.
        assert!((SaaSum::h0_scale(2).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(SaaSum::h0(0).is_err());
    }

    #[test]
    fn single_summand_is_unit_rayleigh() {
        let d = SaaSum::new(1, 1.0).unwrap();
        for i in 0..40 {
            let t = i as f64 * 0.15;
            assert!((d.pdf(t) - t * (-t * t / 2.0).exp()).abs() < 1e-15);
        }
        let median = (2.0 * LN_2).sqrt();
        assert!((d.cdf(median) - 0.5).abs() < 1e-15);
        let q = d.quantile(1.0 - (-0.5f64).exp()).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_edges() {
        for l in [1, 4, 32] {
            let d = SaaSum::h0(l).unwrap();
            assert_eq!(d.cdf(0.0), 0.0);
            assert!(d.cdf(1e3) > 1.0 - 1e-15);
            assert_eq!(d.pdf(-1.0), 0.0);
            assert!(d.quantile(0.0).is_err() && d.quantile(1.0).is_err());
        }
    }

    #[test]
    fn quantile_round_trip() {
        for l in [1, 2, 4, 8, 16, 32, 64] {
            let d = SaaSum::h0(l).unwrap();
            for p in [1e-5, 1e-3, 0.1, 0.5, 0.9, 0.99, 0.999] {
                let t = d.quantile(p).unwrap();
                assert!((d.cdf(t) - p).abs() < 1e-10, "L {l} p {p}");
            }
            for q in [1e-3, 1e-5, 1e-8] {
                let t = d.isf(q).unwrap();
                assert!((d.sf(t) / q - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn large_l_quantile_finite() {
        let d = SaaSum::h0(32).unwrap();
        let t = d.quantile(0.999).unwrap();
        assert!(t.is_finite() && t > 0.0);
        assert!((d.cdf(t) - 0.999).abs() < 1e-10);
    }

    #[test]
    fn band_scale() {
        let h0 = SaaSum::h0(8).unwrap();
        let h1 = SaaSum::band_h1(8, 10f64.powf(0.5)).unwrap();
        assert!((h1.b() / h0.b() - (1.0 + 10f64.powf(0.5))).abs() < 1e-12);
        assert!(SaaSum::band_h1(8, -1.0).is_err());
    }
}
