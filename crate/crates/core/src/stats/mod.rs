//! Distributions used by the detector and its analysis.

mod empirical;
mod saa;
mod special;

pub use empirical::{ks_distance, Histogram};
pub use saa::{ln_seq_factorial, seq_factorial, SaaSum};
pub use special::bessel_i0_scaled;

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

fn check_prob(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", format!("{p} is outside (0, 1)")));
    }
    Ok(())
}

fn check_scale(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(name, format!("{v} must be positive")));
    }
    Ok(())
}

/// Rayleigh law with scale `b` (mode at `b`): `pdf(t) = t/b² exp(-t²/(2b²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rayleigh {
    b: f64,
}

impl Rayleigh {
    pub fn new(b: f64) -> Result<Self> {
        check_scale("b", b)?;
        Ok(Self { b })
    }

    pub fn scale(&self) -> f64 {
        self.b
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let b2 = self.b * self.b;
        t / b2 * (-t * t / (2.0 * b2)).exp()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -(-t * t / (2.0 * self.b * self.b)).exp_m1()
    }

    pub fn sf(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        Ok(self.b * (-2.0 * (-p).ln_1p()).sqrt())
    }

    /// Inverse survival function: the `t` exceeded with probability `q`.
    pub fn isf(&self, q: f64) -> Result<f64> {
        check_prob(q)?;
        Ok(self.b * (-2.0 * q.ln()).sqrt())
    }

    pub fn mean(&self) -> f64 {
        self.b * (PI / 2.0).sqrt()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.b * (-2.0 * (1.0 - u).ln()).sqrt()
    }
}

/// `b · sqrt(-2 ln(1 - p))`.
pub fn rayleigh_quantile(b: f64, p: f64) -> Result<f64> {
    Rayleigh::new(b)?.quantile(p)
}

/// Rice law: magnitude of `μ + CN(0, 2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rician {
    mu: f64,
    sigma: f64,
}

impl Rician {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("{mu} must be finite and >= 0")));
        }
        check_scale("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `t/σ² exp(-(t² + μ²)/(2σ²)) I₀(tμ/σ²)`, evaluated with the scaled Bessel function.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let s2 = self.sigma * self.sigma;
        let x = t * self.mu / s2;
        let d = t - self.mu;
        t / s2 * (-d * d / (2.0 * s2)).exp() * bessel_i0_scaled(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        (self.mu + self.sigma * re).hypot(self.sigma * im)
    }
}

pub fn rician_pdf(mu: f64, sigma: f64, t: f64) -> Result<f64> {
    Ok(Rician::new(mu, sigma)?.pdf(t))
}

pub fn rician_sample<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> Result<f64> {
    Ok(Rician::new(mu, sigma)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mu: f64,
    sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        check_scale("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let z = (t - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * TAU.sqrt())
    }

    pub fn cdf(&self, t: f64) -> f64 {
        0.5 * statrs::function::erf::erfc(-(t - self.mu) / (self.sigma * std::f64::consts::SQRT_2))
    }
}

pub fn normal_cdf(t: f64, mu: f64, sigma: f64) -> Result<f64> {
    Ok(Normal::new(mu, sigma)?.cdf(t))
}

/// Bisection for a nondecreasing function on `[0, ∞)`: smallest bracket where `f(t) >= target`.
pub(crate) fn invert_increasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < target {
        lo = hi;
        hi *= 2.0;
        assert!(hi.is_finite(), "bracket expansion diverged");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
