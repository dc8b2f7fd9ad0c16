//! Binomial confidence intervals.

use statrs::distribution::{Beta, ContinuousCDF};

/// Below this many events (or non-events) the exact interval is used.
pub const EXACT_BELOW: u64 = 20;

const Z95: f64 = 1.959_963_984_540_054;

/// 95% half-width for `events` successes out of `n` trials.
///
/// Normal approximation, or the larger side of the Clopper-Pearson interval when either
/// count is small.
pub fn binomial_halfwidth(events: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = events as f64 / n as f64;
    if events < EXACT_BELOW || n - events < EXACT_BELOW {
        let (lo, hi) = clopper_pearson(events, n);
        return (p - lo).max(hi - p);
    }
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Exact two-sided 95% interval.
pub fn clopper_pearson(events: u64, n: u64) -> (f64, f64) {
    let (k, nf) = (events as f64, n as f64);
    let lo = if events == 0 {
        0.0
    } else {
        Beta::new(k, nf - k + 1.0).expect("positive shape").inverse_cdf(0.025)
    };
    let hi = if events == n {
        1.0
    } else {
        Beta::new(k + 1.0, nf - k).expect("positive shape").inverse_cdf(0.975)
    };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_regime() {
        let h = binomial_halfwidth(5_000, 100_000);
        assert!((h - Z95 * (0.05 * 0.95 / 1e5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_regime() {
        // Zero events out of n: upper bound 1 - 0.025^{1/n}.
        let n = 1000;
        let (lo, hi) = clopper_pearson(0, n);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(1.0 / n as f64))).abs() < 1e-9);
        assert!((binomial_halfwidth(0, n) - hi).abs() < 1e-15);
        let (lo, hi) = clopper_pearson(n, n);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.99);
        let (lo, hi) = clopper_pearson(5, 100);
        assert!(lo < 0.05 && hi > 0.05 && lo > 0.01 && hi < 0.12);
        assert!(binomial_halfwidth(1, 0).is_nan());
    }
}
