use std::f64::consts::TAU;

/// `e^{-|x|} I₀(x)`, the exponentially scaled modified Bessel function of order zero.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        // Power series Σ (x²/4)^k / (k!)²; all terms positive.
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-17 {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Asymptotic series; the smallest term is far below f64 resolution for x > 30.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let odd = 2.0 * k - 1.0;
            term *= odd * odd / (8.0 * k * x);
            if term < sum * 1e-17 {
                break;
            }
            sum += term;
            k += 1.0;
        }
        sum / (TAU * x).sqrt()
    }
}
