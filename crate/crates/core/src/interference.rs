//! Tone-jamming interference after dechirp + DFT.
//!
//! For an integer tone frequency `u`, the dechirped DFT of the tone is a generalized
//! quadratic Gauss sum `G(-1, M + 2u - 2n, 2M) / 2`, so the whole interference
//! spectrum has a closed form. Non-integer tones fall back to the direct sum.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::jammer::ToneJammer;
use crate::modem::{argmax_lowest, argmin_lowest, LoRaParams, Modem, Symbol};
use crate::{Complex, Error, Result};

/// Arguments of `G(η, ε, γ) = Σ_{x=0}^{|γ|-1} e((ηx² + εx)/γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GqgsArgs {
    pub eta: i64,
    pub eps: i64,
    pub gamma: i64,
}

impl GqgsArgs {
    pub fn new(eta: i64, eps: i64, gamma: i64) -> Self {
        Self { eta, eps, gamma }
    }

    /// Arguments for tone `u` observed in bin `n`.
    pub fn for_tone(m: usize, u: i64, n: usize) -> Self {
        Self { eta: -1, eps: m as i64 + 2 * u - 2 * n as i64, gamma: 2 * m as i64 }
    }
}

fn e_turns(turns: f64) -> Complex {
    Complex::from_polar(1.0, TAU * turns)
}

/// Inverse of odd `a` modulo the power of two `modulus`.
fn inverse_mod_pow2(a: i128, modulus: i128) -> i128 {
    // Newton iteration: each step doubles the number of correct low bits.
    let a = a.rem_euclid(modulus);
    let mut x: i128 = 1;
    for _ in 0..7 {
        let t = (a * x).rem_euclid(modulus);
        x = (x * (2 - t)).rem_euclid(modulus);
    }
    x
}

/// Kronecker symbol `(2^k / a)` for odd `a`.
fn kronecker_pow2(k: u32, a: i64) -> f64 {
    let two_over_a = match a.unsigned_abs() % 8 {
        1 | 7 => 1.0,
        _ => -1.0,
    };
    if k % 2 == 0 {
        1.0
    } else {
        two_over_a
    }
}

/// Closed-form generalized quadratic Gauss sum for odd `η`, even `ε`, `|γ| = 2^k`.
///
/// Evaluates `e(-η⁻¹ (ε/2)² / γ) · (2^k/η) · (1 + j^η) · sqrt|γ|` with the phase reduced
/// exactly in integers. For `η = -1` this is `e(-(ε²/(4η))/γ) (1 + j^η) sqrt|γ|`.
pub fn gqgs_closed_form(args: GqgsArgs) -> Result<Complex> {
    let GqgsArgs { eta, eps, gamma } = args;
    if eta % 2 == 0 {
        return Err(Error::param("eta", format!("{eta} must be odd for the closed form")));
    }
    if eps % 2 != 0 {
        return Err(Error::param("eps", format!("{eps} must be even for the closed form")));
    }
    if gamma == 0 || !gamma.unsigned_abs().is_power_of_two() {
        return Err(Error::param("gamma", format!("{gamma} must be a power of two")));
    }
    if gamma < 0 {
        return gqgs_closed_form(GqgsArgs { eta: -eta, eps: -eps, gamma: -gamma });
    }
    match gamma {
        1 => return Ok(Complex::new(1.0, 0.0)),
        // Terms x = 0 and x = 1 cancel.
        2 => return Ok(Complex::new(0.0, 0.0)),
        _ => {}
    }
    let c = gamma as i128;
    let k = gamma.trailing_zeros();
    let half = (eps / 2) as i128;
    let inv = inverse_mod_pow2(eta as i128, c);
    let phase_num = (-inv * (half * half).rem_euclid(c)).rem_euclid(c);
    let j_pow = match eta.rem_euclid(4) {
        1 => Complex::new(0.0, 1.0),
        3 => Complex::new(0.0, -1.0),
        _ => unreachable!("eta is odd"),
    };
    let base = (Complex::new(1.0, 0.0) + j_pow) * (gamma as f64).sqrt() * kronecker_pow2(k, eta);
    Ok(e_turns(phase_num as f64 / c as f64) * base)
}

/// Direct `|γ|`-term evaluation with the phase numerator reduced exactly mod `γ`.
pub fn gqgs_direct(args: GqgsArgs) -> Complex {
    let GqgsArgs { eta, eps, gamma } = args;
    assert!(gamma != 0, "gamma must be non-zero");
    let c = gamma as i128;
    (0..gamma.unsigned_abs() as i128)
        .map(|x| {
            let num = (eta as i128 * x * x + eps as i128 * x).rem_euclid(c.abs());
            let turns = num as f64 / c as f64;
            e_turns(turns)
        })
        .sum()
}

/// Tone-jamming term `S̃[n]` of the dechirped DFT, `n = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSpectrum(Vec<Complex>);

impl InterferenceSpectrum {
    pub fn new(values: Vec<Complex>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[Complex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    /// `Σ_n |S̃[n]|² / M`.
    pub fn mean_power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.0.len() as f64
    }

    /// Noise-free demodulator peak `|M δ[n-a] + S̃[a]|` for symbol `a`.
    pub fn peak_magnitude(&self, a: Symbol) -> f64 {
        let m = self.0.len() as f64;
        (Complex::new(m, 0.0) + self.0[a.value()]).norm()
    }
}

/// Closed-form interference spectrum; every tone frequency must be an integer.
pub fn tone_spectrum_closed(params: &LoRaParams, spec: &ToneJammer) -> Result<InterferenceSpectrum> {
    spec.validate(params)?;
    if !spec.all_integer() {
        return Err(Error::param(
            "tones",
            "the closed form needs integer frequencies; use tone_spectrum_numeric",
        ));
    }
    let m = params.m();
    // G(-1, ε, 2M) = (1 - j) sqrt(2M) e(ε²/(8M)); only the phase varies with n.
    let amp = spec.amplitude();
    let mut out = vec![Complex::new(0.0, 0.0); m];
    for tone in &spec.tones {
        let rot = Complex::from_polar(amp / 2.0, tone.phase);
        for (n, z) in out.iter_mut().enumerate() {
            let g = gqgs_closed_form(GqgsArgs::for_tone(m, tone.u as i64, n))?;
            *z += g * rot;
        }
    }
    Ok(InterferenceSpectrum(out))
}

/// Interference spectrum by transforming the dechirped tone waveform; any real frequencies.
pub fn tone_spectrum_numeric(params: &LoRaParams, spec: &ToneJammer) -> Result<InterferenceSpectrum> {
    tone_spectrum_with(&Modem::new(*params), spec)
}

/// [`tone_spectrum_numeric`] reusing a prepared [`Modem`].
pub fn tone_spectrum_with(modem: &Modem, spec: &ToneJammer) -> Result<InterferenceSpectrum> {
    spec.validate(modem.params())?;
    let d = modem.dechirp_dft(&spec.synthesize(modem.params()))?;
    Ok(InterferenceSpectrum(d.into_bins()))
}

/// Magnitude every bin takes for a single integer tone: `sqrt(M σ_J²)`.
pub fn flat_level(params: &LoRaParams, sigma_j_sq: f64) -> f64 {
    (params.m() as f64 * sigma_j_sq).sqrt()
}

/// Symbols whose peak the interference helps most (`a_max`) and hurts most (`a_min`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSymbols {
    pub a_min: Symbol,
    pub a_max: Symbol,
    /// `Re S̃[a_max]`.
    pub gamma_plus: f64,
    /// `-Re S̃[a_min]`.
    pub gamma_minus: f64,
}

pub fn extremal_symbols(params: &LoRaParams, spectrum: &InterferenceSpectrum) -> Result<ExtremalSymbols> {
    params.check_len(spectrum.len())?;
    let re = || spectrum.values().iter().map(|z| z.re);
    let a_max = argmax_lowest(re());
    let a_min = argmin_lowest(re());
    Ok(ExtremalSymbols {
        a_min: params.symbol(a_min)?,
        a_max: params.symbol(a_max)?,
        gamma_plus: spectrum.values()[a_max].re,
        gamma_minus: -spectrum.values()[a_min].re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jammer::Tone;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn sf7() -> LoRaParams {
        LoRaParams::new(7).unwrap()
    }

    /// Plain floating-point sum of `exp(2jπ (-k² + εk)/(2M))` over `k < M`.
    fn half_range_sum(m: usize, eps: i64) -> Complex {
        (0..m as i64)
            .map(|k| {
                let arg = (-(k * k) + eps * k) as f64 / (2 * m) as f64;
                Complex::from_polar(1.0, TAU * arg)
            })
            .sum()
    }

    #[test]
    fn closed_form_known_value() {
        let g = gqgs_closed_form(GqgsArgs::new(-1, 0, 256)).unwrap();
        assert!((g - Complex::new(16.0, -16.0)).norm() < 1e-12);
        assert!((g.norm() - 16.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_brute_force() {
        let cases = [(-1, 2, 256), (-1, 128 + 40 - 6, 256), (-1, -30, 64), (1, 4, 16)];
        for (eta, eps, gamma) in cases {
            let args = GqgsArgs::new(eta, eps, gamma);
            let closed = gqgs_closed_form(args).unwrap();
            let brute = gqgs_direct(args);
            assert!((closed - brute).norm() < 1e-9, "{args:?}: {closed} vs {brute}");
        }
    }

    #[test]
    fn closed_form_general_odd_eta() {
        for eta in [-7i64, -5, -3, -1, 1, 3, 5, 7, 9, 11] {
            for k in 0..10u32 {
                let gamma = 1i64 << k;
                for eps in (-20..=20).step_by(2) {
                    for sign in [1, -1] {
                        let args = GqgsArgs::new(eta, eps, sign * gamma);
                        let closed = gqgs_closed_form(args).unwrap();
                        let brute = gqgs_direct(args);
                        assert!((closed - brute).norm() < 1e-9, "{args:?}: {closed} vs {brute}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_preconditions() {
        assert!(gqgs_closed_form(GqgsArgs::new(2, 0, 256)).is_err());
        assert!(gqgs_closed_form(GqgsArgs::new(-1, 1, 256)).is_err());
        assert!(gqgs_closed_form(GqgsArgs::new(-1, 0, 96)).is_err());
        assert!(gqgs_closed_form(GqgsArgs::new(-1, 0, 0)).is_err());
    }

    #[test]
    fn half_range_is_half_full_range() {
        let m = 128;
        for eps in [128 + 40 - 6, 2, -254, 500] {
            let full = gqgs_direct(GqgsArgs::new(-1, eps, 2 * m as i64));
            assert!((half_range_sum(m, eps) * 2.0 - full).norm() < 1e-9);
        }
    }

    #[test]
    fn flat_magnitude_single_tone() {
        let p = sf7();
        for u in [1.0, 20.0, 99.0, 127.0] {
            let s = tone_spectrum_closed(&p, &ToneJammer::single(u, 0.0, 2.0).unwrap()).unwrap();
            for v in s.magnitudes() {
                assert!((v - 16.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extremal_symbols_u20() {
        let p = sf7();
        let s = tone_spectrum_closed(&p, &ToneJammer::single(20.0, 0.0, 2.0).unwrap()).unwrap();
        let ext = extremal_symbols(&p, &s).unwrap();
        assert_eq!(ext.a_max.value(), 67);
        assert_eq!(ext.a_min.value(), 3);
        // The bin at a_max sits 1/256 turn off the real axis.
        let want = 16.0 * (TAU / 256.0).cos();
        assert!((ext.gamma_plus - want).abs() < 1e-9);
        assert!((ext.gamma_minus - want).abs() < 1e-9);
    }

    #[test]
    fn constant_real_spectrum_ties_low() {
        let p = sf7();
        let s = InterferenceSpectrum::new(vec![Complex::new(3.0, 0.0); 128]);
        let ext = extremal_symbols(&p, &s).unwrap();
        assert_eq!((ext.a_min.value(), ext.a_max.value()), (0, 0));
        assert!(extremal_symbols(&p, &InterferenceSpectrum::new(vec![])).is_err());
    }

    #[test]
    fn closed_matches_numeric_three_tones() {
        let p = sf7();
        let spec =
            ToneJammer::new(vec![Tone::new(10.0, 0.4), Tone::new(40.0, 2.0), Tone::new(90.0, 5.5)], 1.0)
                .unwrap();
        let a = tone_spectrum_closed(&p, &spec).unwrap();
        let b = tone_spectrum_numeric(&p, &spec).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_rejects_fractional() {
        let p = sf7();
        assert!(tone_spectrum_closed(&p, &ToneJammer::single(20.5, 0.0, 1.0).unwrap()).is_err());
        assert!(tone_spectrum_numeric(&p, &ToneJammer::single(20.5, 0.0, 1.0).unwrap()).is_ok());
    }

    #[test]
    fn half_integer_tone_null() {
        let p = sf7();
        for u in [20.5, 33.5, 70.5] {
            let s = tone_spectrum_numeric(&p, &ToneJammer::single(u, 0.0, 2.0).unwrap()).unwrap();
            let mags = s.magnitudes();
            let null = argmin_lowest(mags.iter().copied());
            let expected = (64 + u.floor() as usize + 1) % 128;
            assert_eq!(null, expected, "u = {u}");
            assert!(mags[null] < 1e-9);
            let mean = mags.iter().sum::<f64>() / 128.0;
            assert!((mean / 16.0 - 1.0).abs() < 0.2, "mean {mean}");
        }
    }

    #[test]
    fn two_tones_modulate_at_difference_frequency() {
        let p = sf7();
        let s = tone_spectrum_closed(&p, &ToneJammer::at(&[10.0, 75.0], 2.0).unwrap()).unwrap();
        let mags = s.magnitudes();
        let mean = mags.iter().sum::<f64>() / 128.0;
        let mut spec: Vec<Complex> = mags.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
        let m = Modem::new(p);
        m.fft_in_place(&mut spec);
        let dominant = argmax_lowest(spec[1..64].iter().map(|z| z.norm())) + 1;
        let diff = 75 - 10;
        let folded = diff.min(128 - diff);
        assert!((dominant as i64 - folded as i64).abs() <= 1, "dominant {dominant}");
    }

    proptest! {
        #[test]
        fn tones_add_linearly(
            u0 in 1u32..128, u1 in 1u32..128, p0 in 0.0f64..std::f64::consts::TAU, p1 in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = sf7();
            let both = ToneJammer::new(vec![Tone::new(u0 as f64, p0), Tone::new(u1 as f64, p1)], 2.0).unwrap();
            let s = tone_spectrum_closed(&p, &both).unwrap();
            let a = tone_spectrum_closed(&p, &ToneJammer::single(u0 as f64, p0, 1.0).unwrap()).unwrap();
            let b = tone_spectrum_closed(&p, &ToneJammer::single(u1 as f64, p1, 1.0).unwrap()).unwrap();
            for n in 0..128 {
                prop_assert!((s.values()[n] - a.values()[n] - b.values()[n]).norm() < 1e-12);
            }
        }

        #[test]
        fn parseval_integer_tones(us in proptest::collection::btree_set(1u32..128, 1..5), sj in 0.1f64..5.0) {
            let p = sf7();
            let freqs: Vec<f64> = us.iter().map(|&u| u as f64).collect();
            let s = tone_spectrum_closed(&p, &ToneJammer::at(&freqs, sj).unwrap()).unwrap();
            prop_assert!((s.mean_power() / (128.0 * sj) - 1.0).abs() < 1e-10);
        }

        #[test]
        fn peak_sign_condition(a in 0usize..128, u in 1u32..128, phase in 0.0f64..std::f64::consts::TAU) {
            let p = sf7();
            let spec = ToneJammer::single(u as f64, phase, 2.0).unwrap();
            let s = tone_spectrum_closed(&p, &spec).unwrap();
            let re = s.values()[a].re;
            prop_assume!(re.abs() > 1.5);
            let peak = s.peak_magnitude(p.symbol(a).unwrap());
            prop_assert_eq!(peak > 128.0, re > 0.0);
        }
    }
}
