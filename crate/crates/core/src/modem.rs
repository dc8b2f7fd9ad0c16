//! Chirp-spread-spectrum modulation and the dechirp + DFT receiver.
//!
//! Frames are sampled at the Nyquist rate, so one symbol spans exactly `M = 2^SF`
//! samples. The forward DFT is unnormalized: a clean dechirped symbol puts
//! magnitude `M` in its own bin and zero elsewhere.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Index};
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Complex, Error, Result};

pub const MIN_SF: u32 = 7;
pub const MAX_SF: u32 = 12;

/// Spreading factor and the derived alphabet size `M = 2^SF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct LoRaParams {
    sf: u32,
}

impl LoRaParams {
    pub fn new(sf: u32) -> Result<Self> {
        if !(MIN_SF..=MAX_SF).contains(&sf) {
            return Err(Error::param("sf", format!("{sf} is outside {MIN_SF}..={MAX_SF}")));
        }
        Ok(Self { sf })
    }

    pub fn sf(&self) -> u32 {
        self.sf
    }

    /// Alphabet size, also the number of samples per symbol.
    pub fn m(&self) -> usize {
        1 << self.sf
    }

    pub fn symbol(&self, a: usize) -> Result<Symbol> {
        if a >= self.m() {
            return Err(Error::param("symbol", format!("{a} is not below M = {}", self.m())));
        }
        Ok(Symbol(a))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m() {
            return Err(Error::LengthMismatch { expected: self.m(), found: len });
        }
        Ok(())
    }
}

impl Default for LoRaParams {
    fn default() -> Self {
        Self { sf: MIN_SF }
    }
}

impl TryFrom<u32> for LoRaParams {
    type Error = Error;

    fn try_from(sf: u32) -> Result<Self> {
        Self::new(sf)
    }
}

impl From<LoRaParams> for u32 {
    fn from(p: LoRaParams) -> u32 {
        p.sf
    }
}

/// A symbol index in `0..M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(usize);

impl Symbol {
    pub fn value(self) -> usize {
        self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One symbol period of complex baseband samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexFrame(Vec<Complex>);

impl ComplexFrame {
    pub fn new(samples: Vec<Complex>) -> Self {
        Self(samples)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex::new(0.0, 0.0); len])
    }

    pub fn samples(&self) -> &[Complex] {
        &self.0
    }

    pub fn samples_mut(&mut self) -> &mut [Complex] {
        &mut self.0
    }

    pub fn into_samples(self) -> Vec<Complex> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mean of `|x[k]|^2` over the frame.
    pub fn mean_power(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.0.len() as f64
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.0.iter_mut().for_each(|z| *z *= c);
        self
    }

    pub fn add_assign(&mut self, other: &ComplexFrame) {
        assert_eq!(self.len(), other.len(), "frame lengths differ");
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a += b);
    }
}

impl Add<&ComplexFrame> for ComplexFrame {
    type Output = ComplexFrame;

    fn add(mut self, rhs: &ComplexFrame) -> ComplexFrame {
        self.add_assign(rhs);
        self
    }
}

impl Index<usize> for ComplexFrame {
    type Output = Complex;

    fn index(&self, k: usize) -> &Complex {
        &self.0[k]
    }
}

impl From<Vec<Complex>> for ComplexFrame {
    fn from(v: Vec<Complex>) -> Self {
        Self(v)
    }
}

/// Frequency-domain view of a dechirped frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DftFrame(Vec<Complex>);

impl DftFrame {
    pub fn new(bins: Vec<Complex>) -> Self {
        Self(bins)
    }

    pub fn bins(&self) -> &[Complex] {
        &self.0
    }

    pub fn into_bins(self) -> Vec<Complex> {
        self.0
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

    /// Index of the largest magnitude, lowest index on ties.
    pub fn peak(&self) -> usize {
        argmax_lowest(self.0.iter().map(|z| z.norm_sqr()))
    }
}

impl Index<usize> for DftFrame {
    type Output = Complex;

    fn index(&self, n: usize) -> &Complex {
        &self.0[n]
    }
}

pub(crate) fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

pub(crate) fn argmin_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    argmax_lowest(values.into_iter().map(|v| -v))
}

/// Chirp phase in turns, `k (a/M - 1/2 + k/(2M))` reduced mod 1 in integer arithmetic.
fn chirp_phase_turns(k: usize, a: usize, m: usize) -> f64 {
    let (k, a, m) = (k as i64, a as i64, m as i64);
    let two_m = 2 * m;
    let num = (2 * k * a + k * k - k * m).rem_euclid(two_m);
    num as f64 / two_m as f64
}

fn chirp(params: &LoRaParams, a: usize, conj: bool) -> ComplexFrame {
    let m = params.m();
    let sign = if conj { -1.0 } else { 1.0 };
    (0..m)
        .map(|k| Complex::from_polar(1.0, sign * TAU * chirp_phase_turns(k, a, m)))
        .collect::<Vec<_>>()
        .into()
}

/// Waveform of symbol `a`: `x_a[k] = exp(2jπ k (a/M - 1/2 + k/(2M)))`.
pub fn modulate(params: &LoRaParams, a: Symbol) -> Result<ComplexFrame> {
    params.symbol(a.value())?;
    Ok(chirp(params, a.value(), false))
}

/// Conjugate of the symbol-0 up-chirp.
pub fn downchirp(params: &LoRaParams) -> ComplexFrame {
    chirp(params, 0, true)
}

/// Dechirp and transform. Plans a transform per call; prefer [`Modem`] in loops.
pub fn dechirp_dft(params: &LoRaParams, r: &ComplexFrame) -> Result<DftFrame> {
    Modem::new(*params).dechirp_dft(r)
}

/// Non-coherent argmax demodulation.
pub fn demodulate(params: &LoRaParams, r: &ComplexFrame) -> Result<Symbol> {
    Modem::new(*params).demodulate(r)
}

/// Direct `O(M^2)` unnormalized forward DFT, kept as a reference for the fast path.
pub fn direct_dft(x: &[Complex]) -> Vec<Complex> {
    let m = x.len();
    (0..m)
        .map(|n| {
            x.iter()
                .enumerate()
                .map(|(k, &v)| {
                    let turns = ((n * k) % m) as f64 / m as f64;
                    v * Complex::from_polar(1.0, -TAU * turns)
                })
                .sum()
        })
        .collect()
}

/// Receiver for one spreading factor: caches the down-chirp and FFT plans.
///
/// Cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct Modem {
    params: LoRaParams,
    down: Arc<[Complex]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Modem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modem").field("params", &self.params).finish_non_exhaustive()
    }
}

impl Modem {
    pub fn new(params: LoRaParams) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(params.m());
        let inverse = planner.plan_fft_inverse(params.m());
        let down = downchirp(&params).into_samples().into();
        Self { params, down, forward, inverse }
    }

    pub fn params(&self) -> &LoRaParams {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.params.m()
    }

    pub fn modulate(&self, a: Symbol) -> Result<ComplexFrame> {
        modulate(&self.params, a)
    }

    pub fn downchirp(&self) -> &[Complex] {
        &self.down
    }

    pub fn dechirp_dft(&self, r: &ComplexFrame) -> Result<DftFrame> {
        self.params.check_len(r.len())?;
        let mut buf: Vec<Complex> = r.samples().iter().zip(self.down.iter()).map(|(x, d)| x * d).collect();
        self.forward.process(&mut buf);
        Ok(DftFrame(buf))
    }

    pub fn demodulate(&self, r: &ComplexFrame) -> Result<Symbol> {
        Ok(Symbol(self.dechirp_dft(r)?.peak()))
    }

    /// Unnormalized forward DFT in place (no dechirp).
    pub fn fft_in_place(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.m());
        self.forward.process(buf);
    }

    /// Unnormalized inverse DFT in place: `x[k] = Σ_n X[n] e^{+2jπnk/M}`.
    pub fn ifft_in_place(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.m());
        self.inverse.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sf7() -> LoRaParams {
        LoRaParams::new(7).unwrap()
    }

    #[test]
    fn params_domain() {
        assert!(LoRaParams::new(6).is_err());
        assert!(LoRaParams::new(13).is_err());
        for sf in 7..=12 {
            let p = LoRaParams::new(sf).unwrap();
            assert_eq!(p.m(), 1 << sf);
            assert!(p.m().is_power_of_two());
        }
        assert!(sf7().symbol(128).is_err());
        assert_eq!(sf7().symbol(127).unwrap().value(), 127);
    }

    #[test]
    fn symbol_zero_starts_at_one() {
        let p = sf7();
        let x0 = modulate(&p, p.symbol(0).unwrap()).unwrap();
        assert_eq!(x0[0], Complex::new(1.0, 0.0));
    }

    #[test]
    fn symbol_from_other_sf_rejected() {
        let big = LoRaParams::new(8).unwrap().symbol(200).unwrap();
        assert!(modulate(&sf7(), big).is_err());
    }

    #[test]
    fn unit_modulus() {
        let p = sf7();
        let x = modulate(&p, p.symbol(64).unwrap()).unwrap();
        for z in x.samples() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_closed_expression() {
        let p = sf7();
        let m = p.m() as f64;
        let x = modulate(&p, p.symbol(37).unwrap()).unwrap();
        for (k, z) in x.samples().iter().enumerate() {
            let k = k as f64;
            let want = Complex::from_polar(1.0, TAU * k * (37.0 / m - 0.5 + k / (2.0 * m)));
            assert!((z - want).norm() < 1e-11);
        }
    }

    #[test]
    fn downchirp_conjugates_upchirp() {
        let p = sf7();
        let up = modulate(&p, p.symbol(0).unwrap()).unwrap();
        let down = downchirp(&p);
        assert_eq!(down[0], Complex::new(1.0, 0.0));
        for (u, d) in up.samples().iter().zip(down.samples()) {
            assert!((u * d - Complex::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn dechirped_symbol_is_pure_tone() {
        let p = sf7();
        let x5 = modulate(&p, p.symbol(5).unwrap()).unwrap();
        let tone: Vec<Complex> =
            x5.samples().iter().zip(downchirp(&p).samples()).map(|(a, b)| a * b).collect();
        let spec = direct_dft(&tone);
        for (n, z) in spec.iter().enumerate() {
            let want = if n == 5 { 128.0 } else { 0.0 };
            assert!((z - Complex::new(want, 0.0)).norm() < 1e-9, "bin {n}: {z}");
        }
    }

    #[test]
    fn fft_agrees_with_direct_dft() {
        let p = sf7();
        let modem = Modem::new(p);
        let r: ComplexFrame = (0..128)
            .map(|k| Complex::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos() * 0.5))
            .collect::<Vec<_>>()
            .into();
        let fast = modem.dechirp_dft(&r).unwrap();
        let tone: Vec<Complex> = r.samples().iter().zip(modem.downchirp()).map(|(a, b)| a * b).collect();
        let slow = direct_dft(&tone);
        for (a, b) in fast.bins().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn spectral_concentration() {
        let p = sf7();
        let modem = Modem::new(p);
        let d = modem.dechirp_dft(&modem.modulate(p.symbol(33).unwrap()).unwrap()).unwrap();
        let mags = d.magnitudes();
        assert!((mags[33] - 128.0).abs() < 1e-9);
        for (n, v) in mags.iter().enumerate() {
            if n != 33 {
                assert!(*v < 1e-9, "bin {n} = {v}");
            }
        }
    }

    #[test]
    fn zero_frame_gives_zero_bins() {
        let d = dechirp_dft(&sf7(), &ComplexFrame::zeros(128)).unwrap();
        assert!(d.bins().iter().all(|z| z.norm() == 0.0));
        assert_eq!(demodulate(&sf7(), &ComplexFrame::zeros(128)).unwrap().value(), 0);
    }

    #[test]
    fn length_mismatch() {
        let err = dechirp_dft(&sf7(), &ComplexFrame::zeros(64)).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 128, found: 64 });
        assert!(demodulate(&sf7(), &ComplexFrame::zeros(129)).is_err());
    }

    #[test]
    fn ties_break_low() {
        assert_eq!(argmax_lowest([1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmin_lowest([1.0, 0.0, 0.0]), 1);
        let d = DftFrame::new(vec![Complex::new(2.0, 0.0), Complex::new(0.0, 2.0)]);
        assert_eq!(d.peak(), 0);
    }

    #[test]
    fn round_trip_every_symbol_high_sf() {
        let p = LoRaParams::new(12).unwrap();
        let modem = Modem::new(p);
        for a in (0..p.m()).step_by(97) {
            let sym = p.symbol(a).unwrap();
            let d = modem.dechirp_dft(&modem.modulate(sym).unwrap()).unwrap();
            assert_eq!(d.peak(), a);
            assert!((d[a].norm() - 4096.0).abs() < 1e-7);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let modem = Modem::new(sf7());
        let orig: Vec<Complex> = (0..128).map(|k| Complex::new(k as f64, -(k as f64))).collect();
        let mut buf = orig.clone();
        modem.fft_in_place(&mut buf);
        modem.ifft_in_place(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 128.0 - b).norm() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn noiseless_round_trip(a in 0usize..128) {
            let p = sf7();
            let sym = p.symbol(a).unwrap();
            prop_assert_eq!(demodulate(&p, &modulate(&p, sym).unwrap()).unwrap(), sym);
        }

        #[test]
        fn dechirp_is_linear(
            re in proptest::collection::vec(-3.0f64..3.0, 128),
            im in proptest::collection::vec(-3.0f64..3.0, 128),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
            a in 0usize..128,
        ) {
            let p = sf7();
            let modem = Modem::new(p);
            let r1: ComplexFrame = re.iter().zip(&im).map(|(&x, &y)| Complex::new(x, y)).collect::<Vec<_>>().into();
            let r2 = modem.modulate(p.symbol(a).unwrap()).unwrap();
            let mixed: ComplexFrame = r1.samples().iter().zip(r2.samples())
                .map(|(x, y)| x * alpha + y * beta).collect::<Vec<_>>().into();
            let lhs = modem.dechirp_dft(&mixed).unwrap();
            let d1 = modem.dechirp_dft(&r1).unwrap();
            let d2 = modem.dechirp_dft(&r2).unwrap();
            let scale = d1.bins().iter().chain(d2.bins()).map(|z| z.norm()).fold(1.0, f64::max);
            for n in 0..128 {
                let rhs = d1[n] * alpha + d2[n] * beta;
                prop_assert!((lhs[n] - rhs).norm() <= 1e-12 * scale * 4.0);
            }
        }

        #[test]
        fn parseval(re in proptest::collection::vec(-1.0f64..1.0, 128)) {
            let p = sf7();
            let r: ComplexFrame = re.iter().map(|&x| Complex::new(x, x * 0.5)).collect::<Vec<_>>().into();
            let d = dechirp_dft(&p, &r).unwrap();
            let time: f64 = r.samples().iter().map(|z| z.norm_sqr()).sum();
            let freq: f64 = d.bins().iter().map(|z| z.norm_sqr()).sum::<f64>() / 128.0;
            prop_assert!((time - freq).abs() <= 1e-10 * time.max(1.0));
        }
    }
}
