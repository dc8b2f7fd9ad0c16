//! Band and tone jammers, AWGN, and received-frame composition.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::modem::{ComplexFrame, LoRaParams, Modem, Symbol};
use crate::{Complex, Error, Result};

/// Gaussian noise confined to a fraction `rho` of the band around `nu_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandJammer {
    pub rho: f64,
    /// Normalized centre frequency in `[-1/2, 1/2)`.
    pub nu_j: f64,
    /// Total jamming power.
    pub sigma_j_sq: f64,
}

impl BandJammer {
    pub fn new(rho: f64, nu_j: f64, sigma_j_sq: f64) -> Result<Self> {
        let j = Self { rho, nu_j, sigma_j_sq };
        j.validate()?;
        Ok(j)
    }

    pub fn full_band(sigma_j_sq: f64) -> Result<Self> {
        Self::new(1.0, 0.0, sigma_j_sq)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::param("rho", format!("{} is outside (0, 1]", self.rho)));
        }
        if !(-0.5..0.5).contains(&self.nu_j) {
            return Err(Error::param("nu_j", format!("{} is outside [-1/2, 1/2)", self.nu_j)));
        }
        check_power(self.sigma_j_sq)
    }

    pub fn is_full_band(&self) -> bool {
        self.rho >= 1.0
    }

    /// DFT bins occupied by the jammer: `ceil(rho M)` bins, circularly centred on `nu_j M`.
    pub fn band_bins(&self, params: &LoRaParams) -> Vec<usize> {
        let m = params.m();
        // Tolerance keeps e.g. 0.3 * 128 = 38.400000000000006 from rounding up twice.
        let count = ((self.rho * m as f64 - 1e-9).ceil() as usize).clamp(1, m);
        let centre = (self.nu_j * m as f64).round() as i64;
        let start = centre - (count / 2) as i64;
        (0..count as i64).map(|i| (start + i).rem_euclid(m as i64) as usize).collect()
    }

    /// Frequency-domain synthesis: i.i.d. complex Gaussians on the band, inverse DFT, rescale.
    pub fn synthesize<R: Rng + ?Sized>(&self, modem: &Modem, rng: &mut R) -> ComplexFrame {
        let m = modem.m();
        let bins = self.band_bins(modem.params());
        if bins.len() == m {
            return awgn(m, self.sigma_j_sq, rng);
        }
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for &n in &bins {
            buf[n] = complex_gaussian(rng, 1.0);
        }
        modem.ifft_in_place(&mut buf);
        let scale = (self.sigma_j_sq / bins.len() as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= scale);
        buf.into()
    }
}

/// One sinusoid of a tone jammer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Frequency in DFT-index units, `nu = u / M`.
    pub u: f64,
    pub phase: f64,
}

impl Tone {
    pub fn new(u: f64, phase: f64) -> Self {
        Self { u, phase }
    }
}

/// `V` sinusoids sharing the total power uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneJammer {
    pub tones: Vec<Tone>,
    pub sigma_j_sq: f64,
}

impl ToneJammer {
    pub fn new(tones: Vec<Tone>, sigma_j_sq: f64) -> Result<Self> {
        if tones.is_empty() {
            return Err(Error::param("tones", "at least one tone is required"));
        }
        check_power(sigma_j_sq)?;
        for t in &tones {
            if !t.u.is_finite() || !t.phase.is_finite() {
                return Err(Error::param("tones", "frequency and phase must be finite"));
            }
        }
        Ok(Self { tones, sigma_j_sq })
    }

    /// Tones at `freqs` with zero phase.
    pub fn at(freqs: &[f64], sigma_j_sq: f64) -> Result<Self> {
        Self::new(freqs.iter().map(|&u| Tone::new(u, 0.0)).collect(), sigma_j_sq)
    }

    pub fn single(u: f64, phase: f64, sigma_j_sq: f64) -> Result<Self> {
        Self::new(vec![Tone::new(u, phase)], sigma_j_sq)
    }

    pub fn count(&self) -> usize {
        self.tones.len()
    }

    /// Per-tone amplitude `sqrt(sigma_J^2 / V)`.
    pub fn amplitude(&self) -> f64 {
        (self.sigma_j_sq / self.count() as f64).sqrt()
    }

    pub fn all_integer(&self) -> bool {
        self.tones.iter().all(|t| t.u.fract() == 0.0)
    }

    pub fn validate(&self, params: &LoRaParams) -> Result<()> {
        let m = params.m() as f64;
        if self.tones.is_empty() {
            return Err(Error::param("tones", "at least one tone is required"));
        }
        for t in &self.tones {
            if !(0.0..m).contains(&t.u) {
                return Err(Error::param("tones", format!("u = {} is outside [0, {m})", t.u)));
            }
        }
        check_power(self.sigma_j_sq)
    }

    pub fn synthesize(&self, params: &LoRaParams) -> ComplexFrame {
        let m = params.m();
        let amp = self.amplitude();
        let mut out = vec![Complex::new(0.0, 0.0); m];
        for t in &self.tones {
            for (k, z) in out.iter_mut().enumerate() {
                // u*k reduced mod M keeps the phase argument small.
                let turns = (t.u * k as f64).rem_euclid(m as f64) / m as f64;
                *z += Complex::from_polar(amp, TAU * turns + t.phase);
            }
        }
        out.into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JammerSpec {
    Band(BandJammer),
    Tone(ToneJammer),
}

impl JammerSpec {
    pub fn sigma_j_sq(&self) -> f64 {
        match self {
            JammerSpec::Band(b) => b.sigma_j_sq,
            JammerSpec::Tone(t) => t.sigma_j_sq,
        }
    }

    pub fn validate(&self, params: &LoRaParams) -> Result<()> {
        match self {
            JammerSpec::Band(b) => b.validate(),
            JammerSpec::Tone(t) => t.validate(params),
        }
    }

    pub fn synthesize<R: Rng + ?Sized>(&self, modem: &Modem, rng: &mut R) -> ComplexFrame {
        match self {
            JammerSpec::Band(b) => b.synthesize(modem, rng),
            JammerSpec::Tone(t) => t.synthesize(modem.params()),
        }
    }
}

fn check_power(sigma_j_sq: f64) -> Result<()> {
    if !(sigma_j_sq > 0.0 && sigma_j_sq.is_finite()) {
        return Err(Error::param("sigma_j_sq", format!("{sigma_j_sq} must be positive")));
    }
    Ok(())
}

/// Tone jammer waveform `Σ_v sqrt(σ_J²/V) exp(2jπ (u_v/M) k + jφ_v)`.
pub fn gen_tone_jam(params: &LoRaParams, spec: &ToneJammer) -> Result<ComplexFrame> {
    spec.validate(params)?;
    Ok(spec.synthesize(params))
}

/// Band jammer waveform. Plans transforms per call; [`BandJammer::synthesize`] reuses a [`Modem`].
pub fn gen_band_jam<R: Rng + ?Sized>(
    params: &LoRaParams,
    spec: &BandJammer,
    rng: &mut R,
) -> Result<ComplexFrame> {
    spec.validate()?;
    Ok(spec.synthesize(&Modem::new(*params), rng))
}

/// Zero-mean circular complex Gaussian with `E|z|^2 = var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re * s, im * s)
}

pub fn awgn<R: Rng + ?Sized>(len: usize, sigma_sq: f64, rng: &mut R) -> ComplexFrame {
    (0..len).map(|_| complex_gaussian(rng, sigma_sq)).collect::<Vec<_>>().into()
}

/// Reception hypotheses at the victim node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Symbol, noise and jamming.
    H1,
    /// Symbol and noise.
    H2,
    /// Noise and jamming.
    H3,
}

impl Hypothesis {
    pub fn has_signal(self) -> bool {
        matches!(self, Hypothesis::H1 | Hypothesis::H2)
    }

    pub fn has_jammer(self) -> bool {
        matches!(self, Hypothesis::H1 | Hypothesis::H3)
    }

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
            Hypothesis::H2 => "H2",
            Hypothesis::H3 => "H3",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// AWGN channel. The chirp has unit power, so `SNR = 1/σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub sigma_sq: f64,
}

impl Channel {
    pub fn new(sigma_sq: f64) -> Result<Self> {
        if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
            return Err(Error::param("sigma_sq", format!("{sigma_sq} must be finite and >= 0")));
        }
        Ok(Self { sigma_sq })
    }

    pub fn noiseless() -> Self {
        Self { sigma_sq: 0.0 }
    }

    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(crate::db_to_linear(-snr_db))
    }

    pub fn snr(&self) -> f64 {
        1.0 / self.sigma_sq
    }

    /// Noise-to-jamming ratio `σ²/σ_J²`.
    pub fn njr(&self, sigma_j_sq: f64) -> f64 {
        self.sigma_sq / sigma_j_sq
    }

    /// Jamming power giving the requested NJR on this channel.
    pub fn sigma_j_sq_for_njr_db(&self, njr_db: f64) -> f64 {
        self.sigma_sq / crate::db_to_linear(njr_db)
    }
}

/// Jamming power for a signal-to-jamming ratio `1/σ_J²`.
pub fn sigma_j_sq_for_sjr_db(sjr_db: f64) -> f64 {
    crate::db_to_linear(-sjr_db)
}

/// Assembles `r[k]` according to `hypothesis`.
///
/// `symbol` must be present exactly for H1/H2 and `jam` exactly for H1/H3.
pub fn compose_received<R: Rng + ?Sized>(
    modem: &Modem,
    hypothesis: Hypothesis,
    symbol: Option<Symbol>,
    channel: &Channel,
    jam: Option<&JammerSpec>,
    rng: &mut R,
) -> Result<ComplexFrame> {
    let name = hypothesis.name();
    match (hypothesis.has_signal(), symbol.is_some()) {
        (true, false) => {
            return Err(Error::HypothesisMismatch { hypothesis: name, reason: "requires a symbol" })
        }
        (false, true) => {
            return Err(Error::HypothesisMismatch { hypothesis: name, reason: "carries no symbol" })
        }
        _ => {}
    }
    match (hypothesis.has_jammer(), jam.is_some()) {
        (true, false) => {
            return Err(Error::HypothesisMismatch { hypothesis: name, reason: "requires a jammer" })
        }
        (false, true) => return Err(Error::HypothesisMismatch { hypothesis: name, reason: "has no jammer" }),
        _ => {}
    }

    let m = modem.m();
    let mut r = match symbol {
        Some(a) => modem.modulate(a)?,
        None => ComplexFrame::zeros(m),
    };
    if channel.sigma_sq > 0.0 {
        for z in r.samples_mut() {
            *z += complex_gaussian(rng, channel.sigma_sq);
        }
    }
    if let Some(j) = jam {
        j.validate(modem.params())?;
        r.add_assign(&j.synthesize(modem, rng));
    }
    Ok(r)
}
