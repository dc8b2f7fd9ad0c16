use rand::Rng;

use super::ci::binomial_halfwidth;
use super::config::{ExperimentSpec, JammerPlan, PmdMode, PointSetup, SymbolConfig, SymbolPolicyKind};
use super::{Cell, CurvePoint, CurveRow, ExperimentOutput, HistogramRow, OutputBody, SpectrumRow};
use crate::detector::{estimate_noise_floor, pmd_theoretical, Detector, PmdTheory, TheoryOptions};
use crate::interference::{extremal_symbols, tone_spectrum_closed, tone_spectrum_numeric};
use crate::jammer::{awgn, complex_gaussian, Hypothesis, JammerSpec, Tone, ToneJammer};
use crate::modem::{argmax_lowest, argmin_lowest, ComplexFrame, Modem, Symbol};
use crate::rng::{map_chunks, Substreams, TrialRng};
use crate::stats::{ks_distance, Histogram, Normal, SaaSum};
use crate::{Error, Result};

const CHUNK: u64 = 2048;
const NOISE_TAG: u64 = 1;

fn point_id(series: usize, x: usize) -> u64 {
    ((series as u64) << 32) | x as u64
}

/// One received frame and the symbol that was sent.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFrame {
    pub frame: ComplexFrame,
    pub symbol: Option<Symbol>,
    pub jammer: Option<JammerSpec>,
}

fn draw_jammer<R: Rng + ?Sized>(plan: &JammerPlan, m: usize, rng: &mut R) -> Result<JammerSpec> {
    Ok(match plan {
        JammerPlan::Band(b) => JammerSpec::Band(*b),
        JammerPlan::Tone { count, freqs, phases, sigma_j_sq } => {
            let us: Vec<f64> = match freqs {
                Some(f) => f.clone(),
                None => (0..*count).map(|_| rng.random_range(0..m) as f64).collect(),
            };
            let tones = us
                .iter()
                .enumerate()
                .map(|(v, &u)| {
                    let phase = match phases {
                        Some(p) => p[v],
                        None => rng.random::<f64>() * std::f64::consts::TAU,
                    };
                    Tone::new(u, phase)
                })
                .collect();
            JammerSpec::Tone(ToneJammer::new(tones, *sigma_j_sq)?)
        }
    })
}

fn pick_symbol<R: Rng + ?Sized>(
    policy: &SymbolConfig,
    modem: &Modem,
    jam_frame: Option<&ComplexFrame>,
    rng: &mut R,
) -> Result<Symbol> {
    let params = modem.params();
    let a = match policy.policy {
        SymbolPolicyKind::Uniform => rng.random_range(0..params.m()),
        SymbolPolicyKind::Fixed => policy.value.ok_or_else(|| Error::config("symbol.value", "missing"))?,
        SymbolPolicyKind::AMin | SymbolPolicyKind::AMax => {
            let j = jam_frame.ok_or_else(|| Error::config("symbol.policy", "needs a jammer"))?;
            let re = modem.dechirp_dft(j)?.bins().iter().map(|z| z.re).collect::<Vec<_>>();
            if policy.policy == SymbolPolicyKind::AMin {
                argmin_lowest(re)
            } else {
                argmax_lowest(re)
            }
        }
    };
    params.symbol(a)
}

/// Builds the received frame of one trial under `hypothesis`.
///
/// The jammer (with per-trial tone draws) is synthesized first so that genie symbol
/// policies can read its actual interference spectrum; noise is added last.
pub fn draw_trial_frame(
    modem: &Modem,
    setup: &PointSetup,
    symbol: &SymbolConfig,
    hypothesis: Hypothesis,
    rng: &mut TrialRng,
) -> Result<TrialFrame> {
    let m = modem.m();
    let (jammer, jam_frame) = match (&setup.jammer, hypothesis.has_jammer()) {
        (Some(plan), true) => {
            let spec = draw_jammer(plan, m, rng)?;
            let frame = spec.synthesize(modem, rng);
            (Some(spec), Some(frame))
        }
        (None, true) => {
            return Err(Error::HypothesisMismatch {
                hypothesis: hypothesis.name(),
                reason: "requires a jammer",
            })
        }
        _ => (None, None),
    };
    let sym = if hypothesis.has_signal() {
        Some(pick_symbol(symbol, modem, jam_frame.as_ref(), rng)?)
    } else {
        None
    };
    let mut frame = match sym {
        Some(a) => modem.modulate(a)?,
        None => ComplexFrame::zeros(m),
    };
    if let Some(j) = &jam_frame {
        frame.add_assign(j);
    }
    let sigma_sq = setup.channel.sigma_sq;
    if sigma_sq > 0.0 {
        for z in frame.samples_mut() {
            *z += complex_gaussian(rng, sigma_sq);
        }
    }
    Ok(TrialFrame { frame, symbol: sym, jammer })
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    trials: u64,
    events: u64,
    voided: u64,
    eliminated: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.events += o.events;
        self.voided += o.voided;
        self.eliminated += o.eliminated;
        self
    }

    fn effective(&self) -> u64 {
        self.trials - self.voided
    }

    fn rate(&self) -> f64 {
        self.events as f64 / self.effective() as f64
    }

    fn halfwidth(&self) -> f64 {
        binomial_halfwidth(self.events, self.effective())
    }
}

enum Outcome {
    Counted { event: bool, eliminated: usize },
    Voided,
}

fn tally<F>(streams: Substreams, point: u64, trials: u64, f: F) -> Result<Tally>
where
    F: Fn(&mut TrialRng) -> Result<Outcome> + Sync + Send,
{
    let chunks = trials.div_ceil(CHUNK);
    map_chunks(chunks, |c| {
        let mut t = Tally::default();
        for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
            let mut rng = streams.trial(point, i);
            t.trials += 1;
            match f(&mut rng)? {
                Outcome::Counted { event, eliminated } => {
                    t.events += event as u64;
                    t.eliminated += eliminated as u64;
                }
                Outcome::Voided => t.voided += 1,
            }
        }
        Ok(t)
    })
    .into_iter()
    .try_fold(Tally::default(), |acc, t: Result<Tally>| Ok(acc.merge(t?)))
}

pub(super) fn run_ser_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let params = spec.params()?;
    let modem = Modem::new(params);
    let streams = Substreams::new(spec.seed);
    let hyp = spec.hypothesis();
    let trials = spec.trials();
    let mut rows = Vec::new();
    for (si, s) in spec.series_values().into_iter().enumerate() {
        for (xi, &x) in spec.sweep_values().iter().enumerate() {
            let setup = spec.resolve(s, x)?;
            let t = tally(streams, point_id(si, xi), trials, |rng| {
                let tf = draw_trial_frame(&modem, &setup, &spec.symbol, hyp, rng)?;
                let a = tf.symbol.expect("SER hypotheses carry a symbol");
                Ok(Outcome::Counted { event: modem.demodulate(&tf.frame)? != a, eliminated: 0 })
            })?;
            rows.push(CurveRow {
                series: s,
                point: CurvePoint {
                    x,
                    metric: t.rate(),
                    ci_halfwidth: t.halfwidth(),
                    trials_effective: t.effective(),
                },
                extras: vec![
                    ("errors", Cell::Int(t.events)),
                    ("snr_db", Cell::Num(-crate::linear_to_db(setup.channel.sigma_sq))),
                    ("sigma_j_sq", setup.jammer.as_ref().map_or(Cell::Empty, |j| Cell::Num(j.sigma_j_sq()))),
                ],
            });
        }
    }
    Ok(ExperimentOutput {
        kind: spec.kind,
        series_axis: spec.series.as_ref().map(|s| s.axis),
        body: OutputBody::Curve(rows),
        summary: vec![("hypothesis".into(), Cell::Text(hyp.name().into()))],
    })
}

/// σ̂² for a point: the true σ², or the mean power of `noise_frames` H0 frames.
fn noise_estimate(spec: &ExperimentSpec, setup: &PointSetup, point: u64) -> Result<f64> {
    let n = spec.detector.noise_frames;
    if n == 0 {
        return Ok(setup.detector.sigma_sq_hat);
    }
    let m = setup.params.m();
    let streams = Substreams::new(spec.seed).derive(NOISE_TAG);
    let frames: Vec<ComplexFrame> =
        (0..n).map(|i| awgn(m, setup.channel.sigma_sq, &mut streams.trial(point, i))).collect();
    estimate_noise_floor(&frames)
}

/// Jammer used by the analytic miss probability; `None` when no theory applies.
fn theory_jammer(plan: &JammerPlan) -> Result<Option<JammerSpec>> {
    Ok(match plan {
        JammerPlan::Band(b) => Some(JammerSpec::Band(*b)),
        JammerPlan::Tone { freqs: Some(f), sigma_j_sq, .. } => {
            Some(JammerSpec::Tone(ToneJammer::at(f, *sigma_j_sq)?))
        }
        // A single tone at any integer frequency has a flat spectrum.
        JammerPlan::Tone { freqs: None, count: 1, sigma_j_sq, .. } => {
            Some(JammerSpec::Tone(ToneJammer::single(1.0, 0.0, *sigma_j_sq)?))
        }
        JammerPlan::Tone { .. } => None,
    })
}

pub(super) fn run_pmd_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let params = spec.params()?;
    let modem = Modem::new(params);
    let streams = Substreams::new(spec.seed);
    let hyp = spec.hypothesis();
    let mode = spec.pmd_mode();
    let trials = spec.trials();
    let mut rows = Vec::new();
    for (si, s) in spec.series_values().into_iter().enumerate() {
        for (xi, &x) in spec.sweep_values().iter().enumerate() {
            let point = point_id(si, xi);
            let mut setup = spec.resolve(s, x)?;
            setup.detector.sigma_sq_hat = noise_estimate(spec, &setup, point)?;
            let detector = Detector::new(setup.detector, &params)?;

            let theory: Option<PmdTheory> = match (&setup.jammer, mode) {
                (Some(plan), PmdMode::Theory | PmdMode::Both) if setup.channel.sigma_sq > 0.0 => {
                    match theory_jammer(plan)? {
                        Some(j) => {
                            let opts = TheoryOptions { n_mc: spec.detector.n_mc, seed: spec.seed ^ point };
                            Some(pmd_theoretical(&setup.detector, &params, &setup.channel, &j, &opts)?)
                        }
                        None => None,
                    }
                }
                _ => None,
            };

            let sim = if mode == PmdMode::Theory {
                None
            } else {
                Some(tally(streams, point, trials, |rng| {
                    let tf = draw_trial_frame(&modem, &setup, &spec.symbol, hyp, rng)?;
                    let dft = modem.dechirp_dft(&tf.frame)?;
                    match detector.detect(&dft, rng) {
                        Ok(d) => Ok(Outcome::Counted {
                            // Jammed hypotheses count misses, clean ones count false alarms.
                            event: d.jammed != hyp.has_jammer(),
                            eliminated: d.n_eliminated,
                        }),
                        Err(Error::InsufficientBins { .. }) => Ok(Outcome::Voided),
                        Err(e) => Err(e),
                    }
                })?)
            };

            let theory_value = theory.map(|t| t.pmd);
            let point_row = match (&sim, theory_value) {
                (Some(t), _) => CurvePoint {
                    x,
                    metric: t.rate(),
                    ci_halfwidth: t.halfwidth(),
                    trials_effective: t.effective(),
                },
                (None, Some(p)) => CurvePoint {
                    x,
                    metric: p,
                    ci_halfwidth: 0.0,
                    trials_effective: match theory.map(|t| t.model) {
                        Some(crate::detector::PmdModel::ToneMonteCarlo) => spec.detector.n_mc,
                        _ => 0,
                    },
                },
                (None, None) => {
                    return Err(Error::config(
                        "detector.mode",
                        "theory is unavailable for random multi-tone jammers",
                    ))
                }
            };
            let num = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
            rows.push(CurveRow {
                series: s,
                point: point_row,
                extras: vec![
                    ("theory", num(theory_value)),
                    ("theory_model", theory.map_or(Cell::Empty, |t| Cell::Text(t.model.to_string()))),
                    ("stj_normal", num(theory.and_then(|t| t.stj_normal))),
                    ("stj_saa", num(theory.and_then(|t| t.stj_saa))),
                    ("events", sim.map_or(Cell::Empty, |t| Cell::Int(t.events))),
                    ("voided", sim.map_or(Cell::Empty, |t| Cell::Int(t.voided))),
                    (
                        "mean_eliminated",
                        num(sim
                            .filter(|t| t.effective() > 0)
                            .map(|t| t.eliminated as f64 / t.effective() as f64)),
                    ),
                    ("lambda_saa", Cell::Num(detector.lambda_saa())),
                    ("p_fa_saa", Cell::Num(setup.detector.p_fa_saa)),
                    ("sigma_sq_hat", Cell::Num(setup.detector.sigma_sq_hat)),
                ],
            });
        }
    }
    Ok(ExperimentOutput {
        kind: spec.kind,
        series_axis: spec.series.as_ref().map(|s| s.axis),
        body: OutputBody::Curve(rows),
        summary: vec![("hypothesis".into(), Cell::Text(hyp.name().into()))],
    })
}

pub(super) fn run_dft_illustration(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let params = spec.params()?;
    let m = params.m();
    let modem = Modem::new(params);
    let setup = spec.resolve(None, 0.0)?;
    let Some(JammerPlan::Tone { freqs: Some(freqs), phases, sigma_j_sq, .. }) = &setup.jammer else {
        return Err(Error::config("jammer", "the illustration needs fixed tone frequencies"));
    };
    let phases = phases.clone().unwrap_or_else(|| vec![0.0; freqs.len()]);
    let tones = freqs.iter().zip(&phases).map(|(&u, &p)| Tone::new(u, p)).collect();
    let jam = ToneJammer::new(tones, *sigma_j_sq)?;
    let spectrum = if jam.all_integer() {
        tone_spectrum_closed(&params, &jam)?
    } else {
        tone_spectrum_numeric(&params, &jam)?
    };
    let ext = extremal_symbols(&params, &spectrum)?;
    let a = match spec.symbol.policy {
        SymbolPolicyKind::Fixed => params.symbol(spec.symbol.value.unwrap_or(0))?,
        SymbolPolicyKind::AMin => ext.a_min,
        SymbolPolicyKind::AMax => ext.a_max,
        SymbolPolicyKind::Uniform => return Err(Error::config("symbol.policy", "needs a definite symbol")),
    };
    let frame = modem.modulate(a)? + &jam.synthesize(&params);
    let dft = modem.dechirp_dft(&frame)?;
    let rows: Vec<SpectrumRow> = (0..m)
        .map(|n| SpectrumRow { n, magnitude: dft[n].norm(), interference: spectrum.values()[n] })
        .collect();
    let peak = dft.peak();
    Ok(ExperimentOutput {
        kind: spec.kind,
        series_axis: None,
        body: OutputBody::Spectrum(rows),
        summary: vec![
            ("symbol".into(), Cell::Int(a.value() as u64)),
            ("a_min".into(), Cell::Int(ext.a_min.value() as u64)),
            ("a_max".into(), Cell::Int(ext.a_max.value() as u64)),
            ("gamma_plus".into(), Cell::Num(ext.gamma_plus)),
            ("gamma_minus".into(), Cell::Num(ext.gamma_minus)),
            ("peak_bin".into(), Cell::Int(peak as u64)),
            ("peak_magnitude".into(), Cell::Num(dft[peak].norm())),
            ("symbol_bin_magnitude".into(), Cell::Num(dft[a.value()].norm())),
        ],
    })
}

/// Overlay density for the jammed hypothesis.
fn h1_pdf(setup: &PointSetup) -> Result<Box<dyn Fn(f64) -> f64>> {
    let cfg = setup.detector;
    let plan = setup.jammer.as_ref().ok_or_else(|| Error::config("jammer", "missing"))?;
    let sj = plan.sigma_j_sq();
    let sigma_sq = setup.channel.sigma_sq;
    let single_strong_tone = matches!(plan, JammerPlan::Tone { count: 1, .. }) && sigma_sq <= sj;
    if single_strong_tone {
        let mu = crate::detector::stj_normal_mean(&cfg, &setup.channel, sj);
        let n = Normal::new(mu, (sigma_sq / cfg.sigma_sq_hat).sqrt())?;
        return Ok(Box::new(move |t| n.pdf(t)));
    }
    let b = (sigma_sq + sj) / cfg.sigma_sq_hat * SaaSum::h0_scale(cfg.l)?;
    let d = SaaSum::new(cfg.l, b)?;
    Ok(Box::new(move |t| d.pdf(t)))
}

fn h1_cdf(setup: &PointSetup) -> Result<Box<dyn Fn(f64) -> f64>> {
    let cfg = setup.detector;
    let plan = setup.jammer.as_ref().ok_or_else(|| Error::config("jammer", "missing"))?;
    let sj = plan.sigma_j_sq();
    let sigma_sq = setup.channel.sigma_sq;
    if matches!(plan, JammerPlan::Tone { count: 1, .. }) && sigma_sq <= sj {
        let mu = crate::detector::stj_normal_mean(&cfg, &setup.channel, sj);
        let n = Normal::new(mu, (sigma_sq / cfg.sigma_sq_hat).sqrt())?;
        return Ok(Box::new(move |t| n.cdf(t)));
    }
    let b = (sigma_sq + sj) / cfg.sigma_sq_hat * SaaSum::h0_scale(cfg.l)?;
    let d = SaaSum::new(cfg.l, b)?;
    Ok(Box::new(move |t| d.cdf(t)))
}

/// Collects `trials` statistics under `hypothesis`; voided trials are skipped.
fn collect_statistics(
    spec: &ExperimentSpec,
    modem: &Modem,
    setup: &PointSetup,
    detector: &Detector,
    hypothesis: Hypothesis,
    point: u64,
) -> Result<(Vec<f64>, u64)> {
    let streams = Substreams::new(spec.seed);
    let trials = spec.trials();
    let chunks = trials.div_ceil(CHUNK);
    let parts = map_chunks(chunks, |c| -> Result<(Vec<f64>, u64)> {
        let mut zs = Vec::with_capacity(CHUNK as usize);
        let mut voided = 0;
        for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
            let mut rng = streams.trial(point, i);
            let tf = draw_trial_frame(modem, setup, &spec.symbol, hypothesis, &mut rng)?;
            match detector.compute_statistic(&modem.dechirp_dft(&tf.frame)?, &mut rng) {
                Ok(s) => zs.push(s.z),
                Err(Error::InsufficientBins { .. }) => voided += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((zs, voided))
    });
    let mut all = Vec::with_capacity(trials as usize);
    let mut voided = 0;
    for p in parts {
        let (zs, v) = p?;
        all.extend(zs);
        voided += v;
    }
    Ok((all, voided))
}

pub(super) fn run_statistic_histogram(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let params = spec.params()?;
    let modem = Modem::new(params);
    let mut setup = spec.resolve(None, 0.0)?;
    setup.detector.sigma_sq_hat = noise_estimate(spec, &setup, 0)?;
    let detector = Detector::new(setup.detector, &params)?;
    let h0_case = Hypothesis::H0;
    let (z0, void0) = collect_statistics(spec, &modem, &setup, &detector, h0_case, 0)?;
    let (z1, void1) = collect_statistics(spec, &modem, &setup, &detector, spec.hypothesis(), 1)?;
    if z0.is_empty() || z1.is_empty() {
        return Err(Error::config("trials", "every trial was voided"));
    }
    let hi = z0.iter().chain(&z1).copied().fold(0.0, f64::max) * (1.0 + 1e-9);
    let bins = spec.histogram.bins;
    let mut h0 = Histogram::new(0.0, hi.max(1e-12), bins)?;
    h0.extend(&z0);
    let mut h1 = Histogram::new(0.0, hi.max(1e-12), bins)?;
    h1.extend(&z1);
    let saa0 = SaaSum::h0(setup.detector.l)?;
    let pdf1 = h1_pdf(&setup)?;
    let cdf1 = h1_cdf(&setup)?;
    let rows = h0
        .centers()
        .into_iter()
        .zip(h0.density().into_iter().zip(h1.density()))
        .map(|(t, (d0, d1))| HistogramRow {
            t,
            density_h0: d0,
            density_h1: d1,
            pdf_h0: saa0.pdf(t),
            pdf_h1: pdf1(t),
        })
        .collect();
    let ks0 = ks_distance(&z0, |t| saa0.cdf(t));
    let ks1 = ks_distance(&z1, &cdf1);
    Ok(ExperimentOutput {
        kind: spec.kind,
        series_axis: None,
        body: OutputBody::Histogram(rows),
        summary: vec![
            ("ks_h0".into(), Cell::Num(ks0)),
            ("ks_h1".into(), Cell::Num(ks1)),
            ("samples_h0".into(), Cell::Int(z0.len() as u64)),
            ("samples_h1".into(), Cell::Int(z1.len() as u64)),
            ("voided".into(), Cell::Int(void0 + void1)),
            ("lambda_saa".into(), Cell::Num(detector.lambda_saa())),
            ("h0_case".into(), Cell::Text(h0_case.name().into())),
            ("h1_case".into(), Cell::Text(spec.hypothesis().name().into())),
        ],
    })
}
