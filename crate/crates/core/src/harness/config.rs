//! Experiment documents (TOML) and their validation.

use serde::{Deserialize, Serialize};

use crate::detector::{DetectorConfig, EliminationPolicy, DEFAULT_N_MC, DEFAULT_P_FA};
use crate::jammer::{sigma_j_sq_for_sjr_db, BandJammer, Channel, Hypothesis};
use crate::modem::LoRaParams;
use crate::{db_to_linear, Error, Result};

pub const DEFAULT_SER_TRIALS: u64 = 100_000;
pub const DEFAULT_PMD_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SerVsSjr,
    SerVsRho,
    #[serde(rename = "pmd_vs_l", alias = "pmd_vs_L")]
    PmdVsL,
    PmdVsNjr,
    PmdTheoryVsSim,
    DftIllustration,
    #[serde(rename = "fap_vs_l", alias = "fap_vs_L")]
    FapVsL,
    StatisticHistogram,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SerVsSjr => "ser_vs_sjr",
            ExperimentKind::SerVsRho => "ser_vs_rho",
            ExperimentKind::PmdVsL => "pmd_vs_l",
            ExperimentKind::PmdVsNjr => "pmd_vs_njr",
            ExperimentKind::PmdTheoryVsSim => "pmd_theory_vs_sim",
            ExperimentKind::DftIllustration => "dft_illustration",
            ExperimentKind::FapVsL => "fap_vs_l",
            ExperimentKind::StatisticHistogram => "statistic_histogram",
        }
    }

    pub fn is_ser(self) -> bool {
        matches!(self, ExperimentKind::SerVsSjr | ExperimentKind::SerVsRho)
    }

    pub fn is_detection(self) -> bool {
        matches!(
            self,
            ExperimentKind::PmdVsL
                | ExperimentKind::PmdVsNjr
                | ExperimentKind::PmdTheoryVsSim
                | ExperimentKind::FapVsL
        )
    }

    fn default_trials(self) -> u64 {
        if self.is_ser() {
            DEFAULT_SER_TRIALS
        } else {
            DEFAULT_PMD_TRIALS
        }
    }
}

/// Quantity varied along a sweep or across series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SjrDb,
    NjrDb,
    SnrDb,
    Rho,
    #[serde(rename = "l", alias = "L")]
    L,
    PFaSaa,
    ToneCount,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SjrDb => "sjr_db",
            Axis::NjrDb => "njr_db",
            Axis::SnrDb => "snr_db",
            Axis::Rho => "rho",
            Axis::L => "l",
            Axis::PFaSaa => "p_fa_saa",
            Axis::ToneCount => "tone_count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Absent means a noiseless channel.
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JammerType {
    Band,
    Tone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreqPolicy {
    #[default]
    Fixed,
    /// `count` independent uniform integer frequencies in `0..M`, redrawn every trial.
    RandomInteger,
}

/// Flat jammer description; which fields apply depends on `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerConfig {
    #[serde(rename = "type")]
    pub kind: JammerType,
    pub sjr_db: Option<f64>,
    pub njr_db: Option<f64>,
    pub sigma_j_sq: Option<f64>,
    // Band.
    pub rho: Option<f64>,
    pub nu_j: Option<f64>,
    // Tone.
    /// Frequencies in DFT-index units (`u = ν M`).
    pub freqs: Option<Vec<f64>>,
    /// Normalized frequencies `ν`, converted with `u = ν M` without remapping.
    pub nu: Option<Vec<f64>>,
    #[serde(default)]
    pub freq_policy: FreqPolicy,
    pub count: Option<usize>,
    /// Fixed phases; absent means uniform on `[0, 2π)` each trial.
    pub phases: Option<Vec<f64>>,
}

impl JammerConfig {
    /// Jammer of `kind` with every optional field unset.
    pub fn new(kind: JammerType) -> Self {
        JammerConfig {
            kind,
            sjr_db: None,
            njr_db: None,
            sigma_j_sq: None,
            rho: None,
            nu_j: None,
            freqs: None,
            nu: None,
            freq_policy: FreqPolicy::Fixed,
            count: None,
            phases: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolPolicyKind {
    #[default]
    Uniform,
    Fixed,
    /// Per-trial genie: the symbol whose peak the actual interference lowers most.
    AMin,
    AMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    #[serde(default)]
    pub policy: SymbolPolicyKind,
    pub value: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmdMode {
    Theory,
    Simulation,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_p_fa")]
    pub p_fa: f64,
    #[serde(default = "default_p_fa_saa")]
    pub p_fa_saa: f64,
    #[serde(default)]
    pub elimination: EliminationPolicy,
    /// H0 frames used to estimate σ̂² per point; 0 uses the true σ².
    #[serde(default)]
    pub noise_frames: u64,
    #[serde(default = "default_n_mc")]
    pub n_mc: u64,
    pub mode: Option<PmdMode>,
}

fn default_l() -> usize {
    4
}
fn default_p_fa() -> f64 {
    DEFAULT_P_FA
}
fn default_p_fa_saa() -> f64 {
    1e-3
}
fn default_n_mc() -> u64 {
    DEFAULT_N_MC
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            l: default_l(),
            p_fa: DEFAULT_P_FA,
            p_fa_saa: default_p_fa_saa(),
            elimination: EliminationPolicy::Threshold,
            noise_frames: 0,
            n_mc: DEFAULT_N_MC,
            mode: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSection {
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    60
}

impl Default for HistogramSection {
    fn default() -> Self {
        Self { bins: default_bins() }
    }
}

/// A complete experiment document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: Option<String>,
    pub kind: ExperimentKind,
    #[serde(default = "default_sf")]
    pub sf: u32,
    #[serde(default)]
    pub seed: u64,
    pub trials: Option<u64>,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub jammer: Option<JammerConfig>,
    #[serde(default)]
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub detector: DetectorSection,
    pub hypothesis: Option<Hypothesis>,
    pub sweep: Option<Sweep>,
    pub series: Option<Sweep>,
    #[serde(default)]
    pub histogram: HistogramSection,
}

fn default_sf() -> u32 {
    7
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::config(field, reason)
}

impl ExperimentSpec {
    /// Minimal document of the given kind; callers fill in the rest.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            name: None,
            kind,
            sf: default_sf(),
            seed: 0,
            trials: None,
            channel: ChannelConfig::default(),
            jammer: None,
            symbol: SymbolConfig::default(),
            detector: DetectorSection::default(),
            hypothesis: None,
            sweep: None,
            series: None,
            histogram: HistogramSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field =
                msg.split('`').nth(1).filter(|_| msg.contains("field")).unwrap_or("document").to_string();
            bad(&field, msg.trim())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment documents always serialize")
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or_else(|| self.kind.default_trials())
    }

    pub fn params(&self) -> Result<LoRaParams> {
        LoRaParams::new(self.sf).map_err(|e| bad("sf", e.to_string()))
    }

    pub fn pmd_mode(&self) -> PmdMode {
        self.detector.mode.unwrap_or(match self.kind {
            ExperimentKind::PmdVsL | ExperimentKind::PmdVsNjr => PmdMode::Theory,
            ExperimentKind::FapVsL => PmdMode::Simulation,
            _ => PmdMode::Both,
        })
    }

    /// Reception case simulated by the detection and histogram kinds.
    pub fn hypothesis(&self) -> Hypothesis {
        self.hypothesis.unwrap_or(match (self.kind, self.jammer.is_some()) {
            (ExperimentKind::FapVsL, _) => Hypothesis::H0,
            (_, true) => Hypothesis::H1,
            (_, false) => Hypothesis::H2,
        })
    }

    /// Divides every Monte-Carlo count by `factor` (at least one trial remains).
    pub fn scaled_down(mut self, factor: u64) -> Self {
        let f = factor.max(1);
        self.trials = Some((self.trials() / f).max(1));
        self.detector.n_mc = (self.detector.n_mc / f).max(1);
        if self.detector.noise_frames > 0 {
            self.detector.noise_frames = (self.detector.noise_frames / f).max(1);
        }
        self
    }

    /// Sweep values, or a single point at `x = 0` for kinds without a sweep.
    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep.as_ref().map(|s| s.values.clone()).unwrap_or_else(|| vec![0.0])
    }

    pub fn series_values(&self) -> Vec<Option<f64>> {
        match &self.series {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.params()?;
        let m = params.m();
        if let Some(name) = &self.name {
            let ok = |c: char| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.');
            if name.is_empty() || name.starts_with('.') || !name.chars().all(ok) {
                return Err(bad("name", format!("`{name}` must be a plain file stem ([A-Za-z0-9_.-])")));
            }
        }
        if self.trials() == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if let Some(snr) = self.channel.snr_db {
            if !snr.is_finite() {
                return Err(bad("channel.snr_db", "must be finite"));
            }
        }
        self.validate_sweeps()?;
        self.validate_jammer(m)?;
        self.validate_symbol(m)?;
        self.validate_detector(m)?;
        self.validate_kind()?;
        // Every point must resolve.
        for s in self.series_values() {
            for x in self.sweep_values() {
                self.resolve(s, x)?;
            }
        }
        Ok(())
    }

    fn validate_sweeps(&self) -> Result<()> {
        for (name, sw) in [("sweep", &self.sweep), ("series", &self.series)] {
            if let Some(sw) = sw {
                if sw.values.is_empty() {
                    return Err(bad(&format!("{name}.values"), "must not be empty"));
                }
                if sw.values.iter().any(|v| !v.is_finite()) {
                    return Err(bad(&format!("{name}.values"), "must be finite"));
                }
            }
        }
        if let (Some(a), Some(b)) = (&self.sweep, &self.series) {
            if a.axis == b.axis {
                return Err(bad("series.axis", "must differ from sweep.axis"));
            }
        }
        Ok(())
    }

    fn swept(&self, axis: Axis) -> bool {
        self.sweep.as_ref().is_some_and(|s| s.axis == axis)
            || self.series.as_ref().is_some_and(|s| s.axis == axis)
    }

    fn validate_jammer(&self, m: usize) -> Result<()> {
        let Some(j) = &self.jammer else {
            for axis in [Axis::SjrDb, Axis::NjrDb, Axis::Rho, Axis::ToneCount] {
                if self.swept(axis) {
                    return Err(bad("jammer", format!("sweeping `{}` needs a jammer", axis.name())));
                }
            }
            return Ok(());
        };
        let power_fields =
            [j.sjr_db.is_some(), j.njr_db.is_some(), j.sigma_j_sq.is_some()].iter().filter(|&&b| b).count();
        let power_swept = self.swept(Axis::SjrDb) || self.swept(Axis::NjrDb);
        if power_fields > 1 {
            return Err(bad("jammer.sjr_db", "give only one of sjr_db, njr_db, sigma_j_sq"));
        }
        if power_fields == 0 && !power_swept {
            return Err(bad("jammer.sjr_db", "jamming power missing: set sjr_db, njr_db or sigma_j_sq"));
        }
        if let Some(v) = j.sigma_j_sq {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad("jammer.sigma_j_sq", "must be positive"));
            }
        }
        if (j.njr_db.is_some() || self.swept(Axis::NjrDb)) && self.channel.snr_db.is_none() {
            return Err(bad("channel.snr_db", "NJR needs a noisy channel"));
        }
        match j.kind {
            JammerType::Band => {
                for (field, set) in [
                    ("jammer.freqs", j.freqs.is_some()),
                    ("jammer.nu", j.nu.is_some()),
                    ("jammer.count", j.count.is_some()),
                    ("jammer.phases", j.phases.is_some()),
                    ("jammer.freq_policy", j.freq_policy != FreqPolicy::Fixed),
                ] {
                    if set {
                        return Err(bad(field, "not used by a band jammer"));
                    }
                }
                if self.swept(Axis::ToneCount) {
                    return Err(bad("sweep.axis", "tone_count needs a tone jammer"));
                }
                BandJammer::new(j.rho.unwrap_or(1.0), j.nu_j.unwrap_or(0.0), 1.0).map_err(|e| {
                    let field = if e.to_string().contains("nu_j") { "jammer.nu_j" } else { "jammer.rho" };
                    bad(field, e.to_string())
                })?;
            }
            JammerType::Tone => {
                for (field, set) in [("jammer.rho", j.rho.is_some()), ("jammer.nu_j", j.nu_j.is_some())] {
                    if set {
                        return Err(bad(field, "not used by a tone jammer"));
                    }
                }
                if self.swept(Axis::Rho) {
                    return Err(bad("sweep.axis", "rho needs a band jammer"));
                }
                if j.freqs.is_some() && j.nu.is_some() {
                    return Err(bad("jammer.nu", "give either freqs or nu"));
                }
                match j.freq_policy {
                    FreqPolicy::Fixed => {
                        let freqs = self
                            .fixed_freqs(m)
                            .ok_or_else(|| bad("jammer.freqs", "fixed frequency policy needs freqs or nu"))?;
                        if freqs.is_empty() {
                            return Err(bad("jammer.freqs", "at least one tone"));
                        }
                        if let Some(&u) = freqs.iter().find(|&&u| !(0.0..m as f64).contains(&u)) {
                            return Err(bad("jammer.freqs", format!("u = {u} is outside [0, {m})")));
                        }
                        if let Some(c) = j.count {
                            if c != freqs.len() {
                                return Err(bad("jammer.count", "must match the number of frequencies"));
                            }
                        }
                    }
                    FreqPolicy::RandomInteger => {
                        if j.freqs.is_some() || j.nu.is_some() {
                            return Err(bad("jammer.freqs", "random_integer draws its own frequencies"));
                        }
                        match j.count {
                            Some(c) if c >= 1 && c < m => {}
                            _ => return Err(bad("jammer.count", format!("must be in [1, {}]", m - 1))),
                        }
                    }
                }
                if let Some(ph) = &j.phases {
                    if ph.len() != self.base_tone_count(m) {
                        return Err(bad("jammer.phases", "one phase per tone"));
                    }
                    if ph.iter().any(|p| !p.is_finite()) {
                        return Err(bad("jammer.phases", "must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn fixed_freqs(&self, m: usize) -> Option<Vec<f64>> {
        let j = self.jammer.as_ref()?;
        if let Some(f) = &j.freqs {
            return Some(f.clone());
        }
        j.nu.as_ref().map(|nu| nu.iter().map(|v| v * m as f64).collect())
    }

    fn base_tone_count(&self, m: usize) -> usize {
        let Some(j) = &self.jammer else { return 0 };
        match j.freq_policy {
            FreqPolicy::Fixed => self.fixed_freqs(m).map_or(0, |f| f.len()),
            FreqPolicy::RandomInteger => j.count.unwrap_or(0),
        }
    }

    fn validate_symbol(&self, m: usize) -> Result<()> {
        let s = &self.symbol;
        match s.policy {
            SymbolPolicyKind::Fixed => match s.value {
                Some(a) if a < m => {}
                Some(a) => return Err(bad("symbol.value", format!("{a} is outside [0, {m})"))),
                None => return Err(bad("symbol.value", "fixed policy needs a value")),
            },
            _ if s.value.is_some() => {
                return Err(bad("symbol.value", "only used with the fixed policy"));
            }
            SymbolPolicyKind::AMin | SymbolPolicyKind::AMax => {
                if !self.jammer.as_ref().is_some_and(|j| j.kind == JammerType::Tone) {
                    return Err(bad("symbol.policy", "a_min / a_max need a tone jammer"));
                }
            }
            SymbolPolicyKind::Uniform => {}
        }
        Ok(())
    }

    fn validate_detector(&self, m: usize) -> Result<()> {
        let d = &self.detector;
        if d.l == 0 || d.l >= m {
            return Err(bad("detector.l", format!("must be in [1, {}]", m - 1)));
        }
        for (field, p) in [("detector.p_fa", d.p_fa), ("detector.p_fa_saa", d.p_fa_saa)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(bad(field, format!("{p} is outside (0, 1)")));
            }
        }
        if d.n_mc == 0 {
            return Err(bad("detector.n_mc", "must be at least 1"));
        }
        if self.histogram.bins == 0 {
            return Err(bad("histogram.bins", "must be at least 1"));
        }
        Ok(())
    }

    /// Noise is configured, fixed or swept.
    fn is_noisy(&self) -> bool {
        self.channel.snr_db.is_some()
            || [&self.sweep, &self.series].iter().any(|s| s.as_ref().is_some_and(|s| s.axis == Axis::SnrDb))
    }

    fn validate_kind(&self) -> Result<()> {
        use ExperimentKind::*;
        let required_axis = match self.kind {
            // Without a jammer the same kind gives the unjammed reference curve.
            SerVsSjr if self.jammer.is_none() => Some(Axis::SnrDb),
            SerVsSjr => Some(Axis::SjrDb),
            SerVsRho => Some(Axis::Rho),
            PmdVsL | FapVsL => Some(Axis::L),
            PmdVsNjr => Some(Axis::NjrDb),
            PmdTheoryVsSim => None,
            DftIllustration | StatisticHistogram => {
                if self.sweep.is_some() || self.series.is_some() {
                    return Err(bad("sweep", format!("{} takes no sweep", self.kind.name())));
                }
                None
            }
        };
        if let Some(axis) = required_axis {
            match &self.sweep {
                Some(s) if s.axis == axis => {}
                _ => return Err(bad("sweep.axis", format!("{} sweeps `{}`", self.kind.name(), axis.name()))),
            }
        }
        if self.kind == PmdTheoryVsSim && self.sweep.is_none() {
            return Err(bad("sweep", "pmd_theory_vs_sim needs a sweep"));
        }
        let hyp = self.hypothesis();
        if hyp.has_jammer() != self.jammer.is_some() {
            return Err(bad("hypothesis", format!("{hyp} and the jammer section disagree")));
        }
        match self.kind {
            SerVsSjr | SerVsRho => {
                if !hyp.has_signal() {
                    return Err(bad("hypothesis", "SER needs a transmitted symbol"));
                }
                if self.kind == SerVsRho && self.jammer.as_ref().map(|j| j.kind) != Some(JammerType::Band) {
                    return Err(bad("jammer.type", "ser_vs_rho needs a band jammer"));
                }
            }
            PmdVsL | PmdVsNjr | PmdTheoryVsSim => {
                if self.jammer.is_none() {
                    return Err(bad("jammer", "miss-detection experiments need a jammer"));
                }
                if self.pmd_mode() != PmdMode::Simulation && !self.is_noisy() {
                    return Err(bad("channel.snr_db", "theory needs a noisy channel"));
                }
            }
            FapVsL => {
                if self.pmd_mode() != PmdMode::Simulation {
                    return Err(bad("detector.mode", "fap_vs_l is simulation only"));
                }
            }
            DftIllustration => {
                if self.channel.snr_db.is_some() {
                    return Err(bad("channel.snr_db", "the illustration is noise-free"));
                }
                if self.jammer.as_ref().map(|j| j.kind) != Some(JammerType::Tone) {
                    return Err(bad("jammer.type", "the illustration needs a tone jammer"));
                }
                if self.jammer.as_ref().is_some_and(|j| j.freq_policy != FreqPolicy::Fixed) {
                    return Err(bad("jammer.freq_policy", "the illustration needs fixed frequencies"));
                }
                if self.symbol.policy == SymbolPolicyKind::Uniform {
                    return Err(bad("symbol.policy", "the illustration needs fixed, a_min or a_max"));
                }
            }
            StatisticHistogram => {
                if self.jammer.is_none() {
                    return Err(bad("jammer", "the histogram compares H0 with a jammed hypothesis"));
                }
                if self.channel.snr_db.is_none() {
                    return Err(bad("channel.snr_db", "the histogram needs a noisy channel"));
                }
            }
        }
        let noisy = self.is_noisy();
        if (self.kind.is_detection() || self.kind == StatisticHistogram)
            && !noisy
            && self.detector.noise_frames == 0
        {
            return Err(bad("channel.snr_db", "the detector needs a noise floor"));
        }
        if self.kind.is_ser() && self.jammer.is_none() && !noisy {
            return Err(bad("channel.snr_db", "nothing corrupts the symbol"));
        }
        Ok(())
    }

    /// Settings of one `(series, x)` point.
    pub fn resolve(&self, series: Option<f64>, x: f64) -> Result<PointSetup> {
        let params = self.params()?;
        let m = params.m();
        let mut snr_db = self.channel.snr_db;
        let mut l = self.detector.l;
        let mut p_fa_saa = self.detector.p_fa_saa;
        let mut power = self.jammer.as_ref().and_then(|j| {
            j.sjr_db.map(Power::SjrDb).or(j.njr_db.map(Power::NjrDb)).or(j.sigma_j_sq.map(Power::Linear))
        });
        let mut rho = self.jammer.as_ref().and_then(|j| j.rho).unwrap_or(1.0);
        let mut tone_count = self.base_tone_count(m);
        let applied =
            [self.series.as_ref().map(|s| (s.axis, series)), self.sweep.as_ref().map(|s| (s.axis, Some(x)))];
        for (axis, value) in applied.into_iter().flatten() {
            let Some(v) = value else { continue };
            let field = axis.name();
            match axis {
                Axis::SjrDb => power = Some(Power::SjrDb(v)),
                Axis::NjrDb => power = Some(Power::NjrDb(v)),
                Axis::SnrDb => snr_db = Some(v),
                Axis::Rho => rho = v,
                Axis::L => l = as_count(v, field)?,
                Axis::PFaSaa => p_fa_saa = v,
                Axis::ToneCount => tone_count = as_count(v, field)?,
            }
        }
        let channel = match snr_db {
            Some(s) => Channel::from_snr_db(s).map_err(|e| bad("channel.snr_db", e.to_string()))?,
            None => Channel::noiseless(),
        };
        let sigma_j_sq = power.map(|p| p.sigma_j_sq(&channel));
        let jammer = match (&self.jammer, sigma_j_sq) {
            (None, _) => None,
            (Some(_), None) => return Err(bad("jammer.sjr_db", "jamming power missing")),
            (Some(j), Some(sj)) => {
                if !(sj > 0.0 && sj.is_finite()) {
                    return Err(bad("jammer", format!("resolved jamming power {sj} is not positive")));
                }
                Some(match j.kind {
                    JammerType::Band => {
                        let b = BandJammer::new(rho, j.nu_j.unwrap_or(0.0), sj)
                            .map_err(|e| bad("jammer.rho", e.to_string()))?;
                        JammerPlan::Band(b)
                    }
                    JammerType::Tone => {
                        let freqs = match j.freq_policy {
                            FreqPolicy::Fixed => {
                                let all = self.fixed_freqs(m).unwrap_or_default();
                                if tone_count == 0 || tone_count > all.len() {
                                    return Err(bad(
                                        "jammer.freqs",
                                        format!("{tone_count} tones requested, {} listed", all.len()),
                                    ));
                                }
                                Some(all[..tone_count].to_vec())
                            }
                            FreqPolicy::RandomInteger => {
                                if tone_count == 0 || tone_count >= m {
                                    return Err(bad("jammer.count", format!("must be in [1, {}]", m - 1)));
                                }
                                None
                            }
                        };
                        let phases = j.phases.as_ref().map(|p| p[..tone_count.min(p.len())].to_vec());
                        JammerPlan::Tone { count: tone_count, freqs, phases, sigma_j_sq: sj }
                    }
                })
            }
        };
        let sigma_sq_for_detector = if channel.sigma_sq > 0.0 { channel.sigma_sq } else { 1.0 };
        let detector = DetectorConfig {
            l,
            p_fa: self.detector.p_fa,
            p_fa_saa,
            sigma_sq_hat: sigma_sq_for_detector,
            elimination: self.detector.elimination,
        };
        if self.kind.is_detection() || self.kind == ExperimentKind::StatisticHistogram {
            detector.validate(&params).map_err(|e| {
                let field = match &e {
                    Error::InvalidParameter { name, .. } => format!("detector.{name}"),
                    _ => "detector".into(),
                };
                bad(&field, e.to_string())
            })?;
        }
        Ok(PointSetup { params, channel, jammer, detector })
    }
}

fn as_count(v: f64, field: &str) -> Result<usize> {
    if v.fract() != 0.0 || v < 1.0 {
        return Err(bad(field, format!("{v} is not a positive integer")));
    }
    Ok(v as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Power {
    SjrDb(f64),
    NjrDb(f64),
    Linear(f64),
}

impl Power {
    fn sigma_j_sq(self, channel: &Channel) -> f64 {
        match self {
            Power::SjrDb(s) => sigma_j_sq_for_sjr_db(s),
            Power::NjrDb(n) => channel.sigma_sq / db_to_linear(n),
            Power::Linear(v) => v,
        }
    }
}

/// Jammer of one point; tone frequencies and phases may still be drawn per trial.
#[derive(Debug, Clone, PartialEq)]
pub enum JammerPlan {
    Band(BandJammer),
    Tone { count: usize, freqs: Option<Vec<f64>>, phases: Option<Vec<f64>>, sigma_j_sq: f64 },
}

impl JammerPlan {
    pub fn sigma_j_sq(&self) -> f64 {
        match self {
            JammerPlan::Band(b) => b.sigma_j_sq,
            JammerPlan::Tone { sigma_j_sq, .. } => *sigma_j_sq,
        }
    }
}

/// Fully resolved settings for one curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSetup {
    pub params: LoRaParams,
    pub channel: Channel,
    pub jammer: Option<JammerPlan>,
    /// `sigma_sq_hat` holds the true σ² (1 on a noiseless channel) until estimated.
    pub detector: DetectorConfig,
}
