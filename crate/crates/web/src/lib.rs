//! Browser bindings: tone spectrum, theoretical miss probability and statistic histograms.
//!
//! Each export has a plain-Rust twin returning [`jamlab::Result`] so it can be tested natively.

use jamlab::detector::PmdModel;
use jamlab::harness::{
    self, Axis, ExperimentKind, ExperimentSpec, JammerConfig, JammerType, OutputBody, PmdMode, Sweep,
    SymbolConfig, SymbolPolicyKind,
};
use jamlab::{Error, Result};
use wasm_bindgen::prelude::*;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn summary(out: &harness::ExperimentOutput, key: &str) -> f64 {
    out.summary_value(key).and_then(|c| c.as_f64()).unwrap_or(f64::NAN)
}

#[wasm_bindgen]
pub struct Spectrum {
    magnitude: Vec<f64>,
    interference: Vec<f64>,
    symbol: u32,
    a_min: u32,
    a_max: u32,
    peak: f64,
}

#[wasm_bindgen]
impl Spectrum {
    /// `|R̃[n]|` of the noise-free received symbol.
    #[wasm_bindgen(getter)]
    pub fn magnitude(&self) -> Vec<f64> {
        self.magnitude.clone()
    }

    /// `|S̃[n]|` of the jammer alone.
    #[wasm_bindgen(getter)]
    pub fn interference(&self) -> Vec<f64> {
        self.interference.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn symbol(&self) -> u32 {
        self.symbol
    }

    #[wasm_bindgen(getter)]
    pub fn a_min(&self) -> u32 {
        self.a_min
    }

    #[wasm_bindgen(getter)]
    pub fn a_max(&self) -> u32 {
        self.a_max
    }

    #[wasm_bindgen(getter)]
    pub fn peak(&self) -> f64 {
        self.peak
    }
}

/// `symbol < 0` picks the most helped symbol.
pub fn spectrum_of(sf: u32, freqs: Vec<f64>, sigma_j_sq: f64, symbol: i32) -> Result<Spectrum> {
    let mut spec = ExperimentSpec::new(ExperimentKind::DftIllustration);
    spec.sf = sf;
    let mut jam = JammerConfig::new(JammerType::Tone);
    jam.freqs = Some(freqs);
    jam.sigma_j_sq = Some(sigma_j_sq);
    spec.jammer = Some(jam);
    spec.symbol = if symbol < 0 {
        SymbolConfig { policy: SymbolPolicyKind::AMax, value: None }
    } else {
        SymbolConfig { policy: SymbolPolicyKind::Fixed, value: Some(symbol as usize) }
    };
    let out = harness::run(&spec)?;
    let OutputBody::Spectrum(rows) = &out.body else {
        return Err(Error::Config { field: "kind".into(), reason: "expected a spectrum".into() });
    };
    Ok(Spectrum {
        magnitude: rows.iter().map(|r| r.magnitude).collect(),
        interference: rows.iter().map(|r| r.interference.norm()).collect(),
        symbol: summary(&out, "symbol") as u32,
        a_min: summary(&out, "a_min") as u32,
        a_max: summary(&out, "a_max") as u32,
        peak: summary(&out, "symbol_bin_magnitude"),
    })
}

#[wasm_bindgen]
pub fn tone_spectrum(sf: u32, freqs: Vec<f64>, sigma_j_sq: f64, symbol: i32) -> Result<Spectrum, JsError> {
    spectrum_of(sf, freqs, sigma_j_sq, symbol).map_err(js)
}

/// Theoretical P_md for `L = 1, 2, 4, ..., l_max`. `jammer` is `"band"` or `"tone"`
/// (one integer tone at bin 20).
pub fn pmd_curve_of(jammer: &str, snr_db: f64, njr_db: f64, p_fa_saa: f64, l_max: u32) -> Result<Vec<f64>> {
    let mut spec = ExperimentSpec::new(ExperimentKind::PmdVsL);
    spec.channel.snr_db = Some(snr_db);
    let mut jam = match jammer {
        "band" => JammerConfig::new(JammerType::Band),
        "tone" => {
            let mut j = JammerConfig::new(JammerType::Tone);
            j.freqs = Some(vec![20.0]);
            j
        }
        other => {
            return Err(Error::Config {
                field: "jammer.type".into(),
                reason: format!("unknown jammer `{other}`"),
            })
        }
    };
    jam.njr_db = Some(njr_db);
    spec.jammer = Some(jam);
    spec.detector.p_fa_saa = p_fa_saa;
    spec.detector.mode = Some(PmdMode::Theory);
    let ls: Vec<f64> = std::iter::successors(Some(1u32), |l| Some(l * 2))
        .take_while(|&l| l <= l_max)
        .map(f64::from)
        .collect();
    spec.sweep = Some(Sweep { axis: Axis::L, values: ls });
    let out = harness::run(&spec)?;
    Ok(out.curve().into_iter().flatten().map(|r| r.point.metric).collect())
}

#[wasm_bindgen]
pub fn pmd_curve(
    jammer: &str,
    snr_db: f64,
    njr_db: f64,
    p_fa_saa: f64,
    l_max: u32,
) -> Result<Vec<f64>, JsError> {
    pmd_curve_of(jammer, snr_db, njr_db, p_fa_saa, l_max).map_err(js)
}

/// Which analytic form the detector theory uses for a single tone at `njr_db`.
#[wasm_bindgen]
pub fn tone_model(njr_db: f64) -> String {
    if njr_db <= 0.0 { PmdModel::ToneNormal } else { PmdModel::ToneSaa }.to_string()
}

#[wasm_bindgen]
pub struct Histogram {
    t: Vec<f64>,
    density_h0: Vec<f64>,
    density_h1: Vec<f64>,
    pdf_h0: Vec<f64>,
    pdf_h1: Vec<f64>,
    ks_h0: f64,
    ks_h1: f64,
    lambda_saa: f64,
}

#[wasm_bindgen]
impl Histogram {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn density_h0(&self) -> Vec<f64> {
        self.density_h0.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn density_h1(&self) -> Vec<f64> {
        self.density_h1.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn pdf_h0(&self) -> Vec<f64> {
        self.pdf_h0.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn pdf_h1(&self) -> Vec<f64> {
        self.pdf_h1.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ks_h0(&self) -> f64 {
        self.ks_h0
    }

    #[wasm_bindgen(getter)]
    pub fn ks_h1(&self) -> f64 {
        self.ks_h1
    }

    #[wasm_bindgen(getter)]
    pub fn lambda_saa(&self) -> f64 {
        self.lambda_saa
    }
}

/// Clean vs band-jammed statistic, `trials` draws of each.
pub fn histogram_of(l: u32, snr_db: f64, njr_db: f64, rho: f64, trials: u32, seed: u32) -> Result<Histogram> {
    let mut spec = ExperimentSpec::new(ExperimentKind::StatisticHistogram);
    spec.seed = u64::from(seed);
    spec.trials = Some(u64::from(trials));
    spec.channel.snr_db = Some(snr_db);
    let mut jam = JammerConfig::new(JammerType::Band);
    jam.rho = Some(rho);
    jam.njr_db = Some(njr_db);
    spec.jammer = Some(jam);
    spec.detector.l = l as usize;
    let out = harness::run(&spec)?;
    let OutputBody::Histogram(rows) = &out.body else {
        return Err(Error::Config { field: "kind".into(), reason: "expected a histogram".into() });
    };
    Ok(Histogram {
        t: rows.iter().map(|r| r.t).collect(),
        density_h0: rows.iter().map(|r| r.density_h0).collect(),
        density_h1: rows.iter().map(|r| r.density_h1).collect(),
        pdf_h0: rows.iter().map(|r| r.pdf_h0).collect(),
        pdf_h1: rows.iter().map(|r| r.pdf_h1).collect(),
        ks_h0: summary(&out, "ks_h0"),
        ks_h1: summary(&out, "ks_h1"),
        lambda_saa: summary(&out, "lambda_saa"),
    })
}

#[wasm_bindgen]
pub fn statistic_histogram(
    l: u32,
    snr_db: f64,
    njr_db: f64,
    rho: f64,
    trials: u32,
    seed: u32,
) -> Result<Histogram, JsError> {
    histogram_of(l, snr_db, njr_db, rho, trials, seed).map_err(js)
}
