//! LoRa physical-layer jamming laboratory.
//!
//! The crate is organised bottom-up:
//!
//! * [`modem`]: chirp-spread-spectrum symbol synthesis and the dechirp + DFT receiver.
//! * [`jammer`]: band and tone jammers, and received-frame composition under H0..H3.
//! * [`interference`]: tone-jamming interference spectra via generalized quadratic Gauss sums.
//! * [`stats`]: Rayleigh / Rician / normal laws and the small-argument approximation (SAA)
//!   for sums of Rayleigh variates.
//! * [`detector`]: the jammer detector (noise floor, bin elimination, statistic, thresholds)
//!   and theoretical miss-detection probabilities.
//! * [`harness`]: seeded Monte-Carlo campaigns producing curve points with confidence intervals.

pub mod detector;
pub mod error;
pub mod harness;
pub mod interference;
pub mod jammer;
pub mod modem;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use modem::{ComplexFrame, DftFrame, LoRaParams, Modem, Symbol};

/// Complex sample type used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Converts a decibel ratio to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
