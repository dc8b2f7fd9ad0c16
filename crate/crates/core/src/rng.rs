//! Deterministic per-trial random substreams.
//!
//! Every trial owns a ChaCha8 stream keyed by `(seed, point)` and selected by the
//! trial index, so results do not depend on how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn key(&self, point: u64) -> [u8; 32] {
        let mut state = self.seed ^ point.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        key
    }

    /// Generator for trial `trial` of sweep point `point`.
    pub fn trial(&self, point: u64, trial: u64) -> TrialRng {
        let mut rng = ChaCha8Rng::from_seed(self.key(point));
        rng.set_stream(trial);
        rng
    }

    /// A child family for an independent purpose (noise-floor estimation, MC theory, ...).
    pub fn derive(&self, tag: u64) -> Substreams {
        let mut state = self.seed ^ tag.rotate_left(17);
        Substreams { seed: splitmix64(&mut state) }
    }
}

/// Evaluates `f` on every chunk index in `0..chunks`, in parallel when enabled; results keep index order.
pub(crate) fn map_chunks<T, F>(chunks: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(f).collect()
    }
}
