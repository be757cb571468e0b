//! Reproducible Monte Carlo means.
//!
//! Draws are split into fixed-size chunks. Chunk `k` reads from ChaCha8
//! stream `k` of the run seed, and chunk statistics are merged in chunk
//! order, so the result is bit-identical whatever the thread count.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHUNK_SIZE: usize = 4096;

pub type McRng = ChaCha8Rng;

/// Independent generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> McRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval `(0, 1)`.
pub fn uniform_open(rng: &mut McRng) -> f64 {
    rng.sample(Open01)
}

/// Derives a per-task seed, e.g. one per grid row (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// Mean and standard error of `n_reps` draws of `draw`.
///
/// `draw` gets the chunk's generator and must consume it deterministically.
/// The first failing draw (in draw order) aborts the run.
pub fn mc_mean<F>(n_reps: usize, seed: u64, draw: F) -> Result<McSummary>
where
    F: Fn(&mut McRng) -> Result<f64> + Sync,
{
    if n_reps < 2 {
        return Err(Error::InvalidParameter {
            name: "n_reps",
            value: n_reps as f64,
        });
    }
    let n_chunks = n_reps.div_ceil(CHUNK_SIZE);
    let chunks: Vec<Result<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK_SIZE.min(n_reps - k * CHUNK_SIZE);
            let mut rng = stream_rng(seed, k as u64);
            let mut m = Moments {
                n: 0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..len {
                let x = draw(&mut rng)?;
                m.n += 1;
                let delta = x - m.mean;
                m.mean += delta / m.n as f64;
                m.m2 += delta * (x - m.mean);
            }
            Ok(m)
        })
        .collect();

    let mut total = Moments {
        n: 0,
        mean: 0.0,
        m2: 0.0,
    };
    for chunk in chunks {
        total = total.merge(chunk?);
    }
    let variance = total.m2 / (total.n - 1) as f64;
    Ok(McSummary {
        mean: total.mean,
        std_error: (variance / total.n as f64).sqrt(),
        n: total.n,
    })
}
