//! Reproducible random streams.
//!
//! Every replication of an experiment draws from its own ChaCha8 stream,
//! keyed by `(seed, replication, purpose)`. ChaCha is counter based, so a
//! stream id selects an independent keystream without any shared state:
//! reordering methods or changing `k` never shifts another consumer's draws.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Sample = 1,
    Bootstrap = 2,
}

/// Stream for a bare seed (single-sample commands).
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream for one replication and purpose.
pub fn substream(seed: u64, replication: u64, purpose: Purpose) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replication << 8) | purpose as u64);
    rng
}

/// Uniform variate on the open interval (0, 1).
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}
