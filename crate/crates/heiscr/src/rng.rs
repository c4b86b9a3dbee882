//! Deterministic randomness.
//!
//! Every stochastic routine in the crate draws from a [`ChaCha8Rng`] so that
//! a run is reproducible bit-for-bit from a single `u64` seed, on any
//! platform. Independent consumers (one per check, one per grid cell, …)
//! get *streams* of the same seeded generator rather than ad-hoc reseeds:
//! ChaCha streams are statistically independent by construction and adding
//! a new consumer never perturbs the draws of existing ones.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Root generator for a run.
pub fn root(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for sub-task `stream` of the run seeded by `seed`.
///
/// Streams 0.. are reserved for the verification suite (one per registered
/// check, in registry order); other consumers pick fixed stream ids far
/// from that range.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_draws() {
        let a: Vec<f64> = (0..8).map(|_| root(42).gen()).collect();
        let b: Vec<f64> = (0..8).map(|_| root(42).gen()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ_but_are_reproducible() {
        let mut s0 = stream(7, 0);
        let mut s1 = stream(7, 1);
        let x0: f64 = s0.gen();
        let x1: f64 = s1.gen();
        assert_ne!(x0, x1);
        assert_eq!(x0, stream(7, 0).gen::<f64>());
        assert_eq!(x1, stream(7, 1).gen::<f64>());
    }
}
