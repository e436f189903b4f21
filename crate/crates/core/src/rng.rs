//! Seedable random stream used by every randomized decision in the learner.
//!
//! The generator is ChaCha with 8 rounds. A stream is identified by a 64-bit
//! master seed and a 64-bit run index:
//!
//! * the 32-byte ChaCha key is the master seed in little-endian order in
//!   bytes `0..8`, followed by 24 zero bytes;
//! * the ChaCha stream id (nonce) is the run index.
//!
//! Different run indices under one master seed therefore give independent
//! keystreams, and the output is identical on every platform.
//!
//! Draw accounting:
//!
//! * [`RandomStream::next_u64`] consumes one 64-bit word.
//! * [`RandomStream::next_f64`] consumes one word and returns a multiple of
//!   `2^-53` in `[0, 1)`.
//! * [`RandomStream::below`] consumes one word per attempt; an attempt is
//!   rejected only when the word falls in the short tail that would bias the
//!   modulo, which for `m = 1` never happens.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Sub-stream of a run's seed that drives tie-breaks and removal coins.
pub const LEARNER_STREAM: u64 = 0;
/// Sub-stream that generates the input sequence.
pub const GENERATOR_STREAM: u64 = 1;
/// Sub-stream for stubbed hit/miss oracles.
pub const ORACLE_STREAM: u64 = 2;

#[derive(Clone, Debug)]
pub struct RandomStream {
    inner: ChaCha8Rng,
    draws: u64,
}

impl RandomStream {
    /// Stream 0 of `seed`.
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent sub-stream `run_index` of the master `seed`.
    pub fn substream(seed: u64, run_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(run_index);
        Self { inner, draws: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    /// Uniform real in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..m` by rejection; `m` must be nonzero.
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0, "below(0)");
        // Words below `2^64 mod m` are rejected so the accepted range is a
        // whole number of copies of 0..m.
        let reject_under = m.wrapping_neg() % m;
        loop {
            let word = self.next_u64();
            if word >= reject_under {
                return word % m;
            }
        }
    }

    /// Bernoulli trial with success probability `p` using one `next_f64` draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Number of 64-bit words consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_words() {
        let mut a = RandomStream::new(7);
        let mut b = RandomStream::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = RandomStream::substream(7, 0);
        let mut b = RandomStream::substream(7, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn below_one_consumes_one_word() {
        let mut r = RandomStream::new(3);
        for i in 1..=10 {
            assert_eq!(r.below(1), 0);
            assert_eq!(r.draws(), i);
        }
    }

    #[test]
    fn below_rejects_biased_tail() {
        // m = 2^63 + 1 rejects nearly half of all words, so over many calls
        // some extra draws must be observed.
        let mut r = RandomStream::new(11);
        let m = (1u64 << 63) + 1;
        for _ in 0..64 {
            assert!(r.below(m) < m);
        }
        assert!(r.draws() > 64);
    }

    #[test]
    fn unit_interval() {
        let mut r = RandomStream::new(5);
        for _ in 0..10_000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
