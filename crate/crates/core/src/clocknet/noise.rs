//! Counter-based Gaussian draws.
//!
//! Every draw is addressed by `(seed, stream, index)`, so the value a node or
//! link receives never depends on how other streams were consumed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Each draw consumes two `u64` outputs, four 32-bit ChaCha words.
const WORDS_PER_DRAW: u128 = 4;

/// Stream key for a node's clock noise.
pub fn clock_stream(node_index: usize) -> u64 {
    (node_index as u64) << 1
}

/// Stream key for jitter on one direction of a link (`reverse` is b → a).
pub fn jitter_stream(link_index: usize, reverse: bool) -> u64 {
    (((link_index as u64) << 1 | reverse as u64) << 1) | 1
}

#[derive(Debug, Clone)]
pub struct NoiseStream {
    seed: u64,
    stream: u64,
    index: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        NoiseStream {
            seed,
            stream,
            index: 0,
        }
    }

    pub fn draws(&self) -> u64 {
        self.index
    }

    /// Standard normal variate for the current index; advances the counter.
    pub fn next_standard_normal(&mut self) -> f64 {
        let z = standard_normal_at(self.seed, self.stream, self.index);
        self.index += 1;
        z
    }

    /// `round(N(0, stddev²))`; exactly zero without consuming a draw when
    /// `stddev` is zero.
    pub fn gaussian_ns(&mut self, stddev_ns: u64) -> i64 {
        if stddev_ns == 0 {
            return 0;
        }
        (self.next_standard_normal() * stddev_ns as f64).round() as i64
    }
}

/// Box–Muller transform on the two words at `(seed, stream, index)`.
pub fn standard_normal_at(seed: u64, stream: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(index as u128 * WORDS_PER_DRAW);
    let a = rng.next_u64();
    let b = rng.next_u64();
    // u1 ∈ (0, 1], u2 ∈ [0, 1)
    let u1 = ((a >> 11) + 1) as f64 / (1u64 << 53) as f64;
    let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addressable_draws() {
        let mut s = NoiseStream::new(7, 3);
        let first: Vec<f64> = (0..5).map(|_| s.next_standard_normal()).collect();
        for (i, v) in first.iter().enumerate() {
            assert_eq!(*v, standard_normal_at(7, 3, i as u64));
        }
        assert_ne!(standard_normal_at(7, 3, 0), standard_normal_at(7, 5, 0));
        assert_ne!(standard_normal_at(7, 3, 0), standard_normal_at(8, 3, 0));
    }

    #[test]
    fn roughly_standard() {
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|i| standard_normal_at(1, 1, i)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.05, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn zero_stddev_is_silent() {
        let mut s = NoiseStream::new(1, 1);
        assert_eq!(s.gaussian_ns(0), 0);
        assert_eq!(s.draws(), 0);
    }

    #[test]
    fn stream_keys_are_disjoint() {
        let mut keys = std::collections::HashSet::new();
        for i in 0..50 {
            assert!(keys.insert(clock_stream(i)));
            assert!(keys.insert(jitter_stream(i, false)));
            assert!(keys.insert(jitter_stream(i, true)));
        }
    }
}
