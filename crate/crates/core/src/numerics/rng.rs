//! Counter-based, splittable random streams.
//!
//! A stream is the triple `(seed, stream id, counter)`; the ChaCha8 block
//! function keyed by the seed turns it into output words, so any draw is a
//! pure function of the triple. Monte Carlo estimators key one substream per
//! sample index, which makes every estimate independent of evaluation order
//! and worker count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, for turning labels into stream ids.
pub fn label_hash(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream, counter: 0 }
    }

    /// Independent child stream keyed by `index`.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream: mix64(self.stream ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))),
            counter: 0,
        }
    }

    /// Child stream keyed by a label, e.g. `"grassmann/4/2"`.
    pub fn labeled(&self, label: &str) -> RngStream {
        self.substream(label_hash(label))
    }

    /// A 64-bit identifier of the stream, used to key sample groups.
    pub fn id(&self) -> u64 {
        mix64(self.seed ^ mix64(self.stream ^ mix64(self.counter)))
    }

    /// A generator positioned at this stream's counter.
    pub fn rng(&self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream);
        inner.set_word_pos(self.counter as u128);
        StreamRng { inner, seed: self.seed, stream: self.stream }
    }
}

/// A live generator; [`StreamRng::position`] recovers the stream state.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl StreamRng {
    pub fn position(&self) -> RngStream {
        RngStream { seed: self.seed, stream: self.stream, counter: self.inner.get_word_pos() as u64 }
    }

    pub fn gaussian(&mut self) -> f64 {
        self.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.random::<f64>()
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// `count` standard normal draws, plus the advanced stream.
pub fn rng_draw_gaussian(s: RngStream, count: usize) -> (Vec<f64>, RngStream) {
    let mut rng = s.rng();
    let draws = (0..count).map(|_| rng.gaussian()).collect();
    (draws, rng.position())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_identical() {
        let s = RngStream::new(42, 7);
        let (a, end_a) = rng_draw_gaussian(s, 100);
        let (b, end_b) = rng_draw_gaussian(s, 100);
        assert_eq!(a, b);
        assert_eq!(end_a, end_b);
        // resuming from the returned position continues the same sequence
        let (whole, _) = rng_draw_gaussian(s, 150);
        let (tail, _) = rng_draw_gaussian(end_a, 50);
        assert_eq!(&whole[100..], &tail[..]);
    }

    #[test]
    fn distinct_streams_differ() {
        let (a, _) = rng_draw_gaussian(RngStream::new(1, 0), 16);
        let (b, _) = rng_draw_gaussian(RngStream::new(1, 1), 16);
        assert!(a.iter().zip(&b).all(|(x, y)| x != y));
        let s = RngStream::new(1, 0);
        assert_ne!(s.substream(0), s.substream(1));
    }

    #[test]
    fn moments_of_a_million_draws() {
        let (draws, _) = rng_draw_gaussian(RngStream::new(2024, 3), 1_000_000);
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // stderr of the mean is 1e-3; of the variance ≈ sqrt(2/n) ≈ 1.41e-3
        assert!(mean.abs() < 0.004, "mean {mean}");
        assert!((var - 1.0).abs() < 4.0 * (2.0f64 / n).sqrt(), "var {var}");
    }
}
