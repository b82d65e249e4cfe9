use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable generator used for measurement sampling. ChaCha output is
/// specified bit-for-bit, so a seed reproduces the same draws on any platform.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Derives an independent child stream and advances this one.
    pub fn split(&mut self) -> RngState {
        let mut inner = self.inner.clone();
        let stream = self.inner.next_u64();
        inner.set_stream(stream);
        inner.set_word_pos(0);
        RngState { seed: self.seed, inner }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngState::new(42);
        let mut b = RngState::new(42);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        let mut c = RngState::new(43);
        assert_ne!(RngState::new(42).next_u64(), c.next_u64());
    }

    #[test]
    fn uniform_range() {
        let mut r = RngState::new(1);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn split_is_deterministic_and_distinct() {
        let mut a = RngState::new(9);
        let mut b = RngState::new(9);
        let mut ca = a.split();
        let mut cb = b.split();
        assert_eq!(ca.next_u64(), cb.next_u64());
        assert_eq!(a.next_u64(), b.next_u64());
        let mut parent = RngState::new(9);
        let mut child = parent.split();
        assert_ne!(parent.next_u64(), child.next_u64());
    }

    #[test]
    fn frozen_first_draw() {
        // Pinned so an upstream generator change cannot silently alter
        // recorded measurement outcomes.
        let first = RngState::new(0).next_u64();
        assert_eq!(first, RngState::new(0).next_u64());
        assert_eq!(first, FROZEN_SEED0_FIRST);
    }

    const FROZEN_SEED0_FIRST: u64 = 13_080_132_717_333_068_652;
}
