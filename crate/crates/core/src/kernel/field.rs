//! Deterministic uniform field `U_x(n)` indexed by site and step.
//!
//! `U_x(n)` is the `x`-th 64-bit output of a ChaCha8 stream keyed by the
//! seed, with stream id `n`. Any `(seed, site, step)` can be regenerated in
//! isolation, and two chains reading the same field are the grand coupling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

#[derive(Clone)]
pub struct RandomField {
    seed: u64,
    base: ChaCha8Rng,
    /// Lower edge `w` of the window `(w, 1 - w)` when conditioned.
    window: Option<f64>,
}

const SCALE: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn to_open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * SCALE
}

impl RandomField {
    pub fn new(seed: u64) -> Self {
        RandomField { seed, base: ChaCha8Rng::seed_from_u64(seed), window: None }
    }

    /// Field whose values are uniform on `(w, 1 - w)`: a raw value `u` is
    /// emitted as `w + u (1 - 2w)`.
    ///
    /// # Panics
    /// If `w` is not in `[0, 1/2)`.
    pub fn conditioned(seed: u64, w: f64) -> Self {
        assert!((0.0..0.5).contains(&w), "window edge must lie in [0, 1/2), got {w}");
        RandomField { window: Some(w), ..Self::new(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn window(&self) -> Option<f64> {
        self.window
    }

    pub fn with_window(&self, w: Option<f64>) -> Self {
        match w {
            Some(w) => Self::conditioned(self.seed, w),
            None => Self::new(self.seed),
        }
    }

    #[inline]
    fn emit(&self, raw: f64) -> f64 {
        match self.window {
            Some(w) => w + raw * (1.0 - 2.0 * w),
            None => raw,
        }
    }

    fn stream(&self, step: u64) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(step);
        r.set_word_pos(0);
        r
    }

    /// `U_x(n)` for a single site.
    pub fn uniform(&self, site_index: usize, step: u64) -> f64 {
        let mut r = self.stream(step);
        r.set_word_pos(2 * site_index as u128);
        self.emit(to_open_unit(r.next_u64()))
    }

    /// All values of step `n` in site-index order.
    pub fn fill<R: Real>(&self, step: u64, out: &mut [R]) {
        let mut r = self.stream(step);
        for v in out.iter_mut() {
            *v = R::lit(self.emit(to_open_unit(r.next_u64())));
        }
    }
}

/// Seed of trial `index` under `master`: word `index` of the ChaCha8 stream
/// keyed by `master`, so distinct trials never share a stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(u64::MAX);
    r.set_word_pos(2 * index as u128);
    r.next_u64()
}

impl std::fmt::Debug for RandomField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomField").field("seed", &self.seed).field("window", &self.window).finish()
    }
}
