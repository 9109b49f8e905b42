//! Seeded parameter draws.
//!
//! Every draw is a dyadic rational k/1024 inside [0.1, 0.9]. Sums and small
//! products of such numbers are exact in `f64`, so a parameter set feeds the
//! float and the rational coefficient grids with the same values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DYADIC_DEN: f64 = 1024.0;
/// Minimum distance from an integer resonance.
pub const RESONANCE_GAP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Derive an independent stream, e.g. one per draw index, so batteries
    /// can run in parallel and stay reproducible.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    /// Dyadic value in [0.1, 0.9].
    pub fn param(&mut self) -> f64 {
        let lo = (0.1 * DYADIC_DEN).ceil() as i64;
        let hi = (0.9 * DYADIC_DEN).floor() as i64;
        self.rng.gen_range(lo..=hi) as f64 / DYADIC_DEN
    }

    pub fn params(&mut self, k: usize) -> Vec<f64> {
        (0..k).map(|_| self.param()).collect()
    }

    /// Uniform float in [lo, hi), for sample points rather than parameters.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Uniform dyadic value with denominator 1024 in [lo, hi].
    pub fn dyadic_in(&mut self, lo: f64, hi: f64) -> f64 {
        let a = (lo * DYADIC_DEN).ceil() as i64;
        let b = (hi * DYADIC_DEN).floor() as i64;
        self.rng.gen_range(a..=b) as f64 / DYADIC_DEN
    }
}

/// Distance from `v` to the nearest integer.
pub fn int_distance(v: f64) -> f64 {
    (v - v.round()).abs()
}

/// True when `v` is within the resonance gap of an integer.
pub fn near_integer(v: f64) -> bool {
    int_distance(v) < RESONANCE_GAP
}

/// True when `v` is within the resonance gap of 0, -1, -2, ...
pub fn near_nonpositive_integer(v: f64) -> bool {
    v < 0.5 && near_integer(v)
}

/// Draw until `accept` holds. Panics after many rejections, which would mean
/// the acceptance rule is unsatisfiable for the requested family.
pub fn draw_until<T>(s: &mut Sampler, mut make: impl FnMut(&mut Sampler) -> T, accept: impl Fn(&T) -> bool) -> T {
    for _ in 0..10_000 {
        let v = make(s);
        if accept(&v) {
            return v;
        }
    }
    panic!("rejection sampling did not find a generic draw");
}
