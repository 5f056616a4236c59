//! Reproducible random streams.
//!
//! Generator: xoshiro256++ (64-bit output). A stream is identified by
//! `(seed, stream_index)`; its 64-bit initial seed is
//! `splitmix64(splitmix64(seed) ^ splitmix64(stream_index ^ 0x6a09e667f3bcc909))`,
//! expanded to the 256-bit state by SplitMix64 as in `SeedableRng::seed_from_u64`.
//! Uniform reals use the top 53 bits of each output; complex normals use
//! Box–Muller evaluated in correctly rounded arithmetic, so sequences are
//! identical on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rug::Float;

use super::complex::Complex;
use super::precision::{PrecisionConfig, Real};
use crate::error::{Error, Result};

const STREAM_SALT: u64 = 0x6a09_e667_f3bc_c909;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mixed = splitmix64(splitmix64(seed) ^ splitmix64(stream_index ^ STREAM_SALT));
        RngStream { seed, stream_index, rng: Xoshiro256PlusPlus::seed_from_u64(mixed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[a, b)` at working precision.
    pub fn draw_uniform(&mut self, a: &Real, b: &Real) -> Result<Real> {
        if a >= b {
            return Err(Error::OutOfRange(format!("empty interval [{}, {})", a.to_f64(), b.to_f64())));
        }
        let prec = a.prec().max(b.prec());
        let u = Float::with_val(prec, self.next_f64());
        let width = Float::with_val(prec, b - a);
        Ok(Float::with_val(prec, a + width * u))
    }

    /// Complex normal, unit variance in each component.
    pub fn draw_complex_normal(&mut self, cfg: &PrecisionConfig) -> Complex {
        let prec = cfg.bits();
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        // 1 - u1 lies in (0, 1], so the logarithm is finite.
        let r = (Float::with_val(prec, 1u32 - Float::with_val(prec, u1)).ln() * -2i32).sqrt();
        let theta = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * u2;
        let (s, c) = theta.sin_cos(Float::new(prec));
        Complex::new(Float::with_val(prec, &r * &c), Float::with_val(prec, &r * &s))
    }

    /// Real standard normal (real part of a complex draw).
    pub fn draw_normal(&mut self, cfg: &PrecisionConfig) -> Real {
        self.draw_complex_normal(cfg).re
    }
}
