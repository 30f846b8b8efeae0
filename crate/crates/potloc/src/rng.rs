//! Deterministic pseudo-random draws for reproducible experiments.
//!
//! The integer stream is SplitMix64 and standard normal variates come from
//! the Box-Muller transform. Both algorithms are fixed by this crate rather
//! than delegated to an external generator, so a seed pins the exact draw
//! sequence across platforms, builds and ports to other languages. Internal
//! arithmetic is `f64` regardless of the working scalar type.

/// SplitMix64 generator (public-domain reference constants).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in the half-open interval `[0, 1)`, using the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in the half-open interval `(0, 1]`; safe under `ln`.
    pub fn next_unit_positive(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn next_in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

/// Standard normal sampler: Box-Muller on top of [`SplitMix64`].
///
/// Draws are produced in pairs; the second member of each pair is cached, so
/// consecutive calls consume two generator outputs every other call.
#[derive(Debug, Clone)]
pub struct NormalSampler {
    rng: SplitMix64,
    cached: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::new(seed),
            cached: None,
        }
    }

    /// Next standard normal variate.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached.take() {
            return z;
        }
        let u1 = self.rng.next_unit_positive();
        let u2 = self.rng.next_unit();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.cached = Some(radius * angle.sin());
        radius * angle.cos()
    }
}
