//! Seeded test data: Gaussian wave-packet superpositions and the standard bump.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{forward_transform, Field, Parity, SpectralField, SpectralGrid};

/// `amp · e^{-y²/(2w²)} · cos(freq·y + phase)` with `y = x - (L/2 + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub amp: f64,
    pub offset: f64,
    pub width: f64,
    pub freq: f64,
    pub phase: f64,
}

impl Packet {
    fn eval(&self, y: f64) -> f64 {
        let z = y - self.offset;
        self.amp * (-z * z / (2.0 * self.width * self.width)).exp() * (self.freq * z + self.phase).cos()
    }

    /// `∫_ℝ` of the packet.
    fn integral(&self) -> f64 {
        self.amp
            * self.width
            * (2.0 * PI).sqrt()
            * (-0.5 * (self.freq * self.width).powi(2)).exp()
            * self.phase.cos()
    }
}

/// A zero-mean profile on the real line: packets plus a wide centred Gaussian
/// cancelling their total integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketProfile {
    pub packets: Vec<Packet>,
    /// Width of the compensating Gaussian.
    pub compensator_width: f64,
}

impl PacketProfile {
    /// Value at `y`, measured from the box centre.
    pub fn eval(&self, y: f64) -> f64 {
        let total: f64 = self.packets.iter().map(Packet::integral).sum();
        let w = self.compensator_width;
        let comp = total / (w * (2.0 * PI).sqrt()) * (-y * y / (2.0 * w * w)).exp();
        self.packets.iter().map(|p| p.eval(y)).sum::<f64>() - comp
    }

    /// `λ^a · φ(λ(x - L/2))` sampled on `grid`, then cleaned (mean and
    /// Nyquist coefficients removed).
    pub fn sample(&self, grid: SpectralGrid, lambda: f64, amp_exponent: f64) -> Field {
        let c = grid.period() / 2.0;
        let s = lambda.powf(amp_exponent);
        clean(&Field::from_fn(grid, |x| s * self.eval(lambda * (x - c))), None)
    }
}

/// Ranges for the packet sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub min_packets: usize,
    pub max_packets: usize,
    pub freq: (f64, f64),
    pub width: (f64, f64),
    pub offset: f64,
    pub compensator_width: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { min_packets: 5, max_packets: 20, freq: (1.0 / 16.0, 0.5), width: (4.0, 8.0), offset: 32.0, compensator_width: 16.0 }
    }
}

/// Seeded generator of random packet profiles.
#[derive(Debug, Clone)]
pub struct PacketSampler {
    rng: ChaCha8Rng,
    cfg: SamplerConfig,
    seed: u64,
}

impl PacketSampler {
    pub fn new(seed: u64, cfg: SamplerConfig) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), cfg, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn profile(&mut self) -> PacketProfile {
        let c = self.cfg;
        let count = self.rng.gen_range(c.min_packets..=c.max_packets);
        let packets = (0..count)
            .map(|_| Packet {
                amp: self.rng.gen_range(-1.0..1.0),
                offset: self.rng.gen_range(-c.offset..c.offset),
                width: self.rng.gen_range(c.width.0..c.width.1),
                freq: self.rng.gen_range(c.freq.0..c.freq.1),
                phase: self.rng.gen_range(0.0..2.0 * PI),
            })
            .collect();
        PacketProfile { packets, compensator_width: c.compensator_width }
    }

    /// A cleaned random field with unit `L²` norm.
    pub fn unit_field(&mut self, grid: SpectralGrid) -> Field {
        let f = self.profile().sample(grid, 1.0, 0.5);
        let norm = f.norm_l2();
        f.scale(1.0 / norm)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}

/// Remove the mean and Nyquist coefficients, and every mode with `|m| > band`
/// when a band is given.
pub fn clean(f: &Field, band: Option<usize>) -> Field {
    let c = forward_transform(f);
    let grid = *c.grid();
    let nyq = grid.nyquist_index();
    let coeffs = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let m = grid.mode(i).unsigned_abs() as usize;
            if i == 0 || i == nyq || band.is_some_and(|b| m > b) {
                Complex64::new(0.0, 0.0)
            } else {
                *a
            }
        })
        .collect();
    SpectralField::from_parts(grid, coeffs, f.parity()).inverse()
}

/// Largest mode kept for exact degree-`(k+1)` products.
pub fn product_band(grid: &SpectralGrid, k: u32) -> usize {
    grid.n() / (k as usize + 2)
}

/// Width of the standard bump.
pub const BUMP_WIDTH: f64 = 4.0;

/// Odd Gaussian derivative `amp·e^{1/2}·y/w·e^{-y²/(2w²)}` centred in the box,
/// peak value `amp`. Zero mean by symmetry.
pub fn standard_bump(grid: SpectralGrid, amp: f64) -> Field {
    let c = grid.period() / 2.0;
    let w = BUMP_WIDTH;
    let f = Field::from_fn(grid, |x| {
        let y = (x - c) / w;
        amp * 0.5f64.exp() * y * (-0.5 * y * y).exp()
    });
    clean(&f, None)
}

/// A single real mode `amp·cos(2π m x / L)`.
pub fn single_mode(grid: SpectralGrid, m: i64, amp: f64) -> Result<Field> {
    if m.unsigned_abs() as usize >= grid.n() / 2 {
        return Err(Error::domain(format!("mode {m} is not below Nyquist")));
    }
    let xi = 2.0 * PI * m as f64 / grid.period();
    Ok(Field::from_fn(grid, |x| amp * (xi * x).cos()))
}

/// Real-tagged field from complex coefficients (test helper for callers that
/// build data spectrally).
pub fn from_coeffs(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Field> {
    Ok(SpectralField::new(grid, coeffs, Parity::Real)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let g = SpectralGrid::standard(512).unwrap();
        let a = PacketSampler::new(7, SamplerConfig::default()).unit_field(g);
        let b = PacketSampler::new(7, SamplerConfig::default()).unit_field(g);
        assert_eq!(a, b);
        let c = PacketSampler::new(8, SamplerConfig::default()).unit_field(g);
        assert_ne!(a, c);
    }

    #[test]
    fn profiles_are_nearly_zero_mean_before_cleaning() {
        let g = SpectralGrid::standard(1024).unwrap();
        let mut s = PacketSampler::new(1, SamplerConfig::default());
        for _ in 0..5 {
            let p = s.profile();
            let c = g.period() / 2.0;
            let raw = Field::from_fn(g, |x| p.eval(x - c));
            assert!(raw.integral().norm() < 1e-9 * raw.norm_lp(1.0));
        }
    }

    #[test]
    fn bump_is_odd_with_peak_amp() {
        let g = SpectralGrid::standard(1024).unwrap();
        let b = standard_bump(g, 0.3);
        assert!((b.max_abs() - 0.3).abs() < 1e-2);
        assert!(forward_transform(&b).mean().norm() < 1e-15 * forward_transform(&b).coeff_norm());
    }
}
