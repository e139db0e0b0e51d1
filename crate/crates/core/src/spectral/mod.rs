//! Periodic grids, sampled fields and the discrete Fourier pair.
//!
//! Normalization is fixed crate-wide: the forward transform returns
//! `c(ξ) = (1/n) Σ_x f(x) e^{-iξx}`, which approximates `(1/L) ∫ f e^{-iξx} dx`.
//! With it Parseval reads `(1/L) Σ_x |f|² dx = Σ_ξ |c(ξ)|²` and the homogeneous
//! Sobolev norm is `(L Σ_ξ |ξ|^{2s} |c(ξ)|²)^{1/2}` with no stray constants.
//!
//! Coefficient vectors are stored in FFT order: index `i < n/2` holds mode
//! `m = i`, index `i ≥ n/2` holds `m = i - n`. The Nyquist index `n/2`
//! therefore carries `m = -n/2`.

pub(crate) mod dealias;
mod field;
mod multiplier;

pub use dealias::{dealiased_power, dealiased_product, PadRule};
pub use field::{Field, Parity, SpectralField};
pub(crate) use multiplier::has_zero_mean;
pub use multiplier::{
    apply_multiplier, derivative, frac_derivative, free_propagate, hilbert, project_neg,
    project_pos, Dispersion, MultiplierSymbol,
};

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box of length `period` sampled at `n` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    n: usize,
    period: f64,
}

impl SpectralGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::structural(format!(
                "grid size must be a power of two >= {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::structural(format!("period must be positive, got {period}")));
        }
        Ok(Self { n, period })
    }

    /// The default laboratory box: period `64·2π`, so that every dyadic
    /// wavenumber `2^j` with `j ≥ -6` is an exact grid frequency.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 64.0 * 2.0 * PI)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Sample position of index `i`; the box is `[0, L)`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Integer mode number stored at FFT index `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let half = self.n / 2;
        if i < half {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index holding mode `m`, if the mode is represented.
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m < -half || m >= half {
            return None;
        }
        Some(if m >= 0 { m as usize } else { (m + self.n as i64) as usize })
    }

    /// Wavenumber `2π m / L` stored at FFT index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.mode(i) as f64 / self.period
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Smallest nonzero |ξ| on the grid.
    pub fn min_wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// |ξ| of the Nyquist mode.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.period
    }

    /// Same resolution, period divided by `lambda`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.n, self.period / lambda)
    }

    /// Same period, `n` replaced.
    pub fn with_points(&self, n: usize) -> Result<Self> {
        Self::new(n, self.period)
    }

    pub(crate) fn check_same(&self, other: &SpectralGrid) -> Result<()> {
        if self != other {
            return Err(Error::structural(format!(
                "grid mismatch: (n={}, L={}) vs (n={}, L={})",
                self.n, self.period, other.n, other.period
            )));
        }
        Ok(())
    }
}

thread_local! {
    // Plans are cached per thread so concurrent workers never share scratch.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward FFT, `Σ f e^{-2πi mk/n}`.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// In-place unnormalized inverse FFT, `Σ c e^{+2πi mk/n}`.
pub(crate) fn ifft_in_place(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// Forward transform of a field under the crate normalization.
pub fn forward_transform(f: &Field) -> SpectralField {
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
    SpectralField::from_parts(*f.grid(), buf, f.parity())
}

/// Inverse transform. Real-tagged coefficient vectors come back real-tagged
/// with the imaginary round-off dropped.
pub fn inverse_transform(c: &SpectralField) -> Field {
    let mut buf = c.coeffs().to_vec();
    ifft_in_place(&mut buf);
    Field::from_parts(*c.grid(), buf, c.parity())
}
