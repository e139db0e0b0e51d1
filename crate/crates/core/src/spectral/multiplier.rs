//! Fourier multipliers: Hilbert transform, frequency projections, fractional
//! derivatives and the free linear groups.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{forward_transform, inverse_transform, Field, Parity, SpectralField, SpectralGrid};
use crate::error::{Error, Result};


/// A symbol `m(ξ)` together with a flag telling whether it commutes with
/// complex conjugation, i.e. `m(-ξ) = conj(m(ξ))`.
///
/// On a grid the Nyquist mode stands for the real cosine mode, which is half
/// `+ξ_N` and half `-ξ_N`, so it is multiplied by `(m(ξ_N) + m(-ξ_N))/2`.
/// For odd symbols such as `-i sgn ξ` this zeroes the Nyquist mode; even
/// symbols are unaffected.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    real: bool,
    symbol: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol").field("name", &self.name).field("real", &self.real).finish()
    }
}

/// Which free group to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dispersion {
    /// `V(t) = e^{tH∂²}`: symbol `e^{-iξ|ξ|t}`.
    BenjaminOno,
    /// `S(t) = e^{it∂²}`: symbol `e^{-iξ²t}`.
    Schrodinger,
}

#[inline]
fn sgn(xi: f64) -> f64 {
    if xi > 0.0 {
        1.0
    } else if xi < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl MultiplierSymbol {
    pub fn new(
        name: impl Into<String>,
        real: bool,
        symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), real, symbol: Arc::new(symbol) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    pub fn eval(&self, xi: f64) -> Complex64 {
        (self.symbol)(xi)
    }

    /// Symbol values in FFT order on `grid`, with the Nyquist rule applied.
    pub fn on_grid(&self, grid: &SpectralGrid) -> Vec<Complex64> {
        let nyq = grid.nyquist_index();
        (0..grid.n())
            .map(|i| {
                let xi = grid.wavenumber(i);
                if i == nyq {
                    0.5 * (self.eval(xi) + self.eval(-xi))
                } else {
                    self.eval(xi)
                }
            })
            .collect()
    }

    /// Product symbol `m₁(ξ)·m₂(ξ)`.
    pub fn compose(&self, other: &MultiplierSymbol) -> MultiplierSymbol {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        MultiplierSymbol {
            name: format!("{}∘{}", self.name, other.name),
            real: self.real && other.real,
            symbol: Arc::new(move |xi| a(xi) * b(xi)),
        }
    }

    pub fn identity() -> Self {
        Self::new("Id", true, |_| Complex64::new(1.0, 0.0))
    }

    /// Hilbert transform, `-i sgn ξ` with `sgn 0 = 0`.
    pub fn hilbert() -> Self {
        Self::new("H", true, |xi| Complex64::new(0.0, -sgn(xi)))
    }

    /// Projection onto positive frequencies.
    pub fn project_pos() -> Self {
        Self::new("P+", false, |xi| Complex64::new(if xi > 0.0 { 1.0 } else { 0.0 }, 0.0))
    }

    /// Projection onto negative frequencies.
    pub fn project_neg() -> Self {
        Self::new("P-", false, |xi| Complex64::new(if xi < 0.0 { 1.0 } else { 0.0 }, 0.0))
    }

    /// `D^α`, symbol `|ξ|^α`. At `ξ = 0` the value is 0 for `α > 0` and 1 for
    /// `α = 0`; for `α < 0` it is left at 0 and callers must check the mean.
    pub fn frac_derivative(alpha: f64) -> Self {
        Self::new(format!("D^{alpha}"), true, move |xi| {
            let a = xi.abs();
            let v = if a == 0.0 {
                if alpha == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                a.powf(alpha)
            };
            Complex64::new(v, 0.0)
        })
    }

    /// `∂_x`, symbol `iξ`.
    pub fn derivative() -> Self {
        Self::new("dx", true, |xi| Complex64::new(0.0, xi))
    }

    /// `∂_x^2`, symbol `-ξ²`.
    pub fn second_derivative() -> Self {
        Self::new("dxx", true, |xi| Complex64::new(-xi * xi, 0.0))
    }

    /// `H∂_x²`, symbol `iξ|ξ|`.
    pub fn hilbert_dxx() -> Self {
        Self::new("Hdxx", true, |xi| Complex64::new(0.0, xi * xi.abs()))
    }

    /// Free group at time `t`.
    pub fn free_group(t: f64, which: Dispersion) -> Self {
        match which {
            Dispersion::BenjaminOno => Self::new(format!("V({t})"), true, move |xi| {
                Complex64::from_polar(1.0, -xi * xi.abs() * t)
            }),
            Dispersion::Schrodinger => Self::new(format!("S({t})"), false, move |xi| {
                Complex64::from_polar(1.0, -xi * xi * t)
            }),
        }
    }

    /// Apply to a coefficient vector.
    pub fn apply_spectral(&self, c: &SpectralField) -> SpectralField {
        let sym = self.on_grid(c.grid());
        let coeffs = c.coeffs().iter().zip(&sym).map(|(a, m)| a * m).collect();
        let parity = if c.parity() == Parity::Real && self.real { Parity::Real } else { Parity::Complex };
        SpectralField::from_parts(*c.grid(), coeffs, parity)
    }
}

/// Output coefficients `m(ξ) f̂(ξ)`. Real input through a real symbol stays
/// real-tagged; the imaginary round-off of the inverse transform is dropped.
pub fn apply_multiplier(m: &MultiplierSymbol, f: &Field) -> Field {
    inverse_transform(&m.apply_spectral(&forward_transform(f)))
}

pub fn hilbert(f: &Field) -> Field {
    apply_multiplier(&MultiplierSymbol::hilbert(), f)
}

pub fn project_pos(f: &Field) -> Field {
    apply_multiplier(&MultiplierSymbol::project_pos(), f)
}

pub fn project_neg(f: &Field) -> Field {
    apply_multiplier(&MultiplierSymbol::project_neg(), f)
}

pub fn derivative(f: &Field) -> Field {
    apply_multiplier(&MultiplierSymbol::derivative(), f)
}

/// Relative size below which a mean coefficient counts as zero.
pub(crate) const MEAN_TOLERANCE: f64 = 1e-12;

pub(crate) fn has_zero_mean(c: &SpectralField) -> bool {
    c.mean().norm() <= MEAN_TOLERANCE * c.coeff_norm().max(f64::MIN_POSITIVE)
}

/// `D^α f`. Negative orders need zero-mean input.
pub fn frac_derivative(alpha: f64, f: &Field) -> Result<Field> {
    let c = forward_transform(f);
    if alpha < 0.0 && !has_zero_mean(&c) {
        return Err(Error::domain(format!(
            "D^{alpha} is undefined on fields with nonzero mean (mean = {})",
            c.mean()
        )));
    }
    Ok(inverse_transform(&MultiplierSymbol::frac_derivative(alpha).apply_spectral(&c)))
}

/// `V(t) f` or `S(t) f`.
pub fn free_propagate(t: f64, f: &Field, which: Dispersion) -> Field {
    apply_multiplier(&MultiplierSymbol::free_group(t, which), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(128, 40.0).unwrap()
    }

    #[test]
    fn hilbert_maps_cos_to_sin() {
        let g = grid();
        let xi0 = 2.0 * PI * 5.0 / g.period();
        let f = Field::from_fn(g, |x| (xi0 * x).cos());
        let h = hilbert(&f);
        assert!(h.is_real());
        let expected = Field::from_fn(g, |x| (xi0 * x).sin());
        assert!(h.max_diff(&expected) < 1e-13);
    }

    #[test]
    fn hilbert_zeroes_nyquist_and_mean() {
        let g = grid();
        let f = Field::from_fn(g, |x| 3.0 + (PI * 128.0 / 40.0 * x).cos());
        let h = hilbert(&f);
        assert!(h.max_abs() < 1e-12);
    }

    #[test]
    fn half_derivative_of_a_mode() {
        let g = grid();
        let xi0 = 2.0 * PI / g.period();
        let f = Field::from_complex_fn(g, |x| Complex64::from_polar(1.0, xi0 * x));
        let d = frac_derivative(0.5, &f).unwrap();
        let expected = f.scale(xi0.sqrt());
        assert!(d.max_diff(&expected) < 1e-13);
    }

    #[test]
    fn negative_order_needs_zero_mean() {
        let g = grid();
        let f = Field::from_fn(g, |x| 1.0 + (0.3 * x).sin());
        assert!(matches!(frac_derivative(-0.25, &f), Err(Error::Domain(_))));
        let zero_mean = Field::from_fn(g, |x| (2.0 * PI * 3.0 / 40.0 * x).sin());
        assert!(frac_derivative(-0.25, &zero_mean).is_ok());
    }

    #[test]
    fn bo_group_phase_on_a_positive_mode() {
        let g = SpectralGrid::standard(256).unwrap();
        let xi0 = 4.0 * PI / g.period();
        let f = Field::from_complex_fn(g, |x| Complex64::from_polar(1.0, xi0 * x));
        let out = free_propagate(0.3, &f, Dispersion::BenjaminOno).transform();
        let c = out.mode(2).unwrap();
        let expected = Complex64::from_polar(1.0, -xi0 * xi0 * 0.3);
        assert!((c - expected).norm() < 1e-14);
    }

    #[test]
    fn schrodinger_is_not_real() {
        let g = grid();
        let f = Field::from_fn(g, |x| (2.0 * PI / 40.0 * x).cos());
        assert!(!free_propagate(0.5, &f, Dispersion::Schrodinger).is_real());
        assert!(free_propagate(0.5, &f, Dispersion::BenjaminOno).is_real());
    }

    #[test]
    fn time_zero_is_identity() {
        let g = grid();
        let f = Field::from_fn(g, |x| (-(x - 20.0) * (x - 20.0) / 4.0).exp());
        for which in [Dispersion::BenjaminOno, Dispersion::Schrodinger] {
            assert!(free_propagate(0.0, &f, which).max_diff(&f) < 1e-14);
        }
    }
}
