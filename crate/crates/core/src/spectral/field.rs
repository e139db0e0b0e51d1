use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{forward_transform, SpectralGrid};
use crate::error::{Error, Result};

/// Whether a field is known to be real-valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Real,
    Complex,
}

impl Parity {
    /// Real only if both operands are.
    pub fn join(self, other: Parity) -> Parity {
        if self == Parity::Real && other == Parity::Real {
            Parity::Real
        } else {
            Parity::Complex
        }
    }
}

/// Samples of a function on a periodic grid.
///
/// Values are always stored as complex numbers. A real-tagged field has
/// identically zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    values: Vec<Complex64>,
    parity: Parity,
}

impl Field {
    pub fn real(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::structural(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            parity: Parity::Real,
        })
    }

    pub fn complex(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::structural(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values, parity: Parity::Complex })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.n()], parity: Parity::Real }
    }

    /// Samples `f(x_i)` at `x_i = i·dx`.
    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| Complex64::new(f(grid.x(i)), 0.0)).collect();
        Self { grid, values, parity: Parity::Real }
    }

    pub fn from_complex_fn(grid: SpectralGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self { grid, values, parity: Parity::Complex }
    }

    /// Build from raw parts, enforcing the parity tag. Callers guarantee the
    /// length; real-tagged input has its imaginary round-off dropped.
    pub(crate) fn from_parts(grid: SpectralGrid, mut values: Vec<Complex64>, parity: Parity) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        if parity == Parity::Real {
            for v in values.iter_mut() {
                v.im = 0.0;
            }
        }
        Self { grid, values, parity }
    }

    #[inline]
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn parity(&self) -> Parity {
        self.parity
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.parity == Parity::Real
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Real parts of the samples.
    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Retag as complex (no data change).
    pub fn into_complex(mut self) -> Self {
        self.parity = Parity::Complex;
        self
    }

    /// Drop the imaginary part and retag real.
    pub fn real_part(&self) -> Field {
        Field::from_parts(self.grid, self.values.clone(), Parity::Real)
    }

    pub fn transform(&self) -> super::SpectralField {
        forward_transform(self)
    }

    /// `(Σ |f|² dx)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// `(Σ |f|^p dx)^{1/p}`, max for `p = ∞`.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * self.grid.dx()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫ f dx` by the rectangle rule (spectrally exact on the torus).
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.dx()
    }

    /// L² inner product `∫ f conj(g) dx`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.grid.dx()
    }

    pub fn scale(&self, a: f64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|v| v * a).collect(), self.parity)
    }

    pub fn scale_complex(&self, a: Complex64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|v| v * a).collect(), Parity::Complex)
    }

    /// Pointwise product.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Field::from_parts(self.grid, values, self.parity.join(other.parity)))
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * a + y * b).collect();
        Ok(Field::from_parts(self.grid, values, self.parity.join(other.parity)))
    }

    /// Subtract the sample mean.
    pub fn without_mean(&self) -> Field {
        let m = self.values.iter().sum::<Complex64>() / self.values.len() as f64;
        let values = self.values.iter().map(|v| v - m).collect();
        Field::from_parts(self.grid, values, self.parity)
    }

    /// Largest pointwise difference.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖self - other‖_{L²}`.
    pub fn l2_distance(&self, other: &Field) -> f64 {
        (self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
            * self.grid.dx())
        .sqrt()
    }
}

impl Add for &Field {
    type Output = Field;

    /// Panics on grid mismatch; use [`Field::lin_comb`] for a checked sum.
    fn add(self, rhs: &Field) -> Field {
        self.lin_comb(1.0, rhs, 1.0).expect("adding fields on different grids")
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        self.lin_comb(1.0, rhs, -1.0).expect("subtracting fields on different grids")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;

    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;

    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

/// Fourier coefficients of a [`Field`] in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl SpectralField {
    pub fn new(grid: SpectralGrid, coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::structural(format!(
                "{} coefficients for a grid of {}",
                coeffs.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, coeffs, parity })
    }

    pub(crate) fn from_parts(grid: SpectralGrid, coeffs: Vec<Complex64>, parity: Parity) -> Self {
        Self { grid, coeffs, parity }
    }

    #[inline]
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of integer mode `m`.
    pub fn mode(&self, m: i64) -> Option<Complex64> {
        self.grid.index_of_mode(m).map(|i| self.coeffs[i])
    }

    /// The zero-frequency coefficient, i.e. the mean of the field.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `(Σ |c|²)^{1/2}`.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inverse(&self) -> Field {
        super::inverse_transform(self)
    }
}
