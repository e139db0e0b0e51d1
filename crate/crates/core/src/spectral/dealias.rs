//! Exact pointwise products of band-limited fields via zero padding.

use num_complex::Complex64;

use super::{fft_in_place, forward_transform, ifft_in_place, Field, Parity, SpectralField, SpectralGrid};
use crate::error::{Error, Result};

/// Padding rule for products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadRule {
    /// Pad to at least `(d+1)·n/2` points for a degree-`d` product. Retained
    /// modes are exact.
    #[default]
    Exact,
    /// Classic 3/2 padding regardless of degree. Exact only for quadratic
    /// products; cheaper for higher degrees. Not used by any verification.
    ThreeHalves,
}

fn padded_size(n: usize, degree: u32, rule: PadRule) -> usize {
    let min = match rule {
        PadRule::Exact => (degree as usize + 1) * n / 2,
        PadRule::ThreeHalves => 3 * n / 2,
    };
    min.max(n + 1).next_power_of_two()
}

/// Embed coarse coefficients into a length-`m` spectrum. The coarse Nyquist
/// coefficient is split evenly between `±n/2`.
fn pad(grid: &SpectralGrid, coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = grid.n();
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (i, c) in coeffs.iter().enumerate() {
        if i == half {
            out[half] += 0.5 * c;
            out[m - half] += 0.5 * c;
            continue;
        }
        let mode = grid.mode(i);
        let j = if mode >= 0 { mode as usize } else { (mode + m as i64) as usize };
        out[j] = *c;
    }
    out
}

/// Restrict a length-`m` spectrum back to the coarse grid, folding `±n/2`
/// into the coarse Nyquist slot.
fn truncate(grid: &SpectralGrid, fine: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let m = fine.len();
    let half = n / 2;
    (0..n)
        .map(|i| {
            if i == half {
                fine[half] + fine[m - half]
            } else {
                let mode = grid.mode(i);
                fine[if mode >= 0 { mode as usize } else { (mode + m as i64) as usize }]
            }
        })
        .collect()
}

/// Samples of the band-limited interpolant of `c` on an `m`-point grid.
fn upsample(grid: &SpectralGrid, c: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut buf = pad(grid, c, m);
    ifft_in_place(&mut buf);
    buf
}

/// Exact band-limited projection of `Π f_i^{e_i}`, computed on a padded grid
/// sized for the total degree.
pub fn dealiased_product(factors: &[(&Field, u32)], rule: PadRule) -> Result<Field> {
    let Some((first, _)) = factors.first() else {
        return Err(Error::structural("empty product"));
    };
    let grid = *first.grid();
    let mut degree = 0u32;
    let mut parity = Parity::Real;
    for (f, e) in factors {
        grid.check_same(f.grid())?;
        degree += e;
        parity = parity.join(f.parity());
    }
    if degree == 0 {
        return Ok(Field::from_parts(grid, vec![Complex64::new(1.0, 0.0); grid.n()], Parity::Real));
    }
    if degree == 1 {
        let (f, _) = factors.iter().find(|(_, e)| *e == 1).unwrap();
        return Ok((*f).clone());
    }
    let spectra: Vec<SpectralField> = factors.iter().map(|(f, _)| forward_transform(f)).collect();
    let exps: Vec<u32> = factors.iter().map(|(_, e)| *e).collect();
    let coeffs = product_coeffs(&grid, &spectra.iter().map(|s| s.coeffs()).collect::<Vec<_>>(), &exps, rule);
    Ok(SpectralField::from_parts(grid, coeffs, parity).inverse())
}

/// Coefficient-space core of [`dealiased_product`].
pub(crate) fn product_coeffs(
    grid: &SpectralGrid,
    spectra: &[&[Complex64]],
    exps: &[u32],
    rule: PadRule,
) -> Vec<Complex64> {
    let degree: u32 = exps.iter().sum();
    let m = padded_size(grid.n(), degree, rule);
    let mut acc = vec![Complex64::new(1.0, 0.0); m];
    for (c, &e) in spectra.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        let vals = upsample(grid, c, m);
        for (a, v) in acc.iter_mut().zip(&vals) {
            *a *= v.powu(e);
        }
    }
    fft_in_place(&mut acc);
    let scale = 1.0 / m as f64;
    for a in acc.iter_mut() {
        *a *= scale;
    }
    truncate(grid, &acc)
}

/// `f^d`, dealiased.
pub fn dealiased_power(f: &Field, d: u32) -> Result<Field> {
    if d == 0 {
        return Err(Error::domain("power degree must be >= 1"));
    }
    dealiased_product(&[(f, d)], PadRule::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degree_one_is_identity() {
        let g = SpectralGrid::new(32, 3.0).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * PI / 3.0 * x).sin() + 0.1);
        assert_eq!(dealiased_power(&f, 1).unwrap(), f);
    }

    #[test]
    fn square_of_cosine() {
        let g = SpectralGrid::new(64, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x).cos());
        let sq = dealiased_power(&f, 2).unwrap();
        let expected = Field::from_fn(g, |x| 0.5 * (1.0 + (6.0 * x).cos()));
        assert!(sq.is_real());
        assert!(sq.max_diff(&expected) < 1e-14);
    }

    #[test]
    fn padded_sizes() {
        assert_eq!(padded_size(64, 2, PadRule::Exact), 128);
        assert_eq!(padded_size(64, 5, PadRule::Exact), 256);
        assert_eq!(padded_size(64, 5, PadRule::ThreeHalves), 128);
        assert!(padded_size(1024, 5, PadRule::Exact) >= 3 * 1024);
    }

    #[test]
    fn high_mode_product_is_truncated_not_aliased() {
        // cos(20x)·cos(20x) on 32 points: the 40-mode must vanish, only the mean survives.
        let g = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |x| (12.0 * x).cos());
        let sq = dealiased_power(&f, 2).unwrap();
        let expected = Field::from_fn(g, |_| 0.5);
        assert!(sq.max_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_degree_is_rejected() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        assert!(dealiased_power(&Field::zeros(g), 0).is_err());
    }
}
