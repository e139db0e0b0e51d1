//! The scaling symmetry `u_λ(t, x) = λ^{1/k} u(λ²t, λx)`.
//!
//! For `λ = 2^m` the rescaled datum lives on the box of length `L/λ` with the
//! same samples, so the map is exact on the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, SolverConfig};
use crate::norms::sobolev;
use crate::spectral::Field;

/// Exponent of the homogeneous Sobolev norm under rescaling: `s + 1/k - 1/2`.
pub fn scaling_exponent(s: f64, k: u32) -> f64 {
    s + 1.0 / k as f64 - 0.5
}

#[derive(Debug, Clone)]
pub struct ScalingFamily {
    pub base: Field,
    pub lambdas: Vec<f64>,
    pub k: u32,
}

fn check_lambda(lambda: f64) -> Result<()> {
    let m = lambda.log2();
    if !(lambda > 0.0 && m.is_finite() && m.fract() == 0.0) {
        return Err(Error::domain(format!("scale λ = {lambda} is not a power of two")));
    }
    Ok(())
}

impl ScalingFamily {
    pub fn new(base: Field, lambdas: Vec<f64>, k: u32) -> Result<Self> {
        for &l in &lambdas {
            check_lambda(l)?;
        }
        if !base.is_real() {
            return Err(Error::domain("scaling family needs a real datum"));
        }
        Ok(Self { base, lambdas, k })
    }

    /// `λ^{1/k}·base(λx)` on the box of length `L/λ`.
    pub fn member(&self, lambda: f64) -> Result<Field> {
        check_lambda(lambda)?;
        rescale(&self.base, lambda, 1.0 / self.k as f64)
    }
}

/// `λ^a · f(λx)` on the box of length `L/λ`.
pub fn rescale(f: &Field, lambda: f64, amp_exponent: f64) -> Result<Field> {
    let grid = f.grid().rescaled(lambda)?;
    let s = lambda.powf(amp_exponent);
    Field::real(grid, f.values().iter().map(|v| s * v.re).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub lambda: f64,
    /// `‖u_λ‖_{Ḣ^s} / ‖u‖_{Ḣ^s}`.
    pub ratio: f64,
    /// `λ^{s+1/k-1/2}`.
    pub expected: f64,
    pub rel_err: f64,
    /// Max-norm gap between the evolved member and the rescaled evolved base,
    /// relative to the base amplitude; absent when no flow check was run.
    pub flow_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub k: u32,
    pub s: f64,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn max_flow_err(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.flow_err).reduce(f64::max)
    }
}

/// Norm identity for every member and, when `flow` is given, the commutation
/// of the solver with scaling: the member evolved for `steps` steps of size
/// `dt/λ²` against `λ^{1/k} u(λ²t, λx)`.
pub fn scaling_check(fam: &ScalingFamily, s: f64, flow: Option<&SolverConfig>) -> Result<ScalingReport> {
    let base_norm = sobolev(&fam.base, s, true)?;
    let base_final = match flow {
        Some(cfg) => Some(evolve(&fam.base, cfg)?),
        None => None,
    };
    let amp = fam.base.max_abs().max(f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(fam.lambdas.len());
    for &lambda in &fam.lambdas {
        let member = fam.member(lambda)?;
        let ratio = sobolev(&member, s, true)? / base_norm;
        let expected = lambda.powf(scaling_exponent(s, fam.k));
        let flow_err = match (flow, &base_final) {
            (Some(cfg), Some(fin)) => {
                let mut scaled = *cfg;
                scaled.dt = cfg.dt / (lambda * lambda);
                scaled.k = fam.k;
                let evolved = evolve(&member, &scaled)?;
                let target = rescale(fin, lambda, 1.0 / fam.k as f64)?;
                Some(evolved.max_diff(&target) / (amp * lambda.powf(1.0 / fam.k as f64)))
            }
            _ => None,
        };
        rows.push(ScalingRow { lambda, ratio, expected, rel_err: (ratio - expected).abs() / expected, flow_err });
    }
    Ok(ScalingReport { k: fam.k, s, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::data::standard_bump;
    use crate::lab::critical_index;
    use crate::spectral::SpectralGrid;

    #[test]
    fn critical_index_is_invariant() {
        let g = SpectralGrid::standard(512).unwrap();
        let fam = ScalingFamily::new(standard_bump(g, 1.0), vec![1.0, 2.0, 4.0], 4).unwrap();
        let rep = scaling_check(&fam, critical_index(4), None).unwrap();
        for r in &rep.rows {
            assert!((r.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_derivative_ratio_for_k4() {
        let g = SpectralGrid::standard(512).unwrap();
        let fam = ScalingFamily::new(standard_bump(g, 1.0), vec![2.0], 4).unwrap();
        let rep = scaling_check(&fam, 0.5, None).unwrap();
        assert!((rep.rows[0].ratio - 2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn non_dyadic_scale_is_rejected() {
        let g = SpectralGrid::standard(64).unwrap();
        assert!(matches!(ScalingFamily::new(Field::zeros(g), vec![3.0], 4), Err(Error::Domain(_))));
    }
}
