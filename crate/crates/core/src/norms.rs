//! Space-time norms of sampled trajectories.
//!
//! Exponents are plain `f64`; `f64::INFINITY` selects the sup norm. Time
//! integrals use the trapezoid rule over the trajectory nodes, space integrals
//! the rectangle rule (spectrally accurate on the torus). Sup norms are maxima
//! over samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{filter, BlockRange, DyadicBump};
use crate::spectral::{forward_transform, has_zero_mean, Field, SpectralField};
use crate::trajectory::Trajectory;
use crate::util::ordered_map;

fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain(format!("exponent {name} = {p} outside [1, ∞]")));
    }
    Ok(())
}

fn trapezoid_weights(len: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; len];
    w[0] *= 0.5;
    w[len - 1] *= 0.5;
    w
}

fn lp_sum(values: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    // (value, weight) pairs
    if p.is_infinite() {
        values.map(|(v, _)| v).fold(0.0, f64::max)
    } else {
        values.map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Moduli of the samples, frame-major.
fn moduli(frames: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    frames.iter().map(|f| f.iter().map(|v| v.norm()).collect()).collect()
}

fn mixed_xt_raw(abs: &[Vec<f64>], dt: f64, dx: f64, p: f64, q: f64) -> f64 {
    let n = abs[0].len();
    let w = trapezoid_weights(abs.len(), dt);
    let inner: Vec<f64> = (0..n).map(|i| lp_sum(abs.iter().zip(&w).map(|(f, &wm)| (f[i], wm)), q)).collect();
    lp_sum(inner.into_iter().map(|a| (a, dx)), p)
}

fn mixed_tx_raw(abs: &[Vec<f64>], dt: f64, dx: f64, q: f64, p: f64) -> f64 {
    let w = trapezoid_weights(abs.len(), dt);
    let inner: Vec<f64> = abs.iter().map(|f| lp_sum(f.iter().map(|&v| (v, dx)), p)).collect();
    lp_sum(inner.into_iter().zip(w), q)
}

fn check_nodes(u: &Trajectory) -> Result<()> {
    if u.len() < 2 {
        return Err(Error::structural("space-time norms need at least two time nodes"));
    }
    Ok(())
}

/// `‖u‖_{L^p_x L^q_T}`: time norm first, then space.
pub fn mixed_norm_xt(u: &Trajectory, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_nodes(u)?;
    let abs: Vec<Vec<f64>> = u.frames().iter().map(|f| f.values().iter().map(|v| v.norm()).collect()).collect();
    Ok(mixed_xt_raw(&abs, u.dt(), u.grid().dx(), p, q))
}

/// `‖u‖_{L^q_T L^p_x}`: space norm first, then time.
pub fn mixed_norm_tx(u: &Trajectory, q: f64, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_nodes(u)?;
    let abs: Vec<Vec<f64>> = u.frames().iter().map(|f| f.values().iter().map(|v| v.norm()).collect()).collect();
    Ok(mixed_tx_raw(&abs, u.dt(), u.grid().dx(), q, p))
}

/// `‖φ‖_{Ḣ^s}` (weight `|ξ|^{2s}`) or `‖φ‖_{H^s}` (weight `(1+ξ²)^s`).
///
/// The homogeneous mean weight is `|0|^{2s}`: 1 at `s = 0`, 0 for `s > 0`, and
/// undefined for `s < 0`, where a nonzero mean is a domain error.
pub fn sobolev(phi: &Field, s: f64, homogeneous: bool) -> Result<f64> {
    let c = forward_transform(phi);
    sobolev_spectral(&c, s, homogeneous)
}

pub(crate) fn sobolev_spectral(c: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    if homogeneous && s < 0.0 && !has_zero_mean(c) {
        return Err(Error::domain(format!("Ḣ^{s} with s < 0 needs zero-mean input")));
    }
    let grid = c.grid();
    let sum: f64 = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let xi = grid.wavenumber(i);
            let w = if homogeneous {
                if xi == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    xi.abs().powf(2.0 * s)
                }
            } else {
                (1.0 + xi * xi).powf(s)
            };
            w * a.norm_sqr()
        })
        .sum();
    Ok((sum * grid.period()).sqrt())
}

/// Indices `(s, r, p, q)` of a Besov space `Ḃ^{s,r}_p(L^q_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub r: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    /// `Ṡ^{s,θ} = Ḃ^{s+(3θ-1)/4, 2}_{4/(1-θ)}(L^{2/θ}_T)`.
    pub fn solution_space(s: f64, theta: f64) -> Self {
        Self { s: s + (3.0 * theta - 1.0) / 4.0, r: 2.0, p: 4.0 / (1.0 - theta), q: 2.0 / theta }
    }

    /// `Ṅ^{s,θ} = Ḃ^{s+(1-3θ)/4, 2}_{4/(3+θ)}(L^{2/(2-θ)}_T)`.
    pub fn nonlinear_space(s: f64, theta: f64) -> Self {
        Self { s: s + (1.0 - 3.0 * theta) / 4.0, r: 2.0, p: 4.0 / (3.0 + theta), q: 2.0 / (2.0 - theta) }
    }
}

/// Per-block mixed norms `‖Q_j u‖_{L^p_x L^q_T}` for every resolvable `j`.
pub fn block_mixed_norms(u: &Trajectory, p: f64, q: f64, range: &BlockRange) -> Result<Vec<(i32, f64)>> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_nodes(u)?;
    let spectra: Vec<SpectralField> = u.frames().iter().map(forward_transform).collect();
    if let Some(m) = spectra.iter().position(|c| !has_zero_mean(c)) {
        return Err(Error::domain(format!("homogeneous Besov norm needs zero-mean frames (frame {m} is not)")));
    }
    let (dt, dx) = (u.dt(), u.grid().dx());
    Ok(ordered_map(range.indices().collect(), |j| {
        let blocks: Vec<Vec<Complex64>> = spectra
            .iter()
            .map(|c| filter(c, |xi| DyadicBump::block_symbol(j, xi)).inverse().into_values())
            .collect();
        (j, mixed_xt_raw(&moduli(&blocks), dt, dx, p, q))
    }))
}

/// `‖u‖_{Ḃ^{s,r}_p(L^q_T)} = (Σ_j [2^{js} ‖Q_j u‖_{L^p_x L^q_T}]^r)^{1/r}`.
pub fn besov_norm(u: &Trajectory, idx: BesovIndex, range: &BlockRange) -> Result<f64> {
    check_exponent("r", idx.r)?;
    let terms = block_mixed_norms(u, idx.p, idx.q, range)?;
    let weighted = terms.into_iter().map(|(j, v)| (2f64.powf(j as f64 * idx.s) * v, 1.0));
    Ok(lp_sum(weighted, idx.r))
}

/// `‖u‖_{Ẋ^s} = ‖u‖_{Ṡ^{s,ε}} + ‖u‖_{Ṡ^{s,1}}`.
pub fn x_norm(u: &Trajectory, s: f64, eps: f64, range: &BlockRange) -> Result<f64> {
    Ok(besov_norm(u, BesovIndex::solution_space(s, eps), range)?
        + besov_norm(u, BesovIndex::solution_space(s, 1.0), range)?)
}

/// `‖u‖_{Ẏ_T} = ‖u‖_{Ẋ^{s_k}} + ‖u‖_{L^k_x L^∞_T}`.
pub fn y_norm(u: &Trajectory, k: u32, eps: f64, range: &BlockRange) -> Result<f64> {
    Ok(x_norm(u, crate::lab::critical_index(k), eps, range)? + mixed_norm_xt(u, k as f64, f64::INFINITY)?)
}

/// The cubic-case space: `Ẋ^0 ∩ Ẋ^s ∩ Ḃ^{ε,2}_3(L^{2/ε}_T)`, normed by the sum.
pub fn x_norm_k3(u: &Trajectory, s: f64, eps: f64, range: &BlockRange) -> Result<f64> {
    let extra = BesovIndex { s: eps, r: 2.0, p: 3.0, q: 2.0 / eps };
    Ok(x_norm(u, 0.0, eps, range)? + x_norm(u, s, eps, range)? + besov_norm(u, extra, range)?)
}

/// `‖u‖_{Ṅ^{s,θ}}`.
pub fn n_norm(u: &Trajectory, s: f64, theta: f64, range: &BlockRange) -> Result<f64> {
    besov_norm(u, BesovIndex::nonlinear_space(s, theta), range)
}

/// An exponent triple `(α, p, q)` for smoothing estimates `‖D^α V(t)φ‖_{L^p_x L^q_T}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTriple {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

impl AdmissibleTriple {
    pub fn new(alpha: f64, p: f64, q: f64) -> Self {
        Self { alpha, p, q }
    }
}

const ADMISSIBLE_TOL: f64 = 1e-12;

/// 1-admissibility: either `(1/2, ∞, 2)`, or `4 ≤ p < ∞`, `2 < q ≤ ∞`,
/// `2/p + 1/q ≤ 1/2` and `α = 1/p + 2/q - 1/2`.
pub fn is_admissible(t: AdmissibleTriple) -> bool {
    let AdmissibleTriple { alpha, p, q } = t;
    if alpha == 0.5 && p.is_infinite() && p > 0.0 && q == 2.0 {
        return true;
    }
    if !(p >= 4.0 && p.is_finite()) || !(q > 2.0) {
        return false;
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    2.0 / p + inv_q <= 0.5 + ADMISSIBLE_TOL && (alpha - (1.0 / p + 2.0 * inv_q - 0.5)).abs() <= ADMISSIBLE_TOL
}

/// Which norm a [`NormSpec`] selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    MixedXt,
    MixedTx,
    SobolevHom,
    SobolevInhom,
    Besov,
    SSpace,
    NSpace,
    XSpace,
    YNorm,
    XSpaceK3,
}

impl NormKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "mixed_xt" => Self::MixedXt,
            "mixed_tx" => Self::MixedTx,
            "sobolev_hom" => Self::SobolevHom,
            "sobolev_inhom" => Self::SobolevInhom,
            "besov" => Self::Besov,
            "S_space" | "s_space" => Self::SSpace,
            "N_space" | "n_space" => Self::NSpace,
            "X_space" | "x_space" => Self::XSpace,
            "Y_norm" | "y_norm" => Self::YNorm,
            "X_space_k3" | "x_space_k3" => Self::XSpaceK3,
            other => return Err(Error::domain(format!("unknown norm `{other}`"))),
        })
    }
}

/// Parameter pack selecting one norm. Unused fields are ignored by the
/// selected kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    pub s: f64,
    pub theta: f64,
    pub eps: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub k: u32,
}

impl NormSpec {
    pub fn new(kind: NormKind) -> Self {
        Self { kind, s: 0.0, theta: 1.0, eps: 0.125, p: 2.0, q: 2.0, r: 2.0, k: 4 }
    }

    /// Evaluate on a trajectory. Sobolev kinds use the first frame.
    pub fn evaluate(&self, u: &Trajectory, range: &BlockRange) -> Result<f64> {
        match self.kind {
            NormKind::MixedXt => mixed_norm_xt(u, self.p, self.q),
            NormKind::MixedTx => mixed_norm_tx(u, self.q, self.p),
            NormKind::SobolevHom => sobolev(&u.frames()[0], self.s, true),
            NormKind::SobolevInhom => sobolev(&u.frames()[0], self.s, false),
            NormKind::Besov => besov_norm(u, BesovIndex { s: self.s, r: self.r, p: self.p, q: self.q }, range),
            NormKind::SSpace => besov_norm(u, BesovIndex::solution_space(self.s, self.theta), range),
            NormKind::NSpace => n_norm(u, self.s, self.theta, range),
            NormKind::XSpace => x_norm(u, self.s, self.eps, range),
            NormKind::YNorm => y_norm(u, self.k, self.eps, range),
            NormKind::XSpaceK3 => x_norm_k3(u, self.s, self.eps, range),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use std::f64::consts::PI;

    #[test]
    fn derived_indices_match_the_formulas() {
        let s1 = BesovIndex::solution_space(0.25, 1.0);
        assert_eq!((s1.s, s1.r, s1.p, s1.q), (0.75, 2.0, f64::INFINITY, 2.0));
        let s0 = BesovIndex::solution_space(0.25, 0.0);
        assert_eq!((s0.s, s0.p, s0.q), (0.0, 4.0, f64::INFINITY));
        let n1 = BesovIndex::nonlinear_space(0.25, 1.0);
        assert_eq!((n1.s, n1.r, n1.p, n1.q), (-0.25, 2.0, 1.0, 2.0));
        let se = BesovIndex::solution_space(0.0, 0.125);
        assert!((se.s - (3.0 * 0.125 - 1.0) / 4.0).abs() < 1e-15);
        assert!((se.p - 4.0 / 0.875).abs() < 1e-15);
        assert_eq!(se.q, 16.0);
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(AdmissibleTriple::new(0.5, f64::INFINITY, 2.0)));
        assert!(is_admissible(AdmissibleTriple::new(-0.25, 4.0, f64::INFINITY)));
        assert!(!is_admissible(AdmissibleTriple::new(0.0, 3.0, 4.0)));
        assert!(!is_admissible(AdmissibleTriple::new(0.0, 8.0, 2.0)));
        assert!(!is_admissible(AdmissibleTriple::new(0.1, 4.0, f64::INFINITY)));
    }

    #[test]
    fn sobolev_of_a_single_mode() {
        let g = SpectralGrid::standard(256).unwrap();
        let xi0 = 2.0 * PI * 3.0 / g.period();
        let raw = Field::from_fn(g, |x| (xi0 * x).cos());
        let f = raw.scale(1.0 / raw.norm_l2());
        for s in [-0.5, 0.0, 0.25, 1.0] {
            let v = sobolev(&f, s, true).unwrap();
            assert!((v - xi0.powf(s)).abs() < 1e-12 * xi0.powf(s));
        }
        assert!((sobolev(&f, 0.0, true).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_homogeneous_order_rejects_mean() {
        let g = SpectralGrid::new(64, 10.0).unwrap();
        let f = Field::from_fn(g, |_| 1.0);
        assert!(matches!(sobolev(&f, -0.1, true), Err(Error::Domain(_))));
        assert!(sobolev(&f, -0.1, false).is_ok());
    }

    #[test]
    fn constant_in_time_with_sup() {
        let g = SpectralGrid::new(64, 10.0).unwrap();
        let phi = Field::from_fn(g, |x| (0.6 * x).sin() + 0.2);
        let u = Trajectory::sample(0.0, 1.0, 5, |_| phi.clone()).unwrap();
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let v = mixed_norm_xt(&u, p, f64::INFINITY).unwrap();
            assert!((v - phi.norm_lp(p)).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn single_node_and_bad_exponents_are_rejected() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        let u = Trajectory::new(0.0, 1.0, vec![Field::zeros(g)]).unwrap();
        assert!(matches!(mixed_norm_xt(&u, 2.0, 2.0), Err(Error::Structural(_))));
        let u2 = Trajectory::sample(0.0, 1.0, 3, |_| Field::zeros(g)).unwrap();
        assert!(mixed_norm_xt(&u2, 0.5, 2.0).is_err());
    }

    #[test]
    fn zero_trajectory_has_zero_besov_norm() {
        let g = SpectralGrid::standard(128).unwrap();
        let u = Trajectory::sample(0.0, 1.0, 4, |_| Field::zeros(g)).unwrap();
        let r = BlockRange::for_grid(&g);
        assert_eq!(besov_norm(&u, BesovIndex { s: 0.3, r: 2.0, p: 2.0, q: 2.0 }, &r).unwrap(), 0.0);
    }

    #[test]
    fn besov_rejects_nonzero_mean() {
        let g = SpectralGrid::standard(128).unwrap();
        let u = Trajectory::sample(0.0, 1.0, 4, |_| Field::from_fn(g, |_| 1.0)).unwrap();
        let r = BlockRange::for_grid(&g);
        assert!(matches!(
            besov_norm(&u, BesovIndex { s: 0.0, r: 2.0, p: 2.0, q: 2.0 }, &r),
            Err(Error::Domain(_))
        ));
    }
}
