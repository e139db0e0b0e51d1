//! Localized gauge transform `w_j = e^{i∫^x b} P_+Q_j u` with
//! `b = ½(Q_{≪j}u_0)^k`, and a numerical check of the conjugation
//! `e^{-iB}(∂_x)² e^{iB} = (∂_x + ib)²`.
//!
//! On the torus the primitive of `b` is split as `B(x) + b̄·x` with `B`
//! periodic. The linear part makes the phase non-periodic, so residuals are
//! measured on the central half of the box only and test data should vanish
//! near the box edges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{block, block_below, block_ll, BlockRange};
use crate::spectral::{
    dealiased_power, derivative, forward_transform, project_pos, Field, Parity, SpectralField,
};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone)]
pub struct GaugeData {
    /// Dyadic index the coefficient was built for, if any.
    pub j: Option<i32>,
    /// The coefficient `b`.
    pub b: Field,
    /// Periodic part `B` of the primitive.
    pub periodic: Field,
    /// Mean `b̄`; the full primitive is `B(x) + b̄·x`.
    pub mean: f64,
    /// `e^{i(B + b̄x)}` on the sample points.
    pub phase: Field,
}

/// Spectral primitive of a real field with its mean split off.
pub fn antiderivative(b: &Field) -> Result<GaugeData> {
    if !b.is_real() {
        return Err(Error::domain("gauge coefficient must be real-valued"));
    }
    let grid = *b.grid();
    let c = forward_transform(b);
    let mean = c.coeffs()[0].re;
    let nyq = grid.nyquist_index();
    let coeffs = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i == 0 || i == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                a / Complex64::new(0.0, grid.wavenumber(i))
            }
        })
        .collect();
    let periodic = SpectralField::from_parts(grid, coeffs, Parity::Real).inverse();
    let phase_vals = periodic
        .values()
        .iter()
        .enumerate()
        .map(|(i, p)| Complex64::from_polar(1.0, p.re + mean * grid.x(i)))
        .collect();
    let phase = Field::complex(grid, phase_vals)?;
    Ok(GaugeData { j: None, b: b.clone(), periodic, mean, phase })
}

/// `b_{≪j} = ½ (Q_{≪j}u_0)^k` and its primitive.
pub fn gauge_data(u0: &Field, j: i32, k: u32, range: &BlockRange) -> Result<GaugeData> {
    let low = block_ll(j, u0, range);
    let b = dealiased_power(&low, k)?.scale(0.5);
    let mut g = antiderivative(&b)?;
    g.j = Some(j);
    Ok(g)
}

/// `w_j = e^{i(B + b̄x)} P_+Q_j u`.
pub fn gauge_forward(u: &Field, u0: &Field, j: i32, k: u32, range: &BlockRange) -> Result<Field> {
    u.grid().check_same(u0.grid())?;
    let g = gauge_data(u0, j, k, range)?;
    project_pos(&block(j, u)).pointwise_mul(&g.phase)
}

/// Undo [`gauge_forward`]: multiply by the conjugate phase.
pub fn gauge_inverse(w: &Field, u0: &Field, j: i32, k: u32, range: &BlockRange) -> Result<Field> {
    w.grid().check_same(u0.grid())?;
    let g = gauge_data(u0, j, k, range)?;
    let conj: Vec<Complex64> = g.phase.values().iter().map(|p| p.conj()).collect();
    w.pointwise_mul(&Field::complex(*w.grid(), conj)?)
}

/// Residuals of the conjugation identity, each relative to the largest
/// `|∂_x² w|` on the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugationReport {
    /// `i∂_t w + ∂_x² w - e^{iB}[i∂_t v + (∂_x + ib)² v]` with `w = e^{iB}v`.
    pub identity: f64,
    /// `i∂_t w + ∂_x² w - e^{iB} g`.
    pub transformed: f64,
    /// `i∂_t v + (∂_x + ib)² v - g`.
    pub original: f64,
    /// Largest of the three.
    pub max: f64,
}

/// Indices of the central half `[L/4, 3L/4]` of the box.
pub fn interior_window(n: usize) -> std::ops::RangeInclusive<usize> {
    (n / 4)..=(3 * n / 4)
}

fn second_derivative(f: &Field) -> Field {
    derivative(&derivative(f))
}

/// Evaluate both sides of the conjugation identity on `v(t)` with `∂_t` by
/// central differences at interior time nodes and `∂_x` spectrally.
pub fn conjugation_residual(v: &Trajectory, gauge: &GaugeData, g: Option<&Trajectory>) -> Result<ConjugationReport> {
    if v.len() < 3 {
        return Err(Error::structural("conjugation residual needs at least three time nodes"));
    }
    let grid = *v.grid();
    grid.check_same(gauge.b.grid())?;
    if let Some(g) = g {
        v.check_compatible(g)?;
    }
    let b = &gauge.b;
    let bx = derivative(b);
    let phase = gauge.phase.values();
    let win = interior_window(grid.n());
    let dt = v.dt();
    let i = Complex64::new(0.0, 1.0);

    let w: Vec<Field> = v.frames().iter().map(|f| f.pointwise_mul(&gauge.phase)).collect::<Result<_>>()?;
    let (mut id, mut tr, mut orig, mut scale) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in 1..v.len() - 1 {
        let vm = &v.frames()[m];
        let vx = derivative(vm);
        let vxx = second_derivative(vm);
        let wxx = second_derivative(&w[m]);
        let gm = g.map(|g| &g.frames()[m]);
        for x in win.clone() {
            let vt = (v.frames()[m + 1].values()[x] - v.frames()[m - 1].values()[x]) / (2.0 * dt);
            let wt = (w[m + 1].values()[x] - w[m - 1].values()[x]) / (2.0 * dt);
            let (bv, bxv) = (b.values()[x].re, bx.values()[x].re);
            let v0 = vm.values()[x];
            let magnetic = vxx.values()[x] + i * bxv * v0 + 2.0 * i * bv * vx.values()[x] - bv * bv * v0;
            let lhs_v = i * vt + magnetic;
            let lhs_w = i * wt + wxx.values()[x];
            let gx = gm.map_or(Complex64::new(0.0, 0.0), |g| g.values()[x]);
            id = id.max((lhs_w - phase[x] * lhs_v).norm());
            tr = tr.max((lhs_w - phase[x] * gx).norm());
            orig = orig.max((lhs_v - gx).norm());
            scale = scale.max(wxx.values()[x].norm());
        }
    }
    if scale == 0.0 {
        return Ok(ConjugationReport { identity: id, transformed: tr, original: orig, max: id.max(tr).max(orig) });
    }
    let (id, tr, orig) = (id / scale, tr / scale, orig / scale);
    Ok(ConjugationReport { identity: id, transformed: tr, original: orig, max: id.max(tr).max(orig) })
}

/// Free Schrödinger Gaussian packet `i∂_t w + ∂_x² w = 0` centred at `c`,
/// width `a`, carrier `xi0`, in closed form.
pub fn schrodinger_packet(grid: crate::spectral::SpectralGrid, c: f64, a: f64, xi0: f64, t: f64) -> Field {
    let a2 = Complex64::new(a * a, 2.0 * t);
    let amp = Complex64::new(a, 0.0) / a2.sqrt();
    Field::from_complex_fn(grid, |x| {
        let y = x - c;
        let z = y - 2.0 * xi0 * t;
        amp * (-(z * z) / (2.0 * a2) + Complex64::new(0.0, xi0 * y - xi0 * xi0 * t)).exp()
    })
}

/// Manufactured check: `w` a free Schrödinger packet, `v = e^{-iB}w`, `g = 0`.
pub fn manufactured_residual(b: &Field, dt: f64, nodes: usize) -> Result<ConjugationReport> {
    let grid = *b.grid();
    let gauge = antiderivative(b)?;
    let conj: Vec<Complex64> = gauge.phase.values().iter().map(|p| p.conj()).collect();
    let conj = Field::complex(grid, conj)?;
    let c = grid.period() / 2.0;
    let a = grid.period() / 32.0;
    let xi0 = 8.0 * grid.min_wavenumber();
    let frames = (0..nodes)
        .map(|m| schrodinger_packet(grid, c, a, xi0, m as f64 * dt).pointwise_mul(&conj))
        .collect::<Result<Vec<_>>>()?;
    let v = Trajectory::new(0.0, dt, frames)?;
    conjugation_residual(&v, &gauge, None)
}

/// `2^{-j} ‖(Q_{<j-J}u_0)^k‖_{L^∞}` for each gap `J`.
pub fn smallness_hook(u0: &Field, j: i32, k: u32, gaps: &[i32]) -> Result<Vec<f64>> {
    gaps.iter()
        .map(|&gap| {
            let low = block_below(j - gap, u0);
            Ok(2f64.powi(-j) * dealiased_power(&low, k)?.max_abs())
        })
        .collect()
}
