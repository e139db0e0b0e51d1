//! Time stepping for the generalized Benjamin–Ono family
//! `∂_t u + H∂_x²u + σ u^k ∂_x u = 0` and its linearization.
//!
//! The stepper is integrating-factor RK4: with `E = V(h)` the stiff dispersive
//! part is propagated exactly and classical RK4 is applied to `V(-t)u(t)`.
//! All state lives in coefficient space; pointwise powers are dealiased.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{paraproduct, BlockRange};
use crate::spectral::dealias::product_coeffs;
use crate::spectral::{
    forward_transform, Dispersion, Field, MultiplierSymbol, PadRule, Parity, SpectralField, SpectralGrid,
};
use crate::trajectory::Trajectory;

/// Sign `σ` in front of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// How `u^k ∂_x u` is evaluated. Both are equal for band-limited data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearForm {
    /// `u^k · ∂_x u`
    #[default]
    Transport,
    /// `∂_x(u^{k+1}) / (k+1)`
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: u32,
    pub sign: Sign,
    /// Step size. Negative values are accepted by [`evolve`] only.
    pub dt: f64,
    pub steps: usize,
    /// Store every `stride`-th step.
    pub stride: usize,
    pub form: NonlinearForm,
    /// Test hook: `false` drops the nonlinearity.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn new(k: u32, dt: f64, steps: usize) -> Self {
        Self { k, sign: Sign::Plus, dt, steps, stride: 1, form: NonlinearForm::Transport, nonlinear: true }
    }

    /// Steps of size `dt` reaching `horizon`; `dt` is shrunk to divide it evenly.
    pub fn for_horizon(k: u32, horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0 && dt > 0.0) {
            return Err(Error::Config { key: "T".into(), constraint: "horizon and dt must be positive".into() });
        }
        let steps = (horizon / dt).ceil().max(1.0) as usize;
        Ok(Self::new(k, horizon / steps as f64, steps))
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_form(mut self, form: NonlinearForm) -> Self {
        self.form = form;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    fn validate(&self, allow_negative: bool) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Config { key: "k".into(), constraint: "k >= 1".into() });
        }
        let ok = self.dt.is_finite() && (self.dt > 0.0 || (allow_negative && self.dt < 0.0));
        if !ok {
            return Err(Error::Config { key: "dt".into(), constraint: "dt must be a positive finite number".into() });
        }
        if self.stride == 0 {
            return Err(Error::Config { key: "stride".into(), constraint: "stride >= 1".into() });
        }
        Ok(())
    }
}

/// Relative drift of `∫u dx` and `∫u² dx` over a run (maximum over steps).
///
/// Mass drift is measured against `∫|u_0| dx`, since the mass itself is
/// often zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub mass_initial: f64,
    pub l2_initial: f64,
    pub mass_drift: f64,
    pub l2_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub conservation: ConservationReport,
}

pub(crate) const BLOWUP_H1: f64 = 1e6;

type Coeffs = Vec<Complex64>;

fn zeros(n: usize) -> Coeffs {
    vec![Complex64::new(0.0, 0.0); n]
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Coeffs {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

fn mul(m: &[Complex64], x: &[Complex64]) -> Coeffs {
    m.iter().zip(x).map(|(a, b)| a * b).collect()
}

fn dx_coeffs(grid: &SpectralGrid, c: &[Complex64]) -> Coeffs {
    let nyq = grid.nyquist_index();
    c.iter()
        .enumerate()
        .map(|(i, a)| if i == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, grid.wavenumber(i)) * a })
        .collect()
}

fn h1_norm(grid: &SpectralGrid, c: &[Complex64]) -> f64 {
    let s: f64 = c.iter().enumerate().map(|(i, a)| (1.0 + grid.wavenumber(i).powi(2)) * a.norm_sqr()).sum();
    (s * grid.period()).sqrt()
}

/// `-σ u^k ∂_x u` in coefficient space.
fn gbo_nonlinearity(grid: &SpectralGrid, c: &[Complex64], k: u32, sigma: f64, form: NonlinearForm) -> Coeffs {
    match form {
        NonlinearForm::Transport => {
            let cx = dx_coeffs(grid, c);
            let p = product_coeffs(grid, &[c, &cx], &[k, 1], PadRule::Exact);
            p.into_iter().map(|a| -sigma * a).collect()
        }
        NonlinearForm::Conservative => {
            let p = product_coeffs(grid, &[c], &[k + 1], PadRule::Exact);
            let scale = -sigma / (k + 1) as f64;
            dx_coeffs(grid, &p).into_iter().map(|a| scale * a).collect()
        }
    }
}

/// Integrating-factor RK4 driver. `rhs(t, c)` returns the non-dispersive part
/// of `∂_t û`. Calls `store(t, c)` at every `stride`-th step including 0.
fn integrate_if_rk4(
    grid: &SpectralGrid,
    c0: Coeffs,
    t0: f64,
    dt: f64,
    steps: usize,
    stride: usize,
    mut rhs: impl FnMut(f64, &[Complex64]) -> Coeffs,
    mut store: impl FnMut(f64, &[Complex64]),
) -> Result<Coeffs> {
    let e_full = MultiplierSymbol::free_group(dt, Dispersion::BenjaminOno).on_grid(grid);
    let e_half = MultiplierSymbol::free_group(0.5 * dt, Dispersion::BenjaminOno).on_grid(grid);
    let h = dt;
    let mut u = c0;
    store(t0, &u);
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let k1 = rhs(t, &u);
        let k2 = rhs(t + 0.5 * h, &mul(&e_half, &axpy(&u, 0.5 * h, &k1)));
        let eu_half = mul(&e_half, &u);
        let k3 = rhs(t + 0.5 * h, &axpy(&eu_half, 0.5 * h, &k2));
        let eu = mul(&e_full, &u);
        let k4 = rhs(t + h, &axpy(&eu, h, &mul(&e_half, &k3)));
        let ek1 = mul(&e_full, &k1);
        let ek23 = mul(&e_half, &axpy(&k2, 1.0, &k3));
        let next: Coeffs = (0..u.len()).map(|i| eu[i] + h / 6.0 * (ek1[i] + 2.0 * ek23[i] + k4[i])).collect();

        let norm = h1_norm(grid, &next);
        if !norm.is_finite() || norm > BLOWUP_H1 {
            return Err(Error::BlowUp {
                last_valid_time: t,
                reason: if norm.is_finite() {
                    format!("H^1 norm {norm:.3e} exceeded {BLOWUP_H1:e}")
                } else {
                    "non-finite state".to_string()
                },
            });
        }
        u = next;
        if (step + 1) % stride == 0 {
            store(t + h, &u);
        }
    }
    Ok(u)
}

fn check_step_size(u0: &Field, cfg: &SolverConfig) {
    let amp = u0.max_abs().powi(cfg.k as i32);
    let limit = 0.5 / (u0.grid().max_wavenumber() * amp);
    if cfg.nonlinear && cfg.dt.abs() > limit {
        log::warn!("dt = {} exceeds the transport guard {:.3e}; expect instability", cfg.dt, limit);
    }
}

fn real_input(u0: &Field, what: &str) -> Result<()> {
    if !u0.is_real() {
        return Err(Error::domain(format!("{what} must be real-valued")));
    }
    Ok(())
}

/// Solve from `t = 0` with the stored frames returned as a trajectory.
pub fn solve_gbo(u0: &Field, cfg: &SolverConfig) -> Result<Evolution> {
    cfg.validate(false)?;
    real_input(u0, "initial datum")?;
    check_step_size(u0, cfg);
    let grid = *u0.grid();
    let (k, sigma, form, nonlinear) = (cfg.k, cfg.sign.value(), cfg.form, cfg.nonlinear);
    let c0 = forward_transform(u0).into_coeffs();

    let mass0 = grid.period() * c0[0].re;
    let l1 = u0.norm_lp(1.0);
    let l20 = grid.period() * c0.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut drift = (0.0f64, 0.0f64);
    let mut frames = Vec::new();
    integrate_if_rk4(
        &grid,
        c0,
        0.0,
        cfg.dt,
        cfg.steps,
        1,
        |_, c| if nonlinear { gbo_nonlinearity(&grid, c, k, sigma, form) } else { zeros(c.len()) },
        |t, c| {
            let mass = grid.period() * c[0].re;
            let l2 = grid.period() * c.iter().map(|a| a.norm_sqr()).sum::<f64>();
            if l1 > 0.0 {
                drift.0 = drift.0.max((mass - mass0).abs() / l1);
            }
            if l20 > 0.0 {
                drift.1 = drift.1.max((l2 - l20).abs() / l20);
            }
            let step = (t / cfg.dt).round() as usize;
            if step % cfg.stride == 0 {
                frames.push(SpectralField::from_parts(grid, c.to_vec(), Parity::Real).inverse());
            }
        },
    )?;
    let trajectory = Trajectory::new(0.0, cfg.dt * cfg.stride as f64, frames)?;
    let conservation = ConservationReport { mass_initial: mass0, l2_initial: l20, mass_drift: drift.0, l2_drift: drift.1 };
    Ok(Evolution { trajectory, conservation })
}

/// Final state after `cfg.steps` steps of size `cfg.dt`; `dt < 0` runs backwards.
pub fn evolve(u0: &Field, cfg: &SolverConfig) -> Result<Field> {
    cfg.validate(true)?;
    real_input(u0, "initial datum")?;
    check_step_size(u0, cfg);
    let grid = *u0.grid();
    let (k, sigma, form, nonlinear) = (cfg.k, cfg.sign.value(), cfg.form, cfg.nonlinear);
    let c = integrate_if_rk4(
        &grid,
        forward_transform(u0).into_coeffs(),
        0.0,
        cfg.dt,
        cfg.steps,
        cfg.steps.max(1),
        |_, c| if nonlinear { gbo_nonlinearity(&grid, c, k, sigma, form) } else { zeros(c.len()) },
        |_, _| {},
    )?;
    Ok(SpectralField::from_parts(grid, c, Parity::Real).inverse())
}

/// Linear interpolation of a sampled forcing at time `t`.
fn forcing_at(f: &Trajectory, spectra: &[Coeffs], t: f64) -> Coeffs {
    let pos = ((t - f.t0()) / f.dt()).clamp(0.0, (f.len() - 1) as f64);
    let m = (pos.floor() as usize).min(f.len().saturating_sub(2));
    if f.len() == 1 {
        return spectra[0].clone();
    }
    let w = pos - m as f64;
    spectra[m].iter().zip(&spectra[m + 1]).map(|(a, b)| (1.0 - w) * a + w * b).collect()
}

/// Solve `∂_t u + H∂_x²u + κ π(V(t)u_0, u) = F`, `u(0) = φ`, with
/// `κ = σ/(k+1)` so that `π(u,u)` carries the same weight as `σ u^k ∂_x u`.
///
/// The forcing is sampled on its own time grid and interpolated linearly
/// between nodes, so with forcing the scheme is second order in time.
pub fn solve_linearized(
    u0_data: &Field,
    phi: &Field,
    forcing: Option<&Trajectory>,
    cfg: &SolverConfig,
    range: &BlockRange,
) -> Result<Trajectory> {
    cfg.validate(false)?;
    u0_data.grid().check_same(phi.grid())?;
    let grid = *phi.grid();
    let f_spectra: Option<Vec<Coeffs>> = match forcing {
        Some(f) => {
            grid.check_same(f.grid())?;
            Some(f.frames().iter().map(|fr| forward_transform(fr).into_coeffs()).collect())
        }
        None => None,
    };
    let parity = u0_data.parity().join(phi.parity()).join(forcing.map_or(Parity::Real, |f| f.frames()[0].parity()));
    let kappa = cfg.sign.value() / (cfg.k + 1) as f64;
    let data_zero = u0_data.max_abs() == 0.0;
    let c_data = forward_transform(u0_data);
    let k = cfg.k;
    let mut failure = None;
    let mut frames = Vec::new();
    integrate_if_rk4(
        &grid,
        forward_transform(phi).into_coeffs(),
        0.0,
        cfg.dt,
        cfg.steps,
        cfg.stride,
        |t, c| {
            let mut out = zeros(c.len());
            if cfg.nonlinear && !data_zero {
                let u_lin = MultiplierSymbol::free_group(t, Dispersion::BenjaminOno).apply_spectral(&c_data).inverse();
                let u = SpectralField::from_parts(grid, c.to_vec(), parity).inverse();
                match paraproduct(&u_lin, &u, k, range) {
                    Ok(p) => {
                        for (o, a) in out.iter_mut().zip(forward_transform(&p).coeffs()) {
                            *o -= kappa * a;
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            }
            if let (Some(f), Some(spectra)) = (forcing, &f_spectra) {
                for (o, a) in out.iter_mut().zip(forcing_at(f, spectra, t)) {
                    *o += a;
                }
            }
            out
        },
        |_, c| frames.push(SpectralField::from_parts(grid, c.to_vec(), parity).inverse()),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Trajectory::new(0.0, cfg.dt * cfg.stride as f64, frames)
}

/// `t ↦ ∫_{t_0}^{t} V(t - t') f(t') dt'` at every node, trapezoid in `t'`.
///
/// Evaluated as `V(τ_m) Σ_i w_i V(-τ_i) f_i` with a running sum. The Nyquist
/// coefficient, where `V` is not invertible on the grid, is summed directly.
pub fn duhamel(f: &Trajectory) -> Result<Trajectory> {
    if f.len() < 3 {
        return Err(Error::structural("Duhamel quadrature needs at least three time nodes"));
    }
    let grid = *f.grid();
    let n = grid.n();
    let nyq = grid.nyquist_index();
    let xi_n = grid.max_wavenumber();
    let dt = f.dt();
    let tau = |m: usize| m as f64 * dt;
    let parity = f.frames()[0].parity();
    let spectra: Vec<Coeffs> = f.frames().iter().map(|fr| forward_transform(fr).into_coeffs()).collect();
    let phase = |t: f64, i: usize| {
        let xi = grid.wavenumber(i);
        Complex64::from_polar(1.0, -xi * xi.abs() * t)
    };

    let mut running = zeros(n);
    let mut prev_pulled: Option<Coeffs> = None;
    let mut frames = Vec::with_capacity(f.len());
    for (m, c) in spectra.iter().enumerate() {
        let pulled: Coeffs = c.iter().enumerate().map(|(i, a)| phase(-tau(m), i) * a).collect();
        if let Some(p) = &prev_pulled {
            for i in 0..n {
                running[i] += 0.5 * dt * (p[i] + pulled[i]);
            }
        }
        let mut out: Coeffs = running.iter().enumerate().map(|(i, a)| phase(tau(m), i) * a).collect();
        // Nyquist: V(t) acts as cos(ξ_N² t) there.
        let mut nyq_sum = Complex64::new(0.0, 0.0);
        for (i, ci) in spectra.iter().enumerate().take(m + 1) {
            let w = if i == 0 || i == m { 0.5 * dt } else { dt };
            nyq_sum += w * (xi_n * xi_n * (tau(m) - tau(i))).cos() * ci[nyq];
        }
        out[nyq] = if m == 0 { Complex64::new(0.0, 0.0) } else { nyq_sum };
        frames.push(SpectralField::from_parts(grid, out, parity).inverse());
        prev_pulled = Some(pulled);
    }
    Trajectory::new(f.t0(), dt, frames)
}
