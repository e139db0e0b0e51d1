//! Picard iteration of the integral equation and the flow-map Lipschitz probe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{duhamel, solve_gbo, solve_linearized, Sign, SolverConfig};
use crate::lab::critical_index;
use crate::littlewood_paley::{rhs_f, BlockRange};
use crate::norms::{mixed_norm_xt, sobolev, x_norm, y_norm};
use crate::spectral::{dealiased_power, derivative, free_propagate, Dispersion, Field};
use crate::trajectory::Trajectory;

/// Which fixed-point map to iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PicardMode {
    /// `u ↦ V(t)u_0 - σ∫V(t-t')(u^k∂_xu)dt'`
    #[default]
    Plain,
    /// `u ↦ U(t)u_0 + ∫U(t,t')κf(u)dt'` with the linearized propagator.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub k: u32,
    pub sign: Sign,
    pub horizon: f64,
    pub nodes: usize,
    /// Stop when the `Ẏ_T` residual falls below `tol·‖u^{(0)}‖_{Ẏ_T}`.
    pub tol: f64,
    pub max_iter: usize,
    pub mode: PicardMode,
    pub eps: f64,
    /// Stand-in for the non-effective constant `C`; `δ = 1/(8C)`.
    pub constant_proxy: f64,
    /// Compare the limit with the RK4 solver on the same nodes.
    pub cross_check: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            k: 4,
            sign: Sign::Plus,
            horizon: 0.1,
            nodes: 201,
            tol: 1e-12,
            max_iter: 60,
            mode: PicardMode::Plain,
            eps: 0.125,
            constant_proxy: 1.0,
            cross_check: true,
        }
    }
}

impl PicardConfig {
    pub fn delta(&self) -> f64 {
        1.0 / (8.0 * self.constant_proxy)
    }

    fn dt(&self) -> f64 {
        self.horizon / (self.nodes - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub mode: PicardMode,
    pub k: u32,
    pub horizon: f64,
    pub delta: f64,
    /// `‖u^{(0)}‖_{Ẏ_T}`, the scale of the stopping rule.
    pub initial_norm: f64,
    /// `‖u^{(m+1)} - u^{(m)}‖_{Ẏ_T}`.
    pub residuals: Vec<f64>,
    /// `residuals[m] / residuals[m-1]`.
    pub ratios: Vec<f64>,
    /// `‖u^{(m)} - u_0‖_{L^k_x L^∞_T}` per iterate.
    pub ball_m: Vec<f64>,
    /// `‖u^{(m)}‖_{Ẋ^{s_k}}` per iterate.
    pub ball_s: Vec<f64>,
    pub in_ball_m: Vec<bool>,
    pub in_ball_s: Vec<bool>,
    pub converged: bool,
    /// `sup_t ‖u_Picard - u_RK4‖_{L²}`, when checked.
    pub solver_gap: Option<f64>,
}

impl PicardReport {
    /// Largest consecutive-residual ratio over the iterates whose residual is
    /// still above `1e-10·‖u^{(0)}‖_{Ẏ_T}`; below that round-off dominates.
    pub fn max_ratio(&self) -> Option<f64> {
        let floor = 1e-10 * self.initial_norm;
        self.ratios
            .iter()
            .zip(&self.residuals[1..])
            .filter(|(_, &r)| r > floor)
            .map(|(&q, _)| q)
            .reduce(f64::max)
    }
}

/// `u^k ∂_x u` as `∂_x(u^{k+1})/(k+1)`, whose mean coefficient is exactly zero.
fn transport_term(u: &Field, k: u32) -> Result<Field> {
    Ok(derivative(&dealiased_power(u, k + 1)?).scale(1.0 / (k + 1) as f64))
}

/// `a - b` for zero-mean trajectories; the round-off mean is removed so the
/// homogeneous norms accept it.
fn difference(a: &Trajectory, b: &Trajectory) -> Result<Trajectory> {
    Ok(a.lin_comb(1.0, b, -1.0)?.map(Field::without_mean))
}

fn constant_in_time(u0: &Field, like: &Trajectory) -> Result<Trajectory> {
    Trajectory::new(like.t0(), like.dt(), vec![u0.clone(); like.len()])
}

struct FixedPointMap<'a> {
    cfg: &'a PicardConfig,
    u0: &'a Field,
    u_lin: Trajectory,
    u_first: Trajectory,
    range: BlockRange,
}

impl FixedPointMap<'_> {
    fn step(&self, u: &Trajectory) -> Result<Trajectory> {
        let sigma = self.cfg.sign.value();
        match self.cfg.mode {
            PicardMode::Plain => {
                let n = u.try_map(|f| transport_term(f, self.cfg.k))?;
                self.u_first.lin_comb(1.0, &duhamel(&n)?, -sigma)
            }
            PicardMode::Split => {
                let kappa = sigma / (self.cfg.k + 1) as f64;
                let f = rhs_f(&self.u_lin, u, self.cfg.k, &self.range)?.map(|fr| fr.scale(kappa));
                let lcfg = SolverConfig::new(self.cfg.k, self.cfg.dt(), self.cfg.nodes - 1).with_sign(self.cfg.sign);
                let zero = Field::zeros(*self.u0.grid());
                let w = solve_linearized(self.u0, &zero, Some(&f), &lcfg, &self.range)?;
                self.u_first.lin_comb(1.0, &w, 1.0)
            }
        }
    }
}

/// Iterate the fixed-point map from `u^{(0)} = V(t)u_0` until the `Ẏ_T`
/// residual drops below tolerance. Three consecutive residual increases, a
/// non-finite residual or running out of iterations raise
/// [`Error::NonContraction`] with the partial report.
pub fn picard_solve(u0: &Field, cfg: &PicardConfig) -> Result<(Trajectory, PicardReport)> {
    if cfg.k < 3 {
        return Err(Error::Config { key: "k".into(), constraint: "k >= 3".into() });
    }
    if cfg.nodes < 3 || !(cfg.horizon > 0.0) {
        return Err(Error::Config { key: "T".into(), constraint: "need T > 0 and at least 3 nodes".into() });
    }
    if !u0.is_real() {
        return Err(Error::domain("Picard iteration needs a real datum"));
    }
    let grid = *u0.grid();
    let range = BlockRange::for_grid(&grid);
    let sk = critical_index(cfg.k);
    let u_lin = Trajectory::sample(0.0, cfg.horizon, cfg.nodes, |t| free_propagate(t, u0, Dispersion::BenjaminOno))?;
    let u_first = match cfg.mode {
        PicardMode::Plain => u_lin.clone(),
        PicardMode::Split => {
            let lcfg = SolverConfig::new(cfg.k, cfg.dt(), cfg.nodes - 1).with_sign(cfg.sign);
            solve_linearized(u0, u0, None, &lcfg, &range)?
        }
    };
    let it = FixedPointMap { cfg, u0, u_lin: u_lin.clone(), u_first, range };
    let u0_traj = constant_in_time(u0, &u_lin)?;
    let delta = cfg.delta();

    let mut report = PicardReport {
        mode: cfg.mode,
        k: cfg.k,
        horizon: cfg.horizon,
        delta,
        initial_norm: 0.0,
        residuals: Vec::new(),
        ratios: Vec::new(),
        ball_m: Vec::new(),
        ball_s: Vec::new(),
        in_ball_m: Vec::new(),
        in_ball_s: Vec::new(),
        converged: false,
        solver_gap: None,
    };
    let record_ball = |rep: &mut PicardReport, u: &Trajectory| -> Result<()> {
        let bm = mixed_norm_xt(&u.lin_comb(1.0, &u0_traj, -1.0)?, cfg.k as f64, f64::INFINITY)?;
        let bs = x_norm(u, sk, cfg.eps, &it.range)?;
        rep.ball_m.push(bm);
        rep.ball_s.push(bs);
        rep.in_ball_m.push(bm <= delta);
        rep.in_ball_s.push(bs <= delta);
        Ok(())
    };

    let mut u = u_lin;
    record_ball(&mut report, &u)?;
    let scale = y_norm(&u, cfg.k, cfg.eps, &it.range)?;
    report.initial_norm = scale;
    let mut increases = 0;
    for _ in 0..cfg.max_iter {
        let next = it.step(&u)?;
        let res = y_norm(&difference(&next, &u)?, cfg.k, cfg.eps, &it.range)?;
        if let Some(&prev) = report.residuals.last() {
            if prev > 0.0 {
                report.ratios.push(res / prev);
            }
            increases = if res > prev { increases + 1 } else { 0 };
        }
        report.residuals.push(res);
        if !res.is_finite() {
            return Err(Error::NonContraction { report: Box::new(report) });
        }
        u = next;
        record_ball(&mut report, &u)?;
        if res <= cfg.tol * scale || res == 0.0 {
            report.converged = true;
            break;
        }
        if increases >= 3 {
            return Err(Error::NonContraction { report: Box::new(report) });
        }
    }
    if !report.converged {
        return Err(Error::NonContraction { report: Box::new(report) });
    }
    if cfg.cross_check {
        let scfg = SolverConfig::new(cfg.k, cfg.dt(), cfg.nodes - 1).with_sign(cfg.sign);
        match solve_gbo(u0, &scfg) {
            Ok(ev) => report.solver_gap = Some(ev.trajectory.sup_l2_distance(&u)?),
            Err(e) if e.is_numerical_failure() => log::warn!("reference solve failed: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok((u, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// `‖u_{0,1} - u_{0,2}‖_{Ḣ^{s_k}}`.
    pub data_distance: f64,
    /// `sup_t ‖u_1 - u_2‖_{L²}` over the data distance.
    pub sup_l2: f64,
    /// `‖u_1 - u_2‖_{Ẋ^{s_k}}` over the data distance.
    pub x_norm: f64,
    /// `‖u_1 - u_2‖_{L^k_x L^∞_T}` over the data distance.
    pub lk_linf: f64,
}

fn lipschitz_from(u1: &Trajectory, u01: &Field, u02: &Field, cfg: &PicardConfig) -> Result<LipschitzReport> {
    let sk = critical_index(cfg.k);
    let d0 = sobolev(&(u01 - u02), sk, true)?;
    if d0 == 0.0 {
        return Ok(LipschitzReport { data_distance: 0.0, sup_l2: 0.0, x_norm: 0.0, lk_linf: 0.0 });
    }
    let (u2, _) = picard_solve(u02, &PicardConfig { cross_check: false, ..*cfg })?;
    let diff = difference(u1, &u2)?;
    let range = BlockRange::for_grid(u01.grid());
    Ok(LipschitzReport {
        data_distance: d0,
        sup_l2: diff.sup_l2() / d0,
        x_norm: x_norm(&diff, sk, cfg.eps, &range)? / d0,
        lk_linf: mixed_norm_xt(&diff, cfg.k as f64, f64::INFINITY)? / d0,
    })
}

/// Difference quotients of the flow map between two data.
pub fn lipschitz_probe(u01: &Field, u02: &Field, cfg: &PicardConfig) -> Result<LipschitzReport> {
    u01.grid().check_same(u02.grid())?;
    let (u1, _) = picard_solve(u01, &PicardConfig { cross_check: false, ..*cfg })?;
    lipschitz_from(&u1, u01, u02, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzFamilyReport {
    pub eps: Vec<f64>,
    pub rows: Vec<LipschitzReport>,
    /// Per metric: max over the family divided by min.
    pub spread_sup_l2: f64,
    pub spread_x_norm: f64,
    pub spread_lk_linf: f64,
}

impl LipschitzFamilyReport {
    pub fn max_spread(&self) -> f64 {
        self.spread_sup_l2.max(self.spread_x_norm).max(self.spread_lk_linf)
    }
}

fn spread(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = v.clone().fold(0.0, f64::max);
    let min = v.fold(f64::INFINITY, f64::min);
    max / min
}

/// The family `u_{0,2} = u_{0,1} + ε·ψ`.
pub fn lipschitz_family(u01: &Field, psi: &Field, eps: &[f64], cfg: &PicardConfig) -> Result<LipschitzFamilyReport> {
    let (u1, _) = picard_solve(u01, &PicardConfig { cross_check: false, ..*cfg })?;
    let rows = eps
        .iter()
        .map(|&e| lipschitz_from(&u1, u01, &u01.lin_comb(1.0, psi, e)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LipschitzFamilyReport {
        eps: eps.to_vec(),
        spread_sup_l2: spread(rows.iter().map(|r| r.sup_l2)),
        spread_x_norm: spread(rows.iter().map(|r| r.x_norm)),
        spread_lk_linf: spread(rows.iter().map(|r| r.lk_linf)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;

    #[test]
    fn zero_datum_converges_at_once() {
        let g = SpectralGrid::standard(256).unwrap();
        let cfg = PicardConfig { nodes: 11, ..Default::default() };
        let (u, rep) = picard_solve(&Field::zeros(g), &cfg).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.residuals, vec![0.0]);
        assert!(u.sup_l2() == 0.0);
    }

    #[test]
    fn identical_data_have_zero_quotient() {
        let g = SpectralGrid::standard(256).unwrap();
        let u = crate::lab::data::standard_bump(g, 0.1);
        let cfg = PicardConfig { nodes: 11, ..Default::default() };
        let r = lipschitz_probe(&u, &u, &cfg).unwrap();
        assert_eq!(r.sup_l2, 0.0);
    }
}
