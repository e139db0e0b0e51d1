//! Empirical ratios `LHS/RHS` for the linear smoothing, maximal and retarded
//! estimates of the free group, measured over random data and dyadic scales.
//!
//! Data at scale `λ` is `λ^{1/2}φ(λ(x - L/2))` for a fixed draw `φ`, evaluated
//! in closed form on one fixed grid. Scale-invariant estimates use the horizon
//! `T/λ²` so that every scale sees the same dynamics; the `T ≤ 1` estimates
//! keep `T = 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::duhamel;
use crate::lab::data::{PacketProfile, PacketSampler, SamplerConfig};
use crate::lab::critical_index;
use crate::littlewood_paley::{filter, BlockRange, DyadicBump};
use crate::norms::{is_admissible, mixed_norm_tx, mixed_norm_xt, n_norm, sobolev, AdmissibleTriple};
use crate::spectral::{forward_transform, Field, SpectralField, SpectralGrid};
use crate::trajectory::Trajectory;
use crate::util::{median, ordered_map};

/// Which inequality to measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum EstimateId {
    /// `‖V(t)φ‖_{L^∞_T L²_x} ≲ ‖φ‖_{L²}`
    Est0,
    /// `‖D^{1/2}V(t)φ‖_{L^∞_x L²_T} ≲ ‖φ‖_{L²}`
    Est1,
    /// `‖D^{-1/4}V(t)φ‖_{L⁴_x L^∞_T} ≲ ‖φ‖_{L²}`
    Est2,
    /// `‖Q_{≤0}V(t)φ‖_{L²_x L^∞_T} ≲ ‖Q_{≤0}φ‖_{L²}`, `T ≤ 1`
    LowFreqMaximal,
    /// `2^{-j/2}‖Q_jV(t)φ‖_{L²_x L^∞_T} ≲ ‖Q_jφ‖_{L²}`, `T ≤ 1`, worst `j ≥ 0`
    BlockMaximal,
    /// `‖D^α V(t)φ‖_{L^p_x L^q_T} ≲ ‖φ‖_{L²}` for a 1-admissible triple
    Admissible { alpha: f64, p: f64, q: f64 },
    /// `‖D^{1/2}∫V(t-t')f‖_{L^∞_T L²_x} ≲ ‖f‖_{L¹_x L²_T}`
    Retarded,
    /// `‖D^{α+1/2}∫V(t-t')f‖_{L^p_x L^q_T} ≲ ‖f‖_{L¹_x L²_T}`
    RetardedAdmissible { alpha: f64, p: f64, q: f64 },
    /// `‖∫V(t-t')f‖_{L^k_x L^∞_T} ≲ ‖f‖_{Ṅ^{s_k,1}}`
    BesovRetarded,
    /// `‖V(t)φ‖_{L³_x L^∞_T} ≲ ‖φ‖_{H^s}`, `s > 1/3`, `T ≤ 1`
    L3K3,
}

impl EstimateId {
    pub fn name(&self) -> String {
        match self {
            Self::Est0 => "est0".into(),
            Self::Est1 => "est1".into(),
            Self::Est2 => "est2".into(),
            Self::LowFreqMaximal => "low_freq_maximal".into(),
            Self::BlockMaximal => "block_maximal".into(),
            Self::Admissible { alpha, p, q } => format!("admissible({alpha},{p},{q})"),
            Self::Retarded => "retarded".into(),
            Self::RetardedAdmissible { alpha, p, q } => format!("retarded_admissible({alpha},{p},{q})"),
            Self::BesovRetarded => "besov_retarded".into(),
            Self::L3K3 => "L3_k3".into(),
        }
    }

    /// True when both sides scale identically under `λ^{1/2}φ(λx)`, `T/λ²`.
    pub fn is_scale_invariant(&self) -> bool {
        !matches!(self, Self::LowFreqMaximal | Self::BlockMaximal | Self::L3K3)
    }

    /// The default retarded triple `(-s_k, k, ∞)`.
    pub fn retarded_admissible_for(k: u32) -> Self {
        Self::RetardedAdmissible { alpha: -critical_index(k), p: k as f64, q: f64::INFINITY }
    }

    fn validate(&self) -> Result<()> {
        let bad = |a: f64, p: f64, q: f64| {
            Error::domain(format!("({a}, {p}, {q}) is not 1-admissible: need 4 ≤ p < ∞, 2 < q ≤ ∞, 2/p + 1/q ≤ 1/2, α = 1/p + 2/q - 1/2"))
        };
        match *self {
            Self::Admissible { alpha, p, q } if !is_admissible(AdmissibleTriple::new(alpha, p, q)) => {
                Err(bad(alpha, p, q))
            }
            Self::RetardedAdmissible { alpha, p, q } => {
                if !is_admissible(AdmissibleTriple::new(alpha, p, q)) {
                    Err(bad(alpha, p, q))
                } else if !(p > 2.0 && q > 2.0) {
                    Err(Error::domain(format!("retarded estimate needs 2 < p, q; got p = {p}, q = {q}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

fn parse_exponent(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::domain(format!("bad exponent `{t}`"))),
    }
}

fn parse_triple(args: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!("expected three exponents, got `{args}`")));
    }
    Ok((parse_exponent(parts[0])?, parse_exponent(parts[1])?, parse_exponent(parts[2])?))
}

impl FromStr for EstimateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((head, rest)) = s.split_once('(') {
            let args = rest.strip_suffix(')').ok_or_else(|| Error::domain(format!("unclosed `(` in `{s}`")))?;
            let (alpha, p, q) = parse_triple(args)?;
            return match head {
                "admissible" => Ok(Self::Admissible { alpha, p, q }),
                "retarded_admissible" => Ok(Self::RetardedAdmissible { alpha, p, q }),
                other => Err(Error::domain(format!("unknown estimate `{other}`"))),
            };
        }
        Ok(match s {
            "est0" => Self::Est0,
            "est1" => Self::Est1,
            "est2" => Self::Est2,
            "low_freq_maximal" => Self::LowFreqMaximal,
            "block_maximal" => Self::BlockMaximal,
            "retarded" => Self::Retarded,
            "besov_retarded" => Self::BesovRetarded,
            "L3_k3" | "l3_k3" => Self::L3K3,
            other => return Err(Error::domain(format!("unknown estimate `{other}`"))),
        })
    }
}

impl fmt::Display for EstimateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub k: u32,
    pub trials: usize,
    pub scales: Vec<f64>,
    pub seed: u64,
    pub n: usize,
    /// Base horizon of the scale-invariant estimates.
    pub horizon: f64,
    pub nodes: usize,
    /// Sobolev index on the right of the `k = 3` estimate.
    pub l3_s: f64,
    pub sampler: SamplerConfig,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            k: 4,
            trials: 20,
            scales: vec![1.0, 2.0, 4.0, 8.0],
            seed: 7,
            n: 2048,
            horizon: 32.0,
            nodes: 257,
            l3_s: 0.4,
            sampler: SamplerConfig::default(),
        }
    }
}

impl EstimateConfig {
    /// Scales `1, 2, …, 2^octaves`.
    pub fn with_octaves(mut self, octaves: u32) -> Self {
        self.scales = (0..=octaves).map(|o| 2f64.powi(o as i32)).collect();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRatio {
    pub scale: f64,
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub scale: f64,
    pub max: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: String,
    pub k: u32,
    pub seed: u64,
    pub trials: usize,
    pub ratios: Vec<TrialRatio>,
    pub per_scale: Vec<ScaleSummary>,
    pub max: f64,
    pub median: f64,
    /// Max over scales of the per-scale max ratio, divided by the min.
    pub spread: f64,
}

/// `e^{-iξ|ξ|t}·m(ξ)·φ̂` at `nodes` times over `[0, horizon]`. The Nyquist
/// coefficient is dropped.
fn propagate_with(phi: &SpectralField, horizon: f64, nodes: usize, m: impl Fn(f64) -> f64) -> Result<Trajectory> {
    let grid = *phi.grid();
    let nyq = grid.nyquist_index();
    let weighted: Vec<Complex64> = phi
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| if i == nyq { Complex64::new(0.0, 0.0) } else { a * m(grid.wavenumber(i)) })
        .collect();
    Trajectory::sample(0.0, horizon, nodes, |t| {
        let c = weighted
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let xi = grid.wavenumber(i);
                a * Complex64::from_polar(1.0, -xi * xi.abs() * t)
            })
            .collect();
        SpectralField::from_parts(grid, c, phi.parity()).inverse()
    })
}

fn frac_weight(alpha: f64) -> impl Fn(f64) -> f64 + Copy {
    move |xi: f64| if xi == 0.0 { 0.0 } else { xi.abs().powf(alpha) }
}

fn apply_weight(u: &Trajectory, m: impl Fn(f64) -> f64 + Copy) -> Result<Trajectory> {
    u.try_map(|f| Ok(filter(&forward_transform(f), m).inverse()))
}

/// Random time profile `a(τ) = Σ_{m=1}^{3} c_m sin(mπτ + θ_m)` on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
struct TimeProfile {
    c: [f64; 3],
    theta: [f64; 3],
}

impl TimeProfile {
    fn draw(s: &mut PacketSampler) -> Self {
        let mut c = [0.0; 3];
        let mut theta = [0.0; 3];
        for m in 0..3 {
            c[m] = s.uniform(-1.0, 1.0);
            theta[m] = s.uniform(0.0, std::f64::consts::TAU);
        }
        Self { c, theta }
    }

    fn eval(&self, tau: f64) -> f64 {
        (0..3).map(|m| self.c[m] * ((m + 1) as f64 * std::f64::consts::PI * tau + self.theta[m]).sin()).sum()
    }
}

struct Draw {
    profile: PacketProfile,
    time: TimeProfile,
}

fn measure(id: EstimateId, cfg: &EstimateConfig, grid: SpectralGrid, draw: &Draw, lambda: f64) -> Result<(f64, f64)> {
    let range = BlockRange::for_grid(&grid);
    let phi = draw.profile.sample(grid, lambda, 0.5);
    let horizon = if id.is_scale_invariant() { cfg.horizon / (lambda * lambda) } else { 1.0 };
    let nodes = cfg.nodes;
    let c = forward_transform(&phi);
    let l2 = phi.norm_l2();
    Ok(match id {
        EstimateId::Est0 => (mixed_norm_tx(&propagate_with(&c, horizon, nodes, |_| 1.0)?, f64::INFINITY, 2.0)?, l2),
        EstimateId::Est1 => (mixed_norm_xt(&propagate_with(&c, horizon, nodes, frac_weight(0.5))?, f64::INFINITY, 2.0)?, l2),
        EstimateId::Est2 => (mixed_norm_xt(&propagate_with(&c, horizon, nodes, frac_weight(-0.25))?, 4.0, f64::INFINITY)?, l2),
        EstimateId::Admissible { alpha, p, q } => {
            (mixed_norm_xt(&propagate_with(&c, horizon, nodes, frac_weight(alpha))?, p, q)?, l2)
        }
        EstimateId::LowFreqMaximal => {
            let low = |xi: f64| DyadicBump::below_symbol(1, xi);
            let lhs = mixed_norm_xt(&propagate_with(&c, horizon, nodes, low)?, 2.0, f64::INFINITY)?;
            (lhs, filter(&c, low).inverse().norm_l2())
        }
        EstimateId::BlockMaximal => {
            let mut best = (0.0, 1.0);
            for j in range.indices().filter(|&j| j >= 0) {
                let sym = move |xi: f64| DyadicBump::block_symbol(j, xi);
                let rhs = filter(&c, sym).inverse().norm_l2();
                if rhs <= 1e-6 * l2 {
                    continue;
                }
                let lhs = 2f64.powf(-0.5 * j as f64)
                    * mixed_norm_xt(&propagate_with(&c, horizon, nodes, sym)?, 2.0, f64::INFINITY)?;
                if lhs / rhs > best.0 / best.1 {
                    best = (lhs, rhs);
                }
            }
            best
        }
        EstimateId::L3K3 => {
            let lhs = mixed_norm_xt(&propagate_with(&c, horizon, nodes, |_| 1.0)?, 3.0, f64::INFINITY)?;
            (lhs, sobolev(&phi, cfg.l3_s, false)?)
        }
        EstimateId::Retarded | EstimateId::RetardedAdmissible { .. } | EstimateId::BesovRetarded => {
            let f = Trajectory::sample(0.0, horizon, nodes, |t| phi.scale(draw.time.eval(t / horizon)))?;
            let d = duhamel(&f)?;
            let rhs_l1l2 = || mixed_norm_xt(&f, 1.0, 2.0);
            match id {
                EstimateId::Retarded => {
                    (mixed_norm_tx(&apply_weight(&d, frac_weight(0.5))?, f64::INFINITY, 2.0)?, rhs_l1l2()?)
                }
                EstimateId::RetardedAdmissible { alpha, p, q } => {
                    (mixed_norm_xt(&apply_weight(&d, frac_weight(alpha + 0.5))?, p, q)?, rhs_l1l2()?)
                }
                _ => (
                    mixed_norm_xt(&d, cfg.k as f64, f64::INFINITY)?,
                    n_norm(&f, critical_index(cfg.k), 1.0, &range)?,
                ),
            }
        }
    })
}

/// Measure `id` on `cfg.trials` draws at every scale. The same draws are used
/// at every scale.
pub fn verify_linear_estimate(id: EstimateId, cfg: &EstimateConfig) -> Result<EstimateReport> {
    id.validate()?;
    if cfg.trials == 0 || cfg.scales.is_empty() {
        return Err(Error::Config { key: "trials".into(), constraint: "need at least one trial and one scale".into() });
    }
    for &l in &cfg.scales {
        if !(l > 0.0 && l.log2().fract() == 0.0) {
            return Err(Error::domain(format!("scale {l} is not a power of two")));
        }
    }
    let grid = SpectralGrid::standard(cfg.n)?;
    let mut sampler = PacketSampler::new(cfg.seed, cfg.sampler);
    let draws: Vec<Draw> = (0..cfg.trials)
        .map(|_| {
            let profile = sampler.profile();
            let time = TimeProfile::draw(&mut sampler);
            Draw { profile, time }
        })
        .collect();
    let jobs: Vec<(f64, usize)> =
        cfg.scales.iter().flat_map(|&l| (0..cfg.trials).map(move |t| (l, t))).collect();
    let results = ordered_map(jobs, |(scale, trial)| {
        measure(id, cfg, grid, &draws[trial], scale).map(|(lhs, rhs)| TrialRatio { scale, trial, lhs, rhs, ratio: lhs / rhs })
    });
    let ratios = results.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(bad) = ratios.iter().find(|r| !(r.ratio.is_finite() && r.ratio > 0.0)) {
        return Err(Error::domain(format!(
            "non-finite or non-positive ratio {} at scale {} trial {} (lhs {}, rhs {})",
            bad.ratio, bad.scale, bad.trial, bad.lhs, bad.rhs
        )));
    }
    let per_scale: Vec<ScaleSummary> = cfg
        .scales
        .iter()
        .map(|&scale| {
            let r: Vec<f64> = ratios.iter().filter(|t| t.scale == scale).map(|t| t.ratio).collect();
            ScaleSummary { scale, max: r.iter().copied().fold(0.0, f64::max), median: median(&r) }
        })
        .collect();
    let all: Vec<f64> = ratios.iter().map(|t| t.ratio).collect();
    let maxes: Vec<f64> = per_scale.iter().map(|s| s.max).collect();
    let spread = maxes.iter().copied().fold(0.0, f64::max) / maxes.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EstimateReport {
        estimate: id.name(),
        k: cfg.k,
        seed: cfg.seed,
        trials: cfg.trials,
        max: all.iter().copied().fold(0.0, f64::max),
        median: median(&all),
        ratios,
        per_scale,
        spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub k: u32,
    pub horizons: Vec<f64>,
    pub values: Vec<f64>,
    pub nonincreasing: bool,
    /// Value at the smallest horizon over the value at the largest.
    pub final_over_initial: f64,
}

/// `‖V(t)u_0 - u_0‖_{L^k_x L^∞_T}` for each horizon. All horizons share one
/// node set of step `min(T)/8`, so the sup over a shorter window is taken over
/// a subset of the nodes of a longer one.
pub fn smallness_probe(u0: &Field, k: u32, horizons: &[f64]) -> Result<SmallnessReport> {
    if horizons.is_empty() || horizons.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(Error::domain("horizons must be positive"));
    }
    if !crate::spectral::has_zero_mean(&forward_transform(u0)) {
        return Err(Error::domain("smallness probe needs zero-mean data"));
    }
    let grid = *u0.grid();
    let t_min = horizons.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    let dt = t_min / 8.0;
    let steps = (t_max / dt).round() as usize;
    let mut order: Vec<usize> = (0..horizons.len()).collect();
    order.sort_by(|&a, &b| horizons[a].total_cmp(&horizons[b]));

    let mut running = vec![0.0f64; grid.n()];
    let mut values = vec![0.0; horizons.len()];
    let mut next = 0;
    let dx = grid.dx();
    let lk = |r: &[f64]| r.iter().map(|v| dx * v.powi(k as i32)).sum::<f64>().powf(1.0 / k as f64);
    for m in 0..=steps {
        let t = m as f64 * dt;
        let frame = crate::spectral::free_propagate(t, u0, crate::spectral::Dispersion::BenjaminOno);
        for ((r, a), b) in running.iter_mut().zip(frame.values()).zip(u0.values()) {
            *r = r.max((a - b).norm());
        }
        while next < order.len() && (horizons[order[next]] / dt).round() as usize == m {
            values[order[next]] = lk(&running);
            next += 1;
        }
    }
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let nonincreasing = sorted.windows(2).all(|w| w[0] <= w[1]);
    let first = values[order[0]];
    let last = values[*order.last().unwrap()];
    let final_over_initial = if last == 0.0 { 0.0 } else { first / last };
    Ok(SmallnessReport { k, horizons: horizons.to_vec(), values, nonincreasing, final_over_initial })
}

/// `T = 1, 1/2, …, 2^{-halvings}`.
pub fn halving_horizons(halvings: u32) -> Vec<f64> {
    (0..=halvings).map(|h| 2f64.powi(-(h as i32))).collect()
}
