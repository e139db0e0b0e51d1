use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use gbo_core::evolution::{solve_gbo, NonlinearForm, Sign, SolverConfig};
use gbo_core::gauge::{gauge_data, manufactured_residual};
use gbo_core::io::{read_field, read_trajectory, save_field, Report, RunConfig};
use gbo_core::lab::data::{single_mode, standard_bump};
use gbo_core::lab::{
    picard_solve, scaling_check as run_scaling, verify_linear_estimate, EstimateConfig, EstimateId, PacketSampler,
    PicardConfig, PicardMode, PicardReport, SamplerConfig, ScalingFamily,
};
use gbo_core::littlewood_paley::{block_below, block_energies, paraproduct, remainder, telescoping_sum};
use gbo_core::norms::{NormKind, NormSpec};
use gbo_core::spectral::{dealiased_power, derivative, free_propagate, Dispersion};
use gbo_core::util::observed_order;
use gbo_core::{Error, Field, SpectralGrid, Trajectory};

use crate::{Common, Outcome};

type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormArg {
    Transport,
    Conservative,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Plain,
    Split,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    /// Seeded random packet superposition.
    Packets,
    /// Odd Gaussian bump centred in the box.
    Bump,
    /// A single Fourier mode.
    Mode,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    /// Peak of the default bump datum (ignored with --input).
    #[arg(long, default_value_t = 1.0)]
    amp: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    #[arg(long, value_enum, default_value_t = FormArg::Transport)]
    form: FormArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PicardArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    #[arg(long, default_value_t = 0.5)]
    amp: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    /// Time nodes on [0, T].
    #[arg(long, default_value_t = 201)]
    nodes: usize,
    #[arg(long, default_value_t = 60)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Stand-in for the constant in the ball radius 1/(8C).
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    /// Skip the comparison with the RK4 solver.
    #[arg(long)]
    no_cross_check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    /// est0, est1, est2, low_freq_maximal, block_maximal, retarded,
    /// besov_retarded, l3_k3, admissible(a,p,q), retarded_admissible(a,p,q).
    #[arg(long)]
    estimate: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Scales 1, 2, ..., 2^octaves.
    #[arg(long, default_value_t = 3)]
    octaves: u32,
    /// Base horizon of the scale-invariant estimates.
    #[arg(long, default_value_t = 32.0)]
    base_horizon: f64,
    #[arg(long, default_value_t = 257)]
    nodes: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormsArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    /// Norm to evaluate (repeatable): mixed_xt, mixed_tx, sobolev_hom,
    /// sobolev_inhom, besov, S_space, N_space, X_space, Y_norm, X_space_k3.
    #[arg(long = "norm", default_values_t = vec!["sobolev_hom".to_string()])]
    norms: Vec<String>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Time nodes when a field is propagated freely.
    #[arg(long, default_value_t = 65)]
    nodes: usize,
    /// Peak of the default bump datum.
    #[arg(long, default_value_t = 1.0)]
    amp: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GaugeArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    /// Dyadic index of the gauge.
    #[arg(long, default_value_t = 2)]
    j: i32,
    #[arg(long, default_value_t = 1.0)]
    amp: f64,
    /// Time steps for the order estimate, coarse to fine.
    #[arg(long = "step", default_values_t = vec![1.0, 0.5, 0.25])]
    steps: Vec<f64>,
    /// Step at which the residual itself is reported.
    #[arg(long, default_value_t = 1e-4)]
    fine_step: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParaproductArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScalingArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    /// Scale factor (repeatable, powers of two).
    #[arg(long = "lambda", default_values_t = vec![2.0, 4.0, 8.0])]
    lambdas: Vec<f64>,
    /// Also compare evolved members over [0, T].
    #[arg(long)]
    flow: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LpArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MakeDataArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub(crate) common: Common,
    #[arg(long, value_enum, default_value_t = DataKind::Packets)]
    kind: DataKind,
    #[arg(long, default_value_t = 1.0)]
    amp: f64,
    /// Mode number for --kind mode.
    #[arg(long, default_value_t = 8)]
    mode: i64,
}

/// Config echo: the resolved run config plus the command's own flags.
fn echo<A: Serialize>(cfg: &RunConfig, args: &A) -> Result<Value> {
    let mut map: Map<String, Value> = match serde_json::to_value(cfg)? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(extra) = serde_json::to_value(args)? {
        map.extend(extra);
    }
    map.insert("s_resolved".into(), json!(cfg.resolved_s()));
    Ok(Value::Object(map))
}

fn report<A: Serialize, S: Serialize>(
    command: &str,
    cfg: &RunConfig,
    args: &A,
    inputs: &[&[u8]],
    summary: &S,
    rows: &[Value],
) -> Result<Report> {
    Report::new(command, &echo(cfg, args)?, inputs, summary, rows)
}

fn input_bytes(cfg: &RunConfig) -> Result<Option<Vec<u8>>> {
    match &cfg.input {
        Some(p) => Ok(Some(std::fs::read(p)?)),
        None => Ok(None),
    }
}

/// The `--input` field, or `default` on the config grid.
fn field_or(cfg: &RunConfig, bytes: &Option<Vec<u8>>, default: impl FnOnce(SpectralGrid) -> Field) -> Result<Field> {
    match bytes {
        Some(b) => read_field(&mut b.as_slice()),
        None => Ok(default(cfg.grid()?)),
    }
}

fn inputs(bytes: &Option<Vec<u8>>) -> Vec<&[u8]> {
    bytes.iter().map(|b| b.as_slice()).collect()
}

pub fn simulate(a: &SimulateArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let u0 = field_or(cfg, &bytes, |g| standard_bump(g, a.amp))?;
    let form = match a.form {
        FormArg::Transport => NonlinearForm::Transport,
        FormArg::Conservative => NonlinearForm::Conservative,
    };
    let scfg = SolverConfig::new(cfg.k, cfg.dt, cfg.steps()).with_stride(cfg.stride).with_sign(a.sign.into()).with_form(form);
    match solve_gbo(&u0, &scfg) {
        Ok(ev) => {
            if let Some(out) = &cfg.output {
                gbo_core::io::save_trajectory(out, &ev.trajectory)?;
            }
            let rows: Vec<Value> = ev
                .trajectory
                .frames()
                .iter()
                .enumerate()
                .map(|(m, f)| {
                    json!({
                        "t": ev.trajectory.time(m),
                        "mass": f.integral().re,
                        "l2": f.norm_l2(),
                        "sup": f.max_abs(),
                    })
                })
                .collect();
            let c = ev.conservation;
            let summary = json!({
                "status": "ok",
                "steps": scfg.steps,
                "horizon": scfg.horizon(),
                "mass_initial": c.mass_initial,
                "l2_initial": c.l2_initial,
                "mass_drift": c.mass_drift,
                "l2_drift": c.l2_drift,
            });
            Ok(Outcome { report: report("simulate", cfg, a, &inputs(&bytes), &summary, &rows)?, failed: false })
        }
        Err(Error::BlowUp { last_valid_time, reason }) => {
            let summary = json!({ "status": "blow_up", "last_valid_time": last_valid_time, "reason": reason });
            Ok(Outcome { report: report("simulate", cfg, a, &inputs(&bytes), &summary, &[])?, failed: true })
        }
        Err(e) => Err(e),
    }
}

fn picard_rows(rep: &PicardReport) -> Vec<Value> {
    (0..rep.ball_m.len())
        .map(|m| {
            let residual = m.checked_sub(1).and_then(|i| rep.residuals.get(i)).copied();
            let ratio = m.checked_sub(2).and_then(|i| rep.ratios.get(i)).copied();
            json!({
                "iterate": m,
                "residual": residual,
                "ratio": ratio,
                "ball_m": rep.ball_m[m],
                "ball_s": rep.ball_s[m],
                "in_ball_m": rep.in_ball_m[m],
                "in_ball_s": rep.in_ball_s[m],
            })
        })
        .collect()
}

fn picard_summary(rep: &PicardReport, status: &str) -> Value {
    json!({
        "status": status,
        "mode": rep.mode,
        "k": rep.k,
        "horizon": rep.horizon,
        "delta": rep.delta,
        "initial_norm": rep.initial_norm,
        "iterations": rep.residuals.len(),
        "converged": rep.converged,
        "max_ratio": rep.max_ratio(),
        "solver_gap": rep.solver_gap,
    })
}

pub fn picard(a: &PicardArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let u0 = field_or(cfg, &bytes, |g| standard_bump(g, a.amp))?;
    let pcfg = PicardConfig {
        k: cfg.k,
        sign: a.sign.into(),
        horizon: cfg.horizon,
        nodes: a.nodes,
        tol: a.tol,
        max_iter: a.max_iter,
        mode: match a.mode {
            ModeArg::Plain => PicardMode::Plain,
            ModeArg::Split => PicardMode::Split,
        },
        eps: cfg.eps,
        constant_proxy: a.constant,
        cross_check: !a.no_cross_check,
    };
    let (rep, failed) = match picard_solve(&u0, &pcfg) {
        Ok((_, rep)) => (rep, false),
        Err(Error::NonContraction { report }) => (*report, true),
        Err(e) => return Err(e),
    };
    let status = if failed { "non_contraction" } else { "converged" };
    let out = report("picard", cfg, a, &inputs(&bytes), &picard_summary(&rep, status), &picard_rows(&rep))?;
    Ok(Outcome { report: out, failed })
}

pub fn verify(a: &VerifyArgs, cfg: &RunConfig) -> Result<Outcome> {
    let id: EstimateId = a.estimate.parse()?;
    let ecfg = EstimateConfig {
        k: cfg.k,
        trials: a.trials,
        seed: cfg.seed,
        n: cfg.n,
        horizon: a.base_horizon,
        nodes: a.nodes,
        ..EstimateConfig::default().with_octaves(a.octaves)
    };
    let rep = verify_linear_estimate(id, &ecfg)?;
    let rows: Vec<Value> = rep.ratios.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?;
    let summary = json!({
        "estimate": rep.estimate,
        "k": rep.k,
        "seed": rep.seed,
        "trials": rep.trials,
        "max": rep.max,
        "median": rep.median,
        "spread": rep.spread,
        "per_scale": rep.per_scale,
    });
    Ok(Outcome { report: report("verify", cfg, a, &[], &summary, &rows)?, failed: false })
}

/// A GBT1 trajectory as is, or a field (or the default bump) propagated
/// freely over `[0, T]`.
fn trajectory_input(a: &NormsArgs, cfg: &RunConfig, bytes: &Option<Vec<u8>>) -> Result<Trajectory> {
    if let Some(b) = bytes {
        if let Ok(u) = read_trajectory(&mut b.as_slice()) {
            return Ok(u);
        }
    }
    let u0 = field_or(cfg, bytes, |g| standard_bump(g, a.amp))?;
    Trajectory::sample(0.0, cfg.horizon, a.nodes, |t| free_propagate(t, &u0, Dispersion::BenjaminOno))
}

pub fn norms(a: &NormsArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let u = trajectory_input(a, cfg, &bytes)?;
    let range = gbo_core::littlewood_paley::BlockRange::with_params(u.grid(), cfg.gap, cfg.sim);
    let mut rows = Vec::with_capacity(a.norms.len());
    for name in &a.norms {
        let spec = NormSpec {
            kind: NormKind::parse(name)?,
            s: cfg.resolved_s(),
            theta: a.theta,
            eps: cfg.eps,
            p: a.p,
            q: a.q,
            r: a.r,
            k: cfg.k,
        };
        rows.push(json!({ "norm": name, "value": spec.evaluate(&u, &range)? }));
    }
    let summary = json!({ "nodes": u.len(), "horizon": u.horizon(), "n": u.grid().n() });
    Ok(Outcome { report: report("norms", cfg, a, &inputs(&bytes), &summary, &rows)?, failed: false })
}

pub fn gauge_check(a: &GaugeArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let u0 = field_or(cfg, &bytes, |g| standard_bump(g, a.amp))?;
    let range = gbo_core::littlewood_paley::BlockRange::with_params(u0.grid(), cfg.gap, cfg.sim);
    let b = gauge_data(&u0, a.j, cfg.k, &range)?.b;
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &dt in a.steps.iter().chain(std::iter::once(&a.fine_step)) {
        let r = manufactured_residual(&b, dt, 5)?;
        maxima.push(r.max);
        rows.push(json!({
            "dt": dt,
            "identity": r.identity,
            "transformed": r.transformed,
            "original": r.original,
            "max": r.max,
        }));
    }
    let order = maxima[..a.steps.len()].windows(2).map(|w| observed_order(w[0], w[1])).reduce(f64::min);
    let summary = json!({ "j": a.j, "order": order, "fine_residual": maxima.last() });
    Ok(Outcome { report: report("gauge-check", cfg, a, &inputs(&bytes), &summary, &rows)?, failed: false })
}

pub fn paraproduct_check(a: &ParaproductArgs, cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let range = cfg.block_range()?;
    let k = cfg.k;
    let mut sampler = PacketSampler::new(cfg.seed, SamplerConfig::default());
    let mut rows = Vec::with_capacity(a.trials);
    let (mut worst_split, mut worst_tel) = (0.0f64, 0.0f64);
    for trial in 0..a.trials {
        let u = sampler.unit_field(grid);
        let u = u.scale(1.0 / u.max_abs());
        let exact = derivative(&dealiased_power(&u, k + 1)?);
        let split = paraproduct(&u, &u, k, &range)?.lin_comb(1.0, &remainder(&u, k, &range)?, -1.0)?;
        let split_defect = split.l2_distance(&exact) / exact.norm_l2();

        let (lo, hi) = (range.jmin - 2, range.jmax + 2);
        let tel = telescoping_sum(&u, k, lo, hi)?;
        let ends = dealiased_power(&block_below(hi + 1, &u), k + 1)?
            .lin_comb(1.0, &dealiased_power(&block_below(lo, &u), k + 1)?, -1.0)?;
        let tel_defect = tel.l2_distance(&ends) / ends.norm_l2();
        worst_split = worst_split.max(split_defect);
        worst_tel = worst_tel.max(tel_defect);
        rows.push(json!({ "trial": trial, "split_defect": split_defect, "telescoping_defect": tel_defect }));
    }
    let summary = json!({ "k": k, "max_split_defect": worst_split, "max_telescoping_defect": worst_tel });
    Ok(Outcome { report: report("paraproduct-check", cfg, a, &[], &summary, &rows)?, failed: false })
}

pub fn scaling_check(a: &ScalingArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let base = field_or(cfg, &bytes, |g| PacketSampler::new(cfg.seed, SamplerConfig::default()).unit_field(g))?;
    let fam = ScalingFamily::new(base, a.lambdas.clone(), cfg.k)?;
    let flow = if a.flow { Some(SolverConfig::for_horizon(cfg.k, cfg.horizon, cfg.dt)?) } else { None };
    let rep = run_scaling(&fam, cfg.resolved_s(), flow.as_ref())?;
    let rows: Vec<Value> = rep.rows.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?;
    let summary = json!({
        "k": rep.k,
        "s": rep.s,
        "max_rel_err": rep.max_rel_err(),
        "max_flow_err": rep.max_flow_err(),
    });
    Ok(Outcome { report: report("scaling-check", cfg, a, &inputs(&bytes), &summary, &rows)?, failed: false })
}

pub fn lp_energies(a: &LpArgs, cfg: &RunConfig) -> Result<Outcome> {
    let bytes = input_bytes(cfg)?;
    let f = field_or(cfg, &bytes, |g| PacketSampler::new(cfg.seed, SamplerConfig::default()).unit_field(g))?;
    let range = gbo_core::littlewood_paley::BlockRange::with_params(f.grid(), cfg.gap, cfg.sim);
    let s = cfg.resolved_s();
    let energies = block_energies(&f, s, &range);
    let rows: Vec<Value> = energies.iter().map(|(j, e)| json!({ "j": j, "energy": e })).collect();
    let total: f64 = energies.iter().map(|(_, e)| e * e).sum();
    let summary = json!({ "s": s, "jmin": range.jmin, "jmax": range.jmax, "sum_of_squares": total });
    Ok(Outcome { report: report("lp-energies", cfg, a, &inputs(&bytes), &summary, &rows)?, failed: false })
}

pub fn make_data(a: &MakeDataArgs, cfg: &RunConfig) -> Result<Outcome> {
    let path = cfg
        .output
        .as_ref()
        .ok_or_else(|| Error::Config { key: "output".into(), constraint: "make-data needs an output path".into() })?;
    let grid = cfg.grid()?;
    let f = match a.kind {
        DataKind::Packets => PacketSampler::new(cfg.seed, SamplerConfig::default()).unit_field(grid).scale(a.amp),
        DataKind::Bump => standard_bump(grid, a.amp),
        DataKind::Mode => single_mode(grid, a.mode, a.amp)?,
    };
    save_field(path, &f)?;
    let written = std::fs::read(path)?;
    let summary = json!({
        "n": grid.n(),
        "period": grid.period(),
        "l2": f.norm_l2(),
        "sup": f.max_abs(),
        "file_hash": gbo_core::io::content_hash(&[&written]),
    });
    Ok(Outcome { report: report("make-data", cfg, a, &[], &summary, &[])?, failed: false })
}
