//! Ten end-to-end acceptance checks. Each prints one `PASS`/`FAIL` line with
//! the measured quantities; the test fails if any criterion fails.

use std::time::Instant;

use gbo_core::evolution::{evolve, solve_gbo, SolverConfig};
use gbo_core::gauge::{gauge_data, manufactured_residual};
use gbo_core::io::Report;
use gbo_core::lab::data::{from_coeffs, product_band, standard_bump, PacketSampler, SamplerConfig};
use gbo_core::lab::{
    halving_horizons, lipschitz_family, picard_solve, scaling_check, smallness_probe, verify_linear_estimate,
    EstimateConfig, EstimateId, PicardConfig, ScalingFamily,
};
use gbo_core::lab::critical_index;
use gbo_core::littlewood_paley::{
    block_below, block_energy_sum, paraproduct, remainder, telescoping_sum, BlockRange, DyadicBump,
};
use gbo_core::spectral::{
    dealiased_power, derivative, free_propagate, frac_derivative, hilbert, project_neg,
    project_pos, Dispersion,
};
use gbo_core::util::observed_order;
use gbo_core::{Error, Field, SpectralGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Real zero-mean field with random coefficients on `1 ≤ |m| < band`.
fn random_field(grid: SpectralGrid, band: usize, rng: &mut ChaCha8Rng) -> Field {
    let n = grid.n();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..band {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + m as f64 / 16.0);
        c[m] = z;
        c[n - m] = z.conj();
    }
    let f = from_coeffs(grid, c).unwrap();
    let peak = f.max_abs();
    f.scale(1.0 / peak)
}

/// Defect relative to the unit-peak input.
fn rel(a: &Field, b: &Field) -> f64 {
    a.max_diff(b)
}

fn multiplier_algebra() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_field(g, 500, &mut rng);
        let hf = hilbert(&f);
        worst = worst.max(rel(&hilbert(&hf), &f.scale(-1.0)));
        let lhs = hf.scale_complex(i);
        let rhs = project_pos(&f).lin_comb(1.0, &project_neg(&f), -1.0).unwrap();
        worst = worst.max(rel(&lhs, &rhs));
        let v = |t: f64, f: &Field| free_propagate(t, f, Dispersion::BenjaminOno);
        let d = |f: &Field| frac_derivative(0.5, f).unwrap();
        let ops: [&dyn Fn(&Field) -> Field; 5] =
            [&hilbert, &d, &project_pos, &project_neg, &|f: &Field| v(0.7, f)];
        for a in 0..ops.len() {
            for b in a + 1..ops.len() {
                worst = worst.max(rel(&ops[a](&ops[b](&f)), &ops[b](&ops[a](&f))));
            }
        }
        let vf = v(1.3, &f);
        worst = worst.max((vf.norm_l2() - f.norm_l2()).abs() / f.norm_l2());
        worst = worst.max(rel(&v(0.4, &v(0.9, &f)), &v(1.3, &f)));
    }
    outcome(worst <= 1e-12, format!("worst relative defect {worst:.2e}"))
}

fn littlewood_paley_partition() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let mut defect = 0.0f64;
    for i in 0..g.n() {
        let xi = g.wavenumber(i);
        if xi == 0.0 {
            continue;
        }
        let s: f64 = (-40..=40).map(|j| DyadicBump::block_symbol(j, xi)).sum();
        defect = defect.max((s - 1.0).abs());
    }
    let range = BlockRange::for_grid(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let f = random_field(g, 500, &mut rng);
        let c = f.norm_l2().powi(2) / block_energy_sum(&f, &range);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    let pass = defect <= 1e-12 && lo >= 1.0 && hi <= 3.0;
    outcome(pass, format!("partition defect {defect:.2e}, constant in [{lo:.4}, {hi:.4}]"))
}

fn paraproduct_exactness() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let range = BlockRange::for_grid(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_split, mut worst_tel) = (0.0f64, 0.0f64);
    for k in 3..=6u32 {
        for _ in 0..20 {
            let u = random_field(g, product_band(&g, k), &mut rng);
            let exact = derivative(&dealiased_power(&u, k + 1).unwrap());
            let pi = paraproduct(&u, &u, k, &range).unwrap();
            let rem = remainder(&u, k, &range).unwrap();
            let split = pi.lin_comb(1.0, &rem, -1.0).unwrap();
            worst_split = worst_split.max(split.l2_distance(&exact) / exact.norm_l2());

            let (lo, hi) = (range.jmin - 2, range.jmax + 2);
            let tel = telescoping_sum(&u, k, lo, hi).unwrap();
            let top = dealiased_power(&block_below(hi + 1, &u), k + 1).unwrap();
            let bottom = dealiased_power(&block_below(lo, &u), k + 1).unwrap();
            let ends = top.lin_comb(1.0, &bottom, -1.0).unwrap();
            worst_tel = worst_tel.max(tel.l2_distance(&ends) / ends.norm_l2());
        }
    }
    let pass = worst_split <= 1e-10 && worst_tel <= 1e-10;
    outcome(pass, format!("split defect {worst_split:.2e}, telescoping defect {worst_tel:.2e}"))
}

fn scaling_law() -> Outcome {
    let g = SpectralGrid::standard(2048).unwrap();
    let mut worst = 0.0f64;
    let mut worst_crit = 0.0f64;
    for k in [3u32, 4, 6] {
        let base = PacketSampler::new(11, SamplerConfig::default()).unit_field(g);
        let fam = ScalingFamily::new(base, vec![2.0, 4.0, 8.0], k).unwrap();
        let sk = critical_index(k);
        for s in [0.0, sk, 0.5] {
            let rep = scaling_check(&fam, s, None).unwrap();
            worst = worst.max(rep.max_rel_err());
            if s == sk {
                for row in &rep.rows {
                    worst_crit = worst_crit.max((row.ratio - 1.0).abs());
                }
            }
        }
    }
    let pass = worst <= 1e-10 && worst_crit <= 1e-10;
    outcome(pass, format!("exponent defect {worst:.2e}, critical |ratio-1| {worst_crit:.2e}"))
}

fn solver_validity() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let u0 = standard_bump(g, 1.0);
    let run = |dt: f64| evolve(&u0, &SolverConfig::for_horizon(4, 1.0, dt).unwrap()).unwrap();
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let order = observed_order(a.l2_distance(&b), b.l2_distance(&c));

    let small = standard_bump(g, 0.1);
    let ev = solve_gbo(&small, &SolverConfig::new(4, 1e-3, 1000).with_stride(100)).unwrap();
    let drift = ev.conservation.mass_drift.max(ev.conservation.l2_drift);
    let end = ev.trajectory.last().clone();
    let back = evolve(&end, &SolverConfig::new(4, -1e-3, 1000)).unwrap();
    let reversal = back.max_diff(&small) / small.max_abs();

    let pass = (3.5..=4.5).contains(&order) && drift <= 1e-8 && reversal <= 1e-7;
    outcome(pass, format!("order {order:.3}, drift {drift:.2e}, reversal {reversal:.2e}"))
}

fn estimate_harness() -> Outcome {
    let cfg = EstimateConfig::default().with_octaves(3);
    let est0 = verify_linear_estimate(EstimateId::Est0, &cfg).unwrap();
    let est0_dev = est0.ratios.iter().map(|r| (r.ratio - 1.0).abs()).fold(0.0, f64::max);
    let est1 = verify_linear_estimate(EstimateId::Est1, &cfg).unwrap();
    let est2 = verify_linear_estimate(EstimateId::Est2, &cfg).unwrap();
    let ret = verify_linear_estimate(EstimateId::Retarded, &cfg).unwrap();
    let pass = est0_dev <= 1e-12
        && est1.spread <= 1.5
        && est2.spread <= 1.5
        && ret.max.is_finite()
        && ret.spread <= 2.0;
    outcome(
        pass,
        format!(
            "est0 |ratio-1| {est0_dev:.2e}, est1 spread {:.3} (max {:.3}), est2 spread {:.3} (max {:.3}), retarded spread {:.3} (max {:.3})",
            est1.spread, est1.max, est2.spread, est2.max, ret.spread, ret.max
        ),
    )
}

fn smallness() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let rep = smallness_probe(&standard_bump(g, 1.0), 4, &halving_horizons(8)).unwrap();
    let pass = rep.nonincreasing && rep.final_over_initial <= 0.05;
    outcome(pass, format!("nonincreasing {}, final/initial {:.3e}", rep.nonincreasing, rep.final_over_initial))
}

fn gauge_conjugation() -> Outcome {
    let g = SpectralGrid::standard(1024).unwrap();
    let range = BlockRange::for_grid(&g);
    let b = gauge_data(&standard_bump(g, 1.0), 2, 4, &range).unwrap().b;
    let fine = manufactured_residual(&b, 1e-4, 5).unwrap();
    let r = |dt: f64| manufactured_residual(&b, dt, 5).unwrap().max;
    let (e1, e2, e3) = (r(1.0), r(0.5), r(0.25));
    let order = observed_order(e1, e2).min(observed_order(e2, e3));
    let pass = fine.max <= 1e-6 && order >= 1.8;
    outcome(pass, format!("residual {:.2e} at dt=1e-4, order {order:.3}", fine.max))
}

fn fixed_point() -> Outcome {
    let g = SpectralGrid::standard(512).unwrap();
    let cfg = PicardConfig::default();
    let u0 = standard_bump(g, 0.5);
    let (_, rep) = picard_solve(&u0, &cfg).unwrap();
    let ratio = rep.max_ratio().unwrap_or(0.0);
    let gap = rep.solver_gap.unwrap_or(f64::INFINITY);
    let big = picard_solve(&u0.scale(100.0), &cfg);
    let diverges = matches!(big, Err(Error::NonContraction { .. }));
    let psi = standard_bump(g, 1.0);
    let fam = lipschitz_family(&u0, &psi, &[1e-2, 1e-3, 1e-4], &cfg).unwrap();
    let spread = fam.max_spread();
    let pass = rep.converged && ratio < 0.5 && gap <= 1e-6 && diverges && spread <= 2.0;
    outcome(
        pass,
        format!(
            "converged {}, max ratio {ratio:.2e}, solver gap {gap:.2e}, x100 non-contraction {diverges}, lipschitz spread {spread:.3}",
            rep.converged
        ),
    )
}

fn report_bytes(workers: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
    pool.install(|| {
        let cfg = EstimateConfig { trials: 4, ..EstimateConfig::default().with_octaves(1) };
        let est = verify_linear_estimate(EstimateId::Est2, &cfg).unwrap();
        let g = SpectralGrid::standard(1024).unwrap();
        let range = BlockRange::for_grid(&g);
        let u = PacketSampler::new(5, SamplerConfig::default()).unit_field(g);
        let energies: Vec<_> = gbo_core::littlewood_paley::block_energies(&u, 0.25, &range)
            .into_iter()
            .map(|(j, e)| serde_json::json!({ "j": j, "energy": e }))
            .collect();
        let mut out = Report::new("verify", &cfg, &[], &est.name_summary(), &est.ratios).unwrap().to_ndjson().unwrap();
        out.extend(Report::new("lp-energies", &5u64, &[], &(), &energies).unwrap().to_ndjson().unwrap());
        out
    })
}

fn determinism() -> Outcome {
    let a = report_bytes(1);
    let b = report_bytes(1);
    let c = report_bytes(4);
    let pass = a == b && a == c;
    outcome(pass, format!("{} bytes, repeat equal {}, 4-worker equal {}", a.len(), a == b, a == c))
}

trait NameSummary {
    fn name_summary(&self) -> serde_json::Value;
}

impl NameSummary for gbo_core::lab::EstimateReport {
    fn name_summary(&self) -> serde_json::Value {
        serde_json::json!({ "estimate": self.estimate, "max": self.max, "median": self.median, "spread": self.spread })
    }
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("multiplier algebra", multiplier_algebra),
        ("littlewood-paley partition", littlewood_paley_partition),
        ("paraproduct exactness", paraproduct_exactness),
        ("scaling law", scaling_law),
        ("solver validity", solver_validity),
        ("estimate harness", estimate_harness),
        ("smallness", smallness),
        ("gauge conjugation", gauge_conjugation),
        ("fixed point", fixed_point),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
