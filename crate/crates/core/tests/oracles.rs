//! Independent closed-form and brute-force references for the numerical kernels.

use std::f64::consts::PI;

use gbo_core::evolution::{duhamel, solve_gbo, SolverConfig};
use gbo_core::io::{read_field, read_trajectory, write_field, write_trajectory};
use gbo_core::lab::data::standard_bump;
use gbo_core::lab::scaling_exponent;
use gbo_core::littlewood_paley::{block, block_energies, BlockRange};
use gbo_core::norms::{is_admissible, mixed_norm_tx, mixed_norm_xt, sobolev, AdmissibleTriple};
use gbo_core::spectral::{dealiased_power, dealiased_product, derivative, forward_transform, hilbert, PadRule};
use gbo_core::{Field, SpectralGrid, Trajectory};
use num_complex::Complex64;

fn naive_dft(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

#[test]
fn transform_matches_naive_sum() {
    let g = SpectralGrid::new(64, 10.0).unwrap();
    let f = Field::from_fn(g, |x| (x * 0.3).sin() * (-(x - 5.0).powi(2)).exp() + 0.1 * x);
    let fast = forward_transform(&f);
    let slow = naive_dft(f.values());
    for (a, b) in fast.coeffs().iter().zip(&slow) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn parseval() {
    let g = SpectralGrid::standard(256).unwrap();
    let f = standard_bump(g, 2.0);
    let c = forward_transform(&f);
    let spectral: f64 = c.coeffs().iter().map(|a| a.norm_sqr()).sum::<f64>() * g.period();
    let physical: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
    assert!((spectral - physical).abs() < 1e-12 * physical);
}

#[test]
fn sobolev_of_a_cosine() {
    let g = SpectralGrid::standard(128).unwrap();
    let m = 40;
    let xi = 2.0 * PI * m as f64 / g.period();
    let f = Field::from_fn(g, |x| (xi * x).cos());
    for s in [-0.5, 0.0, 0.25, 1.0] {
        let exact = (g.period() / 2.0 * xi.powf(2.0 * s)).sqrt();
        assert!((sobolev(&f, s, true).unwrap() - exact).abs() < 1e-12 * exact);
        let inhom = (g.period() / 2.0 * (1.0 + xi * xi).powf(s)).sqrt();
        assert!((sobolev(&f, s, false).unwrap() - inhom).abs() < 1e-12 * inhom);
    }
}

#[test]
fn hilbert_of_cosine_is_sine() {
    let g = SpectralGrid::standard(128).unwrap();
    let xi = 2.0 * PI * 7.0 / g.period();
    let h = hilbert(&Field::from_fn(g, |x| (xi * x).cos()));
    let expect = Field::from_fn(g, |x| (xi * x).sin());
    assert!(h.max_diff(&expect) < 1e-13);
}

#[test]
fn product_of_modes_splits_into_sum_and_difference() {
    let g = SpectralGrid::standard(64).unwrap();
    let w = |m: f64| 2.0 * PI * m / g.period();
    let a = Field::from_fn(g, |x| (w(20.0) * x).cos());
    let b = Field::from_fn(g, |x| (w(9.0) * x).cos());
    let p = dealiased_product(&[(&a, 1), (&b, 1)], PadRule::Exact).unwrap();
    let expect = Field::from_fn(g, |x| 0.5 * ((w(11.0) * x).cos() + (w(29.0) * x).cos()));
    assert!(p.max_diff(&expect) < 1e-13);
}

#[test]
fn power_matches_fine_grid() {
    // Band-limited data: the dealiased cube equals the cube sampled on an
    // 8x finer grid, truncated back.
    let g = SpectralGrid::standard(64).unwrap();
    let fine = g.with_points(512).unwrap();
    let f = |x: f64| (2.0 * PI * 13.0 * x / g.period()).sin() + 0.5 * (2.0 * PI * 30.0 * x / g.period()).cos();
    let coarse = dealiased_power(&Field::from_fn(g, f), 3).unwrap();
    let cube = Field::from_fn(fine, |x| f(x).powi(3));
    let c_fine = forward_transform(&cube);
    let c_coarse = forward_transform(&coarse);
    for m in -31i64..=31 {
        let a = c_coarse.mode(m).unwrap();
        let b = c_fine.mode(m).unwrap();
        assert!((a - b).norm() < 1e-13, "mode {m}");
    }
}

#[test]
fn block_energy_of_a_mode_in_one_annulus() {
    let g = SpectralGrid::standard(256).unwrap();
    // ξ = 1.5 lies where only blocks 0 and 1 are nonzero.
    let f = Field::from_fn(g, |x| (1.5 * x).cos());
    let range = BlockRange::for_grid(&g);
    for (j, e) in block_energies(&f, 0.0, &range) {
        if j != 0 && j != 1 {
            assert!(e < 1e-13 * f.norm_l2(), "block {j} carries {e}");
        }
    }
    let sum = block(0, &f).lin_comb(1.0, &block(1, &f), 1.0).unwrap();
    assert!(sum.max_diff(&f) < 1e-13);
}

fn trapezoid(v: &[f64], dt: f64, p: f64) -> f64 {
    let n = v.len();
    let s: f64 = v
        .iter()
        .enumerate()
        .map(|(i, a)| if i == 0 || i == n - 1 { 0.5 * dt * a.powf(p) } else { dt * a.powf(p) })
        .sum();
    s.powf(1.0 / p)
}

#[test]
fn separable_mixed_norms() {
    let g = SpectralGrid::new(32, 4.0).unwrap();
    let a = |x: f64| 1.0 + (x * PI / 2.0).sin().powi(2);
    let b = |t: f64| 0.5 + t * t;
    let u = Trajectory::sample(0.0, 1.0, 11, |t| Field::from_fn(g, |x| a(x) * b(t))).unwrap();
    let ax: Vec<f64> = (0..g.n()).map(|i| a(g.x(i))).collect();
    let bt: Vec<f64> = (0..11).map(|m| b(m as f64 * 0.1)).collect();
    let lp_x = |p: f64| (ax.iter().map(|v| v.powf(p)).sum::<f64>() * g.dx()).powf(1.0 / p);
    for (p, q) in [(1.0, 2.0), (4.0, 3.0), (2.0, 2.0)] {
        let expect = lp_x(p) * trapezoid(&bt, 0.1, q);
        assert!((mixed_norm_xt(&u, p, q).unwrap() - expect).abs() < 1e-12 * expect);
        assert!((mixed_norm_tx(&u, q, p).unwrap() - expect).abs() < 1e-12 * expect);
    }
    let sup = mixed_norm_xt(&u, 2.0, f64::INFINITY).unwrap();
    assert!((sup - lp_x(2.0) * 1.5).abs() < 1e-12);
}

#[test]
fn mixed_norm_double_sum() {
    // Non-separable data against a direct double loop.
    let g = SpectralGrid::new(16, 1.0).unwrap();
    let u = Trajectory::sample(0.0, 0.5, 6, |t| Field::from_fn(g, |x| (x + t).sin() + 2.0 * t)).unwrap();
    let (p, q) = (3.0, 1.5);
    let mut outer = 0.0;
    for i in 0..g.n() {
        let col: Vec<f64> = u.frames().iter().map(|f| f.values()[i].norm()).collect();
        outer += g.dx() * trapezoid(&col, u.dt(), q).powf(p);
    }
    let expect = outer.powf(1.0 / p);
    assert!((mixed_norm_xt(&u, p, q).unwrap() - expect).abs() < 1e-13 * expect);
}

/// Constant forcing `cos(ξ₀x)`: each mode integrates to `(1 - e^{-iωt})/(iω)`.
fn duhamel_error(nodes: usize) -> f64 {
    let g = SpectralGrid::standard(64).unwrap();
    let xi = 2.0 * PI * 64.0 / g.period() * 0.25;
    let phi = Field::from_fn(g, |x| (xi * x).cos());
    let f = Trajectory::sample(0.0, 1.0, nodes, |_| phi.clone()).unwrap();
    let out = duhamel(&f).unwrap();
    let omega = xi * xi;
    let i = Complex64::new(0.0, 1.0);
    let mut err = 0.0f64;
    for (m, fr) in out.frames().iter().enumerate() {
        let t = out.time(m);
        let factor = (1.0 - (-i * omega * t).exp()) / (i * omega);
        let expect = Field::from_complex_fn(g, |x| {
            0.5 * (factor * (i * xi * x).exp() + factor.conj() * (-i * xi * x).exp())
        });
        err = err.max(fr.max_diff(&expect));
    }
    err
}

#[test]
fn duhamel_of_constant_forcing() {
    let coarse = duhamel_error(51);
    let fine = duhamel_error(101);
    assert!(fine < 1e-5, "{fine}");
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.1, "{order}");
}

/// Largest pointwise residual of the equation along a computed solution,
/// relative to `max|H∂_x²u|`. Central difference in time, spectral in space.
fn equation_residual(dt: f64) -> f64 {
    let g = SpectralGrid::standard(1024).unwrap();
    let u0 = standard_bump(g, 0.8);
    let steps = (0.04 / dt).round() as usize;
    let ev = solve_gbo(&u0, &SolverConfig::new(4, dt, steps)).unwrap();
    let frames = ev.trajectory.frames();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for m in 1..frames.len() - 1 {
        let u = &frames[m];
        let hxx = hilbert(&derivative(&derivative(u)));
        let ux = derivative(u);
        for x in 0..g.n() {
            let ut = (frames[m + 1].values()[x] - frames[m - 1].values()[x]) / (2.0 * dt);
            let v = u.values()[x];
            let r = ut + hxx.values()[x] + v.powi(4) * ux.values()[x];
            worst = worst.max(r.norm());
            scale = scale.max(hxx.values()[x].norm());
        }
    }
    worst / scale
}

#[test]
fn solution_satisfies_the_equation() {
    let coarse = equation_residual(1e-3);
    let fine = equation_residual(5e-4);
    assert!(fine < 1e-5, "{fine}");
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.2, "{order}");
}

#[test]
fn snapshot_files_round_trip() {
    let g = SpectralGrid::standard(64).unwrap();
    let f = standard_bump(g, 1.5);
    let mut buf = Vec::new();
    write_field(&mut buf, &f).unwrap();
    let back = read_field(&mut buf.as_slice()).unwrap();
    assert_eq!(back, f);

    let u = Trajectory::sample(0.5, 1.0, 4, |t| f.scale(t)).unwrap();
    let mut buf = Vec::new();
    write_trajectory(&mut buf, &u).unwrap();
    let back = read_trajectory(&mut buf.as_slice()).unwrap();
    assert_eq!(back, u);
}

#[test]
fn critical_scaling_exponent_vanishes() {
    for k in 3..=8 {
        let sk = 0.5 - 1.0 / k as f64;
        assert!(scaling_exponent(sk, k).abs() < 1e-15);
        assert!((scaling_exponent(0.0, k) - (1.0 / k as f64 - 0.5)).abs() < 1e-15);
    }
}

#[test]
fn admissible_triples() {
    assert!(is_admissible(AdmissibleTriple::new(0.5, f64::INFINITY, 2.0)));
    assert!(is_admissible(AdmissibleTriple::new(-0.25, 4.0, f64::INFINITY)));
    assert!(!is_admissible(AdmissibleTriple::new(0.3, 4.0, 2.0)));
}
