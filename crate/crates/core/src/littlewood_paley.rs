//! Dyadic frequency blocks and the paraproduct splitting of `∂_x(u^{k+1})`.
//!
//! Conventions, fixed crate-wide for a [`BlockRange`] with gap `J` and
//! half-width `Jsim`:
//!
//! * `Q_{≪j} = Σ_{r < j-J} Q_r`
//! * `Q_{∼j} = Σ_{|r-j| ≤ Jsim} Q_r`
//! * `Q_{≲j} = Σ_{r ≤ j+Jsim} Q_r`
//!
//! Partial sums `Q_{<r}` are evaluated through the telescoped symbol
//! `χ(2^{1-r}|ξ|)`, which equals `Σ_{j<r} η(2^{-j}ξ)` exactly for `ξ ≠ 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{dealias::product_coeffs, forward_transform, Field, PadRule, SpectralField, SpectralGrid};
use crate::trajectory::Trajectory;
use crate::util::ordered_map;

/// The smooth bump `η` and its cutoff `χ`.
///
/// `χ(r) = φ(2-r) / (φ(2-r) + φ(r-1))` with `φ(x) = e^{-1/x}` for `x > 0`,
/// so `χ = 1` on `r ≤ 1` and `χ = 0` on `r ≥ 2`. Then `η(ξ) = χ(|ξ|) - χ(2|ξ|)`
/// is supported in `1/2 ≤ |ξ| ≤ 2` and its dyadic dilates telescope to 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct DyadicBump;

#[inline]
fn glue(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl DyadicBump {
    #[inline]
    pub fn cutoff(r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let a = glue(2.0 - r);
            let b = glue(r - 1.0);
            a / (a + b)
        }
    }

    #[inline]
    pub fn eval(xi: f64) -> f64 {
        let a = xi.abs();
        Self::cutoff(a) - Self::cutoff(2.0 * a)
    }

    /// `η(2^{-j} ξ)`.
    #[inline]
    pub fn block_symbol(j: i32, xi: f64) -> f64 {
        Self::eval(xi * 2f64.powi(-j))
    }

    /// Symbol of `Q_{<r}`: `χ(2^{1-r}|ξ|)` off zero, 0 at zero.
    #[inline]
    pub fn below_symbol(r: i32, xi: f64) -> f64 {
        if xi == 0.0 {
            0.0
        } else {
            Self::cutoff(xi.abs() * 2f64.powi(1 - r))
        }
    }

    /// Low-pass symbol `p(ξ) = Σ_{j ≤ -3} η(2^{-j}ξ)`, extended by 1 at `ξ = 0`.
    #[inline]
    pub fn lowpass_symbol(xi: f64) -> f64 {
        Self::cutoff(8.0 * xi.abs())
    }
}

/// Dyadic indices resolvable on a grid plus the grouping conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRange {
    pub jmin: i32,
    pub jmax: i32,
    /// `J`: "≪ j" means `< j - J`.
    pub gap: i32,
    /// `Jsim`: "∼ j" means `|r - j| ≤ Jsim`.
    pub sim: i32,
}

impl BlockRange {
    pub const DEFAULT_GAP: i32 = 3;
    pub const DEFAULT_SIM: i32 = 2;

    pub fn for_grid(grid: &SpectralGrid) -> Self {
        Self::with_params(grid, Self::DEFAULT_GAP, Self::DEFAULT_SIM)
    }

    /// Smallest and largest `j` whose block meets a nonzero grid wavenumber.
    pub fn with_params(grid: &SpectralGrid, gap: i32, sim: i32) -> Self {
        let lo = grid.min_wavenumber();
        let hi = grid.max_wavenumber();
        // A block j is live iff 2^{j-1} < |ξ| < 2^{j+1} for some grid ξ.
        let mut jmin = (lo.log2() - 1.0).floor() as i32 - 1;
        while DyadicBump::block_symbol(jmin, lo) == 0.0 {
            jmin += 1;
        }
        let mut jmax = (hi.log2() + 1.0).ceil() as i32 + 1;
        while DyadicBump::block_symbol(jmax, hi) == 0.0 && jmax > jmin {
            jmax -= 1;
        }
        Self { jmin, jmax, gap, sim }
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> + Clone {
        self.jmin..=self.jmax
    }

    pub fn len(&self) -> usize {
        (self.jmax - self.jmin + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Multiply coefficients by a real even symbol.
pub(crate) fn filter(c: &SpectralField, symbol: impl Fn(f64) -> f64) -> SpectralField {
    let grid = *c.grid();
    let coeffs = c.coeffs().iter().enumerate().map(|(i, a)| a * symbol(grid.wavenumber(i))).collect();
    SpectralField::from_parts(grid, coeffs, c.parity())
}

fn filter_field(f: &Field, symbol: impl Fn(f64) -> f64) -> Field {
    filter(&forward_transform(f), symbol).inverse()
}

/// `Q_j f`.
pub fn block(j: i32, f: &Field) -> Field {
    filter_field(f, |xi| DyadicBump::block_symbol(j, xi))
}

/// `Q_{<r} f`.
pub fn block_below(r: i32, f: &Field) -> Field {
    filter_field(f, |xi| DyadicBump::below_symbol(r, xi))
}

/// `Q_{≪j} f`.
pub fn block_ll(j: i32, f: &Field, range: &BlockRange) -> Field {
    block_below(j - range.gap, f)
}

/// `Q_{∼j} f`.
pub fn block_sim(j: i32, f: &Field, range: &BlockRange) -> Field {
    filter_field(f, |xi| sim_symbol(j, range.sim, xi))
}

/// `Q_{≲j} f`.
pub fn block_leq(j: i32, f: &Field, range: &BlockRange) -> Field {
    block_below(j + range.sim + 1, f)
}

/// `p(D) f`; passes the mean.
pub fn lowpass(f: &Field) -> Field {
    filter_field(f, DyadicBump::lowpass_symbol)
}

fn sim_symbol(j: i32, sim: i32, xi: f64) -> f64 {
    ((j - sim)..=(j + sim)).map(|r| DyadicBump::block_symbol(r, xi)).sum()
}

/// `(j, 2^{js} ‖Q_j f‖_{L²})` for every resolvable `j`.
pub fn block_energies(f: &Field, s: f64, range: &BlockRange) -> Vec<(i32, f64)> {
    let c = forward_transform(f);
    range
        .indices()
        .map(|j| {
            let q = filter(&c, |xi| DyadicBump::block_symbol(j, xi));
            // Parseval under the crate normalization: ‖f‖² = L Σ|c|².
            let e = (q.coeffs().iter().map(|a| a.norm_sqr()).sum::<f64>() * c.grid().period()).sqrt();
            (j, 2f64.powf(j as f64 * s) * e)
        })
        .collect()
}

/// Spectral `i ξ η(2^{-j}ξ)` applied to a coefficient vector, accumulated.
fn accumulate_dx_block(acc: &mut [Complex64], grid: &SpectralGrid, j: i32, coeffs: &[Complex64], sign: f64) {
    let nyq = grid.nyquist_index();
    for (i, (a, c)) in acc.iter_mut().zip(coeffs).enumerate() {
        if i == nyq {
            continue; // ∂_x is odd: Nyquist mode is annihilated.
        }
        let xi = grid.wavenumber(i);
        let w = DyadicBump::block_symbol(j, xi);
        if w != 0.0 {
            *a += Complex64::new(0.0, sign * xi * w) * c;
        }
    }
}

fn is_zero(c: &[Complex64]) -> bool {
    c.iter().all(|a| a.re == 0.0 && a.im == 0.0)
}

/// Per-`j` inner products `(Q_{≪j}f)^k Q_{∼j}g`, already dealiased, or `None`
/// when one factor vanishes identically.
fn paraproduct_inner(
    cf: &SpectralField,
    cg: &SpectralField,
    k: u32,
    range: &BlockRange,
) -> Vec<(i32, Option<Vec<Complex64>>)> {
    let grid = *cf.grid();
    ordered_map(range.indices().collect(), |j| {
        let low = filter(cf, |xi| DyadicBump::below_symbol(j - range.gap, xi));
        if is_zero(low.coeffs()) {
            return (j, None);
        }
        let mid = filter(cg, |xi| sim_symbol(j, range.sim, xi));
        if is_zero(mid.coeffs()) {
            return (j, None);
        }
        let prod = product_coeffs(&grid, &[low.coeffs(), mid.coeffs()], &[k, 1], PadRule::Exact);
        (j, Some(prod))
    })
}

fn check_pair(f: &Field, g: &Field, k: u32) -> Result<()> {
    f.grid().check_same(g.grid())?;
    if k == 0 {
        return Err(Error::domain("paraproduct degree k must be positive"));
    }
    Ok(())
}

/// `π(f, g) = Σ_j ∂_x Q_j((Q_{≪j}f)^k Q_{∼j}g)` over the resolvable `j`.
pub fn paraproduct(f: &Field, g: &Field, k: u32, range: &BlockRange) -> Result<Field> {
    check_pair(f, g, k)?;
    let grid = *f.grid();
    let cf = forward_transform(f);
    let cg = forward_transform(g);
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n()];
    for (j, term) in paraproduct_inner(&cf, &cg, k, range) {
        if let Some(t) = term {
            accumulate_dx_block(&mut acc, &grid, j, &t, 1.0);
        }
    }
    let parity = f.parity().join(g.parity());
    Ok(SpectralField::from_parts(grid, acc, parity).inverse())
}

/// `g = Σ_j g_j` with `g_j = ∂_xQ_j((Q_{≪j}u)^kQ_{∼j}u) - ∂_xQ_j(u^{k+1})`,
/// so that `π(u,u) - g = ∂_x(u^{k+1})`.
pub fn remainder(u: &Field, k: u32, range: &BlockRange) -> Result<Field> {
    check_pair(u, u, k)?;
    let grid = *u.grid();
    let cu = forward_transform(u);
    let power = product_coeffs(&grid, &[cu.coeffs()], &[k + 1], PadRule::Exact);
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n()];
    for (j, term) in paraproduct_inner(&cu, &cu, k, range) {
        if let Some(t) = term {
            accumulate_dx_block(&mut acc, &grid, j, &t, 1.0);
        }
        accumulate_dx_block(&mut acc, &grid, j, &power, -1.0);
    }
    Ok(SpectralField::from_parts(grid, acc, u.parity()).inverse())
}

/// `Σ_{r=r_lo}^{r_hi} [(Q_{<r+1}u)^{k+1} - (Q_{<r}u)^{k+1}]`, term by term.
pub fn telescoping_sum(u: &Field, k: u32, r_lo: i32, r_hi: i32) -> Result<Field> {
    let grid = *u.grid();
    let cu = forward_transform(u);
    let power_below = |r: i32| {
        let c = filter(&cu, |xi| DyadicBump::below_symbol(r, xi));
        product_coeffs(&grid, &[c.coeffs()], &[k + 1], PadRule::Exact)
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n()];
    let mut prev = power_below(r_lo);
    for r in r_lo..=r_hi {
        let next = power_below(r + 1);
        for ((a, n), p) in acc.iter_mut().zip(&next).zip(&prev) {
            *a += n - p;
        }
        prev = next;
    }
    Ok(SpectralField::from_parts(grid, acc, u.parity()).inverse())
}

/// `f = π(u_L, u) - π(u, u) + g(u)` node by node.
pub fn rhs_f(u_lin: &Trajectory, u: &Trajectory, k: u32, range: &BlockRange) -> Result<Trajectory> {
    u_lin.check_compatible(u)?;
    let frames = ordered_map(u_lin.frames().iter().zip(u.frames()).collect(), |(ul, uu)| {
        let a = paraproduct(ul, uu, k, range)?;
        let b = paraproduct(uu, uu, k, range)?;
        let g = remainder(uu, k, range)?;
        Ok::<_, Error>(&(&a - &b) + &g)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Trajectory::new(u.t0(), u.dt(), frames)
}

/// `Σ_j ‖Q_j f‖²_{L²}`.
pub fn block_energy_sum(f: &Field, range: &BlockRange) -> f64 {
    block_energies(f, 0.0, range).iter().map(|(_, e)| e * e).sum()
}
