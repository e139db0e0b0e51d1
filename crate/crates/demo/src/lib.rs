//! Three laboratory operations exposed to the browser. Each has a plain Rust
//! version in [`api`] and a thin `wasm_bindgen` wrapper.

use wasm_bindgen::prelude::*;

pub mod api {
    use gbo_core::evolution::{solve_gbo, SolverConfig};
    use gbo_core::lab::data::standard_bump;
    use gbo_core::lab::{scaling_check, PacketSampler, SamplerConfig, ScalingFamily};
    use gbo_core::littlewood_paley::{block_energies, BlockRange};
    use gbo_core::SpectralGrid;

    fn grid(n: usize) -> Result<SpectralGrid, String> {
        SpectralGrid::standard(n).map_err(|e| e.to_string())
    }

    /// Seeded packet data: `[x_0.., u_0..]`, then `[j, ‖Q_j u‖_{Ḣ^s}]` pairs.
    pub fn lp_energies(n: usize, seed: u64, s: f64) -> Result<(Vec<f64>, Vec<f64>), String> {
        let g = grid(n)?;
        let u = PacketSampler::new(seed, SamplerConfig::default()).unit_field(g);
        let mut samples: Vec<f64> = (0..n).map(|i| g.x(i)).collect();
        samples.extend(u.re());
        let energies = block_energies(&u, s, &BlockRange::for_grid(&g))
            .into_iter()
            .flat_map(|(j, e)| [j as f64, e])
            .collect();
        Ok((samples, energies))
    }

    /// Evolve the odd bump of peak `amp` to `horizon`; returns `frames`
    /// snapshots of `n` samples each, row-major.
    pub fn evolve_bump(n: usize, k: u32, amp: f64, horizon: f64, frames: usize) -> Result<Vec<f64>, String> {
        if frames < 2 {
            return Err("need at least two frames".into());
        }
        let g = grid(n)?;
        let dt = 0.01f64.min(horizon / 100.0);
        let steps = (horizon / dt).ceil() as usize;
        let stride = (steps / (frames - 1)).max(1);
        let cfg = SolverConfig::new(k, horizon / steps as f64, stride * (frames - 1)).with_stride(stride);
        let ev = solve_gbo(&standard_bump(g, amp), &cfg).map_err(|e| e.to_string())?;
        Ok(ev.trajectory.frames().iter().flat_map(|f| f.re()).collect())
    }

    /// `‖u_λ‖_{Ḣ^s} / ‖u‖_{Ḣ^s}` and the predicted `λ^{s+1/k-1/2}`.
    pub fn scaling_ratio(n: usize, seed: u64, k: u32, s: f64, lambda: f64) -> Result<(f64, f64), String> {
        let g = grid(n)?;
        let base = PacketSampler::new(seed, SamplerConfig::default()).unit_field(g);
        let fam = ScalingFamily::new(base, vec![lambda], k).map_err(|e| e.to_string())?;
        let rep = scaling_check(&fam, s, None).map_err(|e| e.to_string())?;
        let row = rep.rows[0];
        Ok((row.ratio, row.expected))
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Flat array: `n` positions, `n` samples, then `(j, energy)` pairs.
#[wasm_bindgen]
pub fn lp_energies(n: usize, seed: u64, s: f64) -> Result<Vec<f64>, JsError> {
    let (mut samples, energies) = api::lp_energies(n, seed, s).map_err(js)?;
    samples.extend(energies);
    Ok(samples)
}

#[wasm_bindgen]
pub fn evolve_bump(n: usize, k: u32, amp: f64, horizon: f64, frames: usize) -> Result<Vec<f64>, JsError> {
    api::evolve_bump(n, k, amp, horizon, frames).map_err(js)
}

/// `[measured, predicted]`.
#[wasm_bindgen]
pub fn scaling_ratio(n: usize, seed: u64, k: u32, s: f64, lambda: f64) -> Result<Vec<f64>, JsError> {
    let (a, b) = api::scaling_ratio(n, seed, k, s, lambda).map_err(js)?;
    Ok(vec![a, b])
}
