use crate::error::{Error, Result};
use crate::spectral::{Field, SpectralGrid};

/// Fields on a uniform time grid `t_m = t0 + m·dt`, `dt > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: SpectralGrid,
    t0: f64,
    dt: f64,
    frames: Vec<Field>,
}

impl Trajectory {
    pub fn new(t0: f64, dt: f64, frames: Vec<Field>) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::structural("trajectory needs at least one frame"));
        };
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::structural(format!("time step must be positive, got {dt}")));
        }
        let grid = *first.grid();
        for f in &frames {
            grid.check_same(f.grid())?;
        }
        Ok(Self { grid, t0, dt, frames })
    }

    /// Sample `f(t)` at `nodes` uniform nodes covering `[t0, t0 + T]`.
    pub fn sample(t0: f64, horizon: f64, nodes: usize, f: impl Fn(f64) -> Field) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::structural("need at least two time nodes"));
        }
        let dt = horizon / (nodes - 1) as f64;
        Self::new(t0, dt, (0..nodes).map(|m| f(t0 + m as f64 * dt)).collect())
    }

    #[inline]
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn frames(&self) -> &[Field] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Field> {
        self.frames
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    #[inline]
    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.time(m)).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.dt * (self.len() - 1) as f64
    }

    pub fn last(&self) -> &Field {
        self.frames.last().expect("trajectory is never empty")
    }

    /// Same time grid and spatial grid.
    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        let tol = 1e-12 * self.dt.abs().max(1.0);
        if self.len() != other.len() || (self.t0 - other.t0).abs() > tol || (self.dt - other.dt).abs() > tol {
            return Err(Error::structural(format!(
                "time grids differ: ({}, {}, {}) vs ({}, {}, {})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.len()
            )));
        }
        Ok(())
    }

    /// Apply `f` frame by frame.
    pub fn map(&self, f: impl Fn(&Field) -> Field) -> Trajectory {
        Trajectory { grid: self.grid, t0: self.t0, dt: self.dt, frames: self.frames.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Field) -> Result<Field>) -> Result<Trajectory> {
        let frames = self.frames.iter().map(f).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.t0, self.dt, frames)
    }

    /// Frame-wise `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Trajectory, b: f64) -> Result<Trajectory> {
        self.check_compatible(other)?;
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(x, y)| x.lin_comb(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.t0, self.dt, frames)
    }

    /// `sup_t ‖u(t) - v(t)‖_{L²}`.
    pub fn sup_l2_distance(&self, other: &Trajectory) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.frames.iter().zip(&other.frames).map(|(a, b)| a.l2_distance(b)).fold(0.0, f64::max))
    }

    /// `sup_t ‖u(t)‖_{L²}`.
    pub fn sup_l2(&self) -> f64 {
        self.frames.iter().map(Field::norm_l2).fold(0.0, f64::max)
    }

    /// Every `stride`-th frame.
    pub fn subsample(&self, stride: usize) -> Result<Trajectory> {
        if stride == 0 {
            return Err(Error::structural("stride must be positive"));
        }
        let frames = self.frames.iter().step_by(stride).cloned().collect();
        Trajectory::new(self.t0, self.dt * stride as f64, frames)
    }
}
