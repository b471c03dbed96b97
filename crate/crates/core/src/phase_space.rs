//! Wigner and Husimi functions on uniform rectangular grids.
//!
//! Convention: `z = x + iy` and `d²z = dx dy`. Dark states are evaluated
//! through their lab-frame collective-mode amplitudes, so the displacement
//! carried by a cubic drive is already folded in.

use crate::cqa::{AmplitudeCache, DarkState};
use crate::density::TruncatedDensityMatrix;
use crate::{KerrError, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_PI, SQRT_2};
use std::io::Write;

/// Largest population tolerated in the top levels of a matrix handed to
/// [`wigner_numeric`].
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Sampled values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridValues {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

/// Uniform grid over `[x_min, x_max] × [y_min, y_max]` with `nx × ny` points.
///
/// Values are stored row-major in y then x: index `iy * nx + ix`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: GridValues,
}

impl PhaseGrid {
    /// Empty grid (real zeros). Needs at least two points per axis and a
    /// positive extent.
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || y_max <= y_min {
            return Err(KerrError::Config(format!(
                "grid bounds must be finite with min < max, got x [{x_min}, {x_max}], y [{y_min}, {y_max}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(KerrError::Config(format!("grid needs nx, ny >= 2, got {nx} x {ny}")));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny, values: GridValues::Real(vec![0.0; nx * ny]) })
    }

    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    /// Square grid wide enough for a dark state: half-width `2(|ε|+|α|) + 4`
    /// in the displaced frame, plus the displacement itself.
    pub fn covering(state: &DarkState, n: usize) -> Result<Self> {
        let half = 2.0 * (state.gauge.norm() + state.displacement.norm()) + 4.0;
        Self::square(half, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    /// Grid point `z = x + iy` for column `ix`, row `iy`.
    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        C64::new(self.x_min + ix as f64 * self.dx(), self.y_min + iy as f64 * self.dy())
    }

    /// All points in storage order.
    pub fn points(&self) -> Vec<C64> {
        (0..self.ny).flat_map(|iy| (0..self.nx).map(move |ix| (ix, iy))).map(|(ix, iy)| self.point(ix, iy)).collect()
    }

    /// Trapezoid weights; they sum to the grid area.
    pub fn weights(&self) -> Vec<f64> {
        let edge = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let cell = self.dx() * self.dy();
        (0..self.ny).flat_map(|iy| (0..self.nx).map(move |ix| edge(ix, self.nx) * edge(iy, self.ny) * cell)).collect()
    }

    /// Trapezoid-rule integral of the stored values.
    pub fn integral(&self) -> C64 {
        let w = self.weights();
        match &self.values {
            GridValues::Real(v) => C64::new(v.iter().zip(&w).map(|(a, b)| a * b).sum(), 0.0),
            GridValues::Complex(v) => v.iter().zip(&w).map(|(a, b)| a * b).sum(),
        }
    }

    /// Real values, if the grid holds real data.
    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.values {
            GridValues::Real(v) => Some(v),
            GridValues::Complex(_) => None,
        }
    }

    /// Smallest real part over the grid.
    pub fn min_value(&self) -> f64 {
        match &self.values {
            GridValues::Real(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
            GridValues::Complex(v) => v.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
        }
    }

    /// Value at `(ix, iy)` (real part for complex grids).
    pub fn value(&self, ix: usize, iy: usize) -> C64 {
        let k = iy * self.nx + ix;
        match &self.values {
            GridValues::Real(v) => C64::new(v[k], 0.0),
            GridValues::Complex(v) => v[k],
        }
    }

    fn with_real(&self, f: impl Fn(C64) -> f64 + Sync + Send) -> Self {
        let vals = self.points().into_par_iter().map(f).collect();
        Self { values: GridValues::Real(vals), ..self.clone() }
    }

    fn with_complex(&self, f: impl Fn(C64) -> C64 + Sync + Send) -> Self {
        let vals = self.points().into_par_iter().map(f).collect();
        Self { values: GridValues::Complex(vals), ..self.clone() }
    }

    /// Text export: a `#` header with the bounds and sizes, optional extra
    /// comment lines, then one `x y value` (or `x y re im`) row per point.
    pub fn write_text<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        writeln!(out, "# {} {} {} {} {} {}", self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny)?;
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.point(ix, iy);
                let k = iy * self.nx + ix;
                match &self.values {
                    GridValues::Real(v) => writeln!(out, "{:.17e} {:.17e} {:.17e}", z.re, z.im, v[k])?,
                    GridValues::Complex(v) => {
                        writeln!(out, "{:.17e} {:.17e} {:.17e} {:.17e}", z.re, z.im, v[k].re, v[k].im)?
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Σ a_l w^l / √l!`.
fn sb_eval(a: &[C64], w: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut pw = C64::new(1.0, 0.0);
    for (l, al) in a.iter().enumerate() {
        acc += al * pw;
        pw = pw * w / ((l + 1) as f64).sqrt();
    }
    acc
}

/// Husimi function of the collective-mode state:
/// `Q(z) = |ψ_SB(z*)|² e^{−|z|²} / (π N)`.
pub fn q_function(state: &DarkState, grid: &PhaseGrid) -> Result<PhaseGrid> {
    let cache = state.lab_amplitudes()?;
    Ok(q_from_cache(&cache, grid))
}

/// [`q_function`] for precomputed lab-frame amplitudes.
pub fn q_from_cache(cache: &AmplitudeCache, grid: &PhaseGrid) -> PhaseGrid {
    let a = cache.scaled();
    let n = cache.norm();
    grid.with_real(|z| FRAC_1_PI * sb_eval(a, z.conj()).norm_sqr() * (-z.norm_sqr()).exp() / n)
}

/// Wigner function of the physical mode:
/// `W(z) = 2 |ψ_SB(√2 z*)|² e^{−2|z|²} / (π N)`.
pub fn wigner_pure(state: &DarkState, grid: &PhaseGrid) -> Result<PhaseGrid> {
    let cache = state.lab_amplitudes()?;
    Ok(wigner_from_cache(&cache, grid))
}

/// [`wigner_pure`] for precomputed lab-frame amplitudes.
pub fn wigner_from_cache(cache: &AmplitudeCache, grid: &PhaseGrid) -> PhaseGrid {
    let a = cache.scaled();
    let n = cache.norm();
    grid.with_real(|z| 2.0 * FRAC_1_PI * sb_eval(a, z.conj() * SQRT_2).norm_sqr() * (-2.0 * z.norm_sqr()).exp() / n)
}

/// Wigner transform of the stationary mode built from two dark states, each
/// normalized: `W_12(z) = 2 ψ1(√2 z*) ψ2(√2 z*)* e^{−2|z|²} / (π √(N1 N2))`.
/// Its integral is `⟨ψ2|ψ1⟩`.
pub fn wigner_mode_pair(first: &DarkState, second: &DarkState, grid: &PhaseGrid) -> Result<PhaseGrid> {
    let c1 = first.lab_amplitudes()?;
    let c2 = second.lab_amplitudes()?;
    let scale = 2.0 * FRAC_1_PI / (c1.norm() * c2.norm()).sqrt();
    let (a1, a2) = (c1.scaled(), c2.scaled());
    Ok(grid.with_complex(|z| {
        let w = z.conj() * SQRT_2;
        sb_eval(a1, w) * sb_eval(a2, w).conj() * (-2.0 * z.norm_sqr()).exp() * scale
    }))
}

/// Displacement matrix elements `G[m][n] = ⟨m|D(β)|n⟩` for `m, n < dim`,
/// built column by column from `D|n⟩ = (c† − β*) D|n−1⟩ / √n`.
fn displacement_elements(beta: C64, dim: usize) -> Vec<Vec<C64>> {
    let mut g = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    // Column 0: coherent amplitudes e^{−|β|²/2} β^m / √m!.
    let mut v = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for (m, row) in g.iter_mut().enumerate() {
        row[0] = v;
        v = v * beta / ((m + 1) as f64).sqrt();
    }
    for n in 1..dim {
        let inv = 1.0 / (n as f64).sqrt();
        for m in 0..dim {
            let up = if m > 0 { g[m - 1][n - 1] * (m as f64).sqrt() } else { C64::new(0.0, 0.0) };
            g[m][n] = (up - beta.conj() * g[m][n - 1]) * inv;
        }
    }
    g
}

/// Wigner function of an arbitrary density matrix by displaced parity:
/// `W(z) = (2/π) Tr[D(2z) Π ρ]`.
///
/// Errors with `TruncationLoss` when the top five levels carry more than
/// [`BOUNDARY_TOL`] of the population.
pub fn wigner_numeric(rho: &TruncatedDensityMatrix, grid: &PhaseGrid) -> Result<PhaseGrid> {
    let pops = rho.populations();
    let dim = pops.len();
    let boundary: f64 = pops[dim.saturating_sub(5)..].iter().sum();
    if boundary > BOUNDARY_TOL {
        return Err(KerrError::TruncationLoss { loss: boundary });
    }
    let m = rho.matrix();
    Ok(grid.with_real(|z| {
        // The truncated displacement is accurate on the levels that hold
        // the state only if it is built on a larger space.
        let work = dim + 20 + (4.0 * z.norm_sqr()).ceil() as usize;
        let g = displacement_elements(z * 2.0, work);
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..dim {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..dim {
                acc += g[i][j] * m[(j, i)] * sign;
            }
        }
        2.0 * FRAC_1_PI * acc.re
    }))
}
