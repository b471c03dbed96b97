//! Mean-field picture: fixed points of the coherent-state flow and the
//! classical Hamiltonian on phase space.
//!
//! Replacing `a → α` in the Heisenberg equation of `⟨a⟩` and factorizing
//! gives
//!
//! ```text
//! dα/dt = −i (K|α|²α − Δα + Λ1 + Λ2 α* + 2Λ3 |α|² + Λ3* α²) − (κ1/2) α − κ2 |α|² α
//! ```
//!
//! where the bracket is `∂H/∂α*` with `H` evaluated on `a → α, a† → α*`.

use crate::phase_space::{GridValues, PhaseGrid};
use crate::{PhysicalParams, C64};
use serde::Serialize;

/// Newton iterations per start.
const NEWTON_STEPS: usize = 200;
/// Accepted flow residual.
const FLOW_TOL: f64 = 1e-10;
/// Distance below which two roots are the same.
const DEDUP_TOL: f64 = 1e-8;

/// Stationary mean-field amplitudes.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalFixedPoints {
    pub amplitudes: Vec<C64>,
    /// True when both linearization eigenvalues have negative real part.
    pub stable: Vec<bool>,
    /// `|f(α)|` at each root.
    pub residuals: Vec<f64>,
    /// Newton starts that failed to converge.
    pub failed_starts: usize,
}

impl ClassicalFixedPoints {
    /// Stable amplitudes only.
    pub fn stable_amplitudes(&self) -> Vec<C64> {
        self.amplitudes.iter().zip(&self.stable).filter(|(_, &s)| s).map(|(a, _)| *a).collect()
    }
}

/// Mean-field flow `f(α)`.
pub fn flow(p: &PhysicalParams, a: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let n = a.norm_sqr();
    let grad = a * (p.kerr * n) - a * p.detuning
        + p.drive_linear
        + p.drive_pair * a.conj()
        + p.drive_cubic * (2.0 * n)
        + p.drive_cubic.conj() * a * a;
    -i * grad - a * (0.5 * p.loss_single) - a * (p.loss_pair * n)
}

/// `(∂f/∂α, ∂f/∂α*)`.
fn flow_derivatives(p: &PhysicalParams, a: C64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    let n = a.norm_sqr();
    let da = -i
        * (C64::new(2.0 * p.kerr * n - p.detuning, 0.0)
            + p.drive_cubic * a.conj() * 2.0
            + p.drive_cubic.conj() * a * 2.0)
        - 0.5 * p.loss_single
        - 2.0 * p.loss_pair * n;
    let dac = -i * (a * a * p.kerr + p.drive_pair + p.drive_cubic * a * 2.0) - a * a * p.loss_pair;
    (da, dac)
}

/// Real 2×2 Jacobian in (Re α, Im α).
fn jacobian(p: &PhysicalParams, a: C64) -> [[f64; 2]; 2] {
    let (da, dac) = flow_derivatives(p, a);
    let dx = da + dac;
    let dy = C64::new(0.0, 1.0) * (da - dac);
    [[dx.re, dy.re], [dx.im, dy.im]]
}

fn newton(p: &PhysicalParams, start: C64, radius: f64) -> Option<C64> {
    let mut a = start;
    for _ in 0..NEWTON_STEPS {
        let f = flow(p, a);
        let j = jacobian(p, a);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let sx = (j[1][1] * f.re - j[0][1] * f.im) / det;
        let sy = (-j[1][0] * f.re + j[0][0] * f.im) / det;
        let mut step = C64::new(sx, sy);
        // Damp steps that leave the search region by a wide margin.
        let cap = radius.max(1.0);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        a -= step;
        if !a.re.is_finite() || a.norm() > 1e3 * cap {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + a.norm()) {
            break;
        }
    }
    (flow(p, a).norm() < FLOW_TOL).then_some(a)
}

/// Search radius for the starting grid.
fn search_radius(p: &PhysicalParams) -> f64 {
    let kt = p.kerr_eff().norm();
    let pair = if kt > 0.0 { (p.drive_pair.norm() / kt).sqrt() } else { 0.0 };
    2.0 * (pair + p.drive_linear.norm().cbrt() + 1.0)
}

/// All roots of the mean-field flow reached by Newton from a 9×9 grid of starts
/// over `|α| ≤ R`, deduplicated, with their stability.
pub fn semiclassical_fixed_points(p: &PhysicalParams) -> ClassicalFixedPoints {
    let r = search_radius(p);
    let mut roots: Vec<C64> = Vec::new();
    let mut failed = 0;
    for iy in 0..9 {
        for ix in 0..9 {
            let start = C64::new(-r + ix as f64 * r / 4.0, -r + iy as f64 * r / 4.0);
            match newton(p, start, r) {
                Some(a) => {
                    if !roots.iter().any(|b| (a - b).norm() < DEDUP_TOL * (1.0 + a.norm())) {
                        roots.push(a);
                    }
                }
                None => failed += 1,
            }
        }
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let stable = roots
        .iter()
        .map(|&a| {
            let j = jacobian(p, a);
            let tr = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            tr < 0.0 && det > 0.0
        })
        .collect();
    let residuals = roots.iter().map(|&a| flow(p, a).norm()).collect();
    ClassicalFixedPoints { amplitudes: roots, stable, residuals, failed_starts: failed }
}

/// Classical Hamiltonian `H(a → z, a† → z*)` on the grid.
pub fn metapotential(p: &PhysicalParams, grid: &PhaseGrid) -> PhaseGrid {
    let values = grid
        .points()
        .iter()
        .map(|&z| {
            let n = z.norm_sqr();
            let drive = p.drive_linear * z.conj()
                + p.drive_pair * 0.5 * z.conj() * z.conj()
                + p.drive_cubic * z.conj() * z.conj() * z;
            0.5 * p.kerr * n * n - p.detuning * n + 2.0 * drive.re
        })
        .collect();
    PhaseGrid { values: GridValues::Real(values), ..grid.clone() }
}
