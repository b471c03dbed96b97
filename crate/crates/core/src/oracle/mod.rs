//! Brute-force cross-checks on a truncated Fock space: the Lindblad
//! superoperator, its steady state and slow spectrum, the mean-field fixed
//! points and the classical metapotential.
//!
//! Operators are vectorized row-major: `ρ_{mn}` sits at index `m·d + n`
//! with `d = cutoff + 1`. All operator products are normally ordered, so the
//! truncated generator preserves the trace exactly.

mod classical;
mod spectrum;

pub use crate::density::TruncatedDensityMatrix;
pub use classical::{metapotential, semiclassical_fixed_points, ClassicalFixedPoints};
pub use spectrum::{
    coherent_basis, mode_basis, projection_onto, slow_mode_projection, spectrum, Projection, SpectrumReport,
};

use crate::cqa::DarkState;
use crate::linalg::BandMatrix;
use crate::{KerrError, PhysicalParams, Result, C64};
use nalgebra::DMatrix;

/// Largest population allowed in the top five levels of an oracle result.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Residual bound for the steady state, relative to the largest generator entry.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Bound on `‖A⁻¹‖·max|A|` for the pinned system; beyond it the kernel is
/// treated as more than one-dimensional.
pub const DEGENERATE_CONDITION: f64 = 1e13;
/// Largest cutoff the adaptive driver will try.
pub const MAX_ORACLE_CUTOFF: usize = 160;

/// Sparse Lindblad generator in triplet form.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
    scale: f64,
    dissipative: bool,
}

impl Liouvillian {
    /// True when no entry links elements of different `(m mod 2, n mod 2)`
    /// class, so the even and odd blocks each conserve their own trace.
    pub fn conserves_parity(&self) -> bool {
        let d = self.dim;
        let class = |i: usize| ((i / d) % 2, (i % d) % 2);
        self.entries.iter().all(|&(i, j, _)| class(i) == class(j))
    }

    /// True when some loss channel is present.
    pub fn is_dissipative(&self) -> bool {
        self.dissipative
    }

    /// Number of Fock levels kept (cutoff + 1).
    pub fn levels(&self) -> usize {
        self.dim
    }

    /// Highest kept Fock level.
    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    /// Dimension of the vectorized operator space.
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    /// Nonzero entries `(row, column, value)`; duplicates are summed.
    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// Largest entry magnitude, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Index of `ρ_{mn}`.
    #[inline]
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.dim + n
    }

    /// Half-bandwidth of the generator in this ordering.
    pub fn bandwidth(&self) -> usize {
        2 * self.dim + 2
    }

    /// `𝓛ρ` for a vectorized operator.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.size()];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// `𝓛ρ` for a matrix.
    pub fn apply_matrix(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let y = self.apply(&vectorize(rho));
        unvectorize(&y, self.dim)
    }

    /// Banded copy, optionally with `shift` subtracted from the diagonal.
    pub fn to_band(&self, shift: C64) -> BandMatrix {
        let w = self.bandwidth();
        let mut b = BandMatrix::zeros(self.size(), w, w);
        for &(i, j, v) in &self.entries {
            b.add(i, j, v);
        }
        if shift != C64::new(0.0, 0.0) {
            b.shift_diagonal(shift);
        }
        b
    }

    /// Trace functional applied to each column: `Tr[𝓛(|j⟩)]`. Vanishes for a
    /// trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let mut col = vec![C64::new(0.0, 0.0); self.size()];
        for &(i, j, v) in &self.entries {
            if i / self.dim == i % self.dim {
                col[j] += v;
            }
        }
        col.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Row-major flattening.
pub fn vectorize(m: &DMatrix<C64>) -> Vec<C64> {
    let d = m.nrows();
    (0..d * d).map(|k| m[(k / d, k % d)]).collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize(x: &[C64], dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |m, n| x[m * dim + n])
}

/// Sparse truncated matrix of an operator, as `(row, column, value)`.
type Sparse = Vec<(usize, usize, C64)>;

fn hamiltonian(p: &PhysicalParams, dim: usize) -> Sparse {
    let mut h = Vec::new();
    for m in 0..dim {
        let mf = m as f64;
        h.push((m, m, C64::new(0.5 * p.kerr * mf * (mf - 1.0) - p.detuning * mf, 0.0)));
        if m + 1 < dim {
            // Λ1 a† + Λ3 a†a†a and their conjugates.
            let v = (p.drive_linear + p.drive_cubic * mf) * (mf + 1.0).sqrt();
            h.push((m + 1, m, v));
            h.push((m, m + 1, v.conj()));
        }
        if m + 2 < dim {
            let v = p.drive_pair * 0.5 * ((mf + 1.0) * (mf + 2.0)).sqrt();
            h.push((m + 2, m, v));
            h.push((m, m + 2, v.conj()));
        }
    }
    h
}

/// Build `𝓛ρ = −i[H, ρ] + κ1 𝒟[a]ρ + κ2 𝒟[a²]ρ` on levels `0..=cutoff`.
pub fn build_liouvillian(p: &PhysicalParams, cutoff: usize) -> Result<Liouvillian> {
    for (name, value) in [("kappa1", p.loss_single), ("kappa2", p.loss_pair)] {
        if value < 0.0 || !value.is_finite() {
            return Err(KerrError::NegativeLoss { name, value });
        }
    }
    let finite = [p.kerr, p.detuning].iter().all(|v| v.is_finite())
        && [p.drive_linear, p.drive_pair, p.drive_cubic].iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite {
        return Err(KerrError::Config("parameters must be finite".into()));
    }
    let d = cutoff + 1;
    let idx = |m: usize, n: usize| m * d + n;
    let mi = C64::new(0.0, -1.0);
    let mut e: Sparse = Vec::new();
    for &(r, c, v) in &hamiltonian(p, d) {
        for n in 0..d {
            // −i H ρ: (r, n) ← ρ_{c n}
            e.push((idx(r, n), idx(c, n), mi * v));
            // +i ρ H: (n, c) ← ρ_{n r}
            e.push((idx(n, c), idx(n, r), -mi * v));
        }
    }
    // Jump operator a^k with amplitude √rate; ⟨m−k|a^k|m⟩ = √(m!/(m−k)!).
    let mut jump = |k: usize, rate: f64| {
        if rate == 0.0 {
            return;
        }
        let amp = |m: usize| ((m - k + 1..=m).map(|j| j as f64).product::<f64>()).sqrt();
        // L†L is diagonal with entries m!/(m−k)!.
        let occ = |m: usize| if m >= k { amp(m) * amp(m) } else { 0.0 };
        for m in 0..d {
            for n in 0..d {
                if m + k < d && n + k < d {
                    e.push((idx(m, n), idx(m + k, n + k), C64::new(rate * amp(m + k) * amp(n + k), 0.0)));
                }
                let loss = -0.5 * rate * (occ(m) + occ(n));
                if loss != 0.0 {
                    e.push((idx(m, n), idx(m, n), C64::new(loss, 0.0)));
                }
            }
        }
    };
    jump(1, p.loss_single);
    jump(2, p.loss_pair);
    // Merge duplicates.
    e.sort_by_key(|&(i, j, _)| (i, j));
    let mut merged: Sparse = Vec::with_capacity(e.len());
    for (i, j, v) in e {
        match merged.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => merged.push((i, j, v)),
        }
    }
    merged.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));
    let scale = merged.iter().map(|t| t.2.norm()).fold(0.0, f64::max);
    let dissipative = p.loss_single > 0.0 || p.loss_pair > 0.0;
    Ok(Liouvillian { dim: d, entries: merged, scale, dissipative })
}

/// Solve with `ρ_{kk} = 1` replacing the (redundant) equation for `(𝓛ρ)_{kk}`;
/// `sector` pins every element outside the given parity block to zero.
fn pinned_solve(l: &Liouvillian, pin: usize, sector: Option<usize>) -> Result<(Vec<C64>, f64)> {
    let mut b = l.to_band(C64::new(0.0, 0.0));
    let mut rhs = vec![C64::new(0.0, 0.0); l.size()];
    let d = l.dim;
    if let Some(par) = sector {
        for m in 0..d {
            for n in 0..d {
                if m % 2 != par || n % 2 != par {
                    b.set_unit_row(l.index(m, n), l.index(m, n), C64::new(1.0, 0.0));
                }
            }
        }
    }
    let k = l.index(pin, pin);
    b.set_unit_row(k, k, C64::new(1.0, 0.0));
    rhs[k] = C64::new(1.0, 0.0);
    let lu = b.factor()?;
    // Power iteration on the inverse: a second kernel direction shows up as an
    // eigenvalue of the pinned matrix at rounding level.
    let mut x: Vec<C64> =
        (0..l.size()).map(|k| C64::new(1.0 + (0.61 * k as f64).sin(), (0.29 * k as f64).cos())).collect();
    let mut growth = 0.0;
    for _ in 0..8 {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|z| *z /= nx);
        x = lu.solve(&x);
        growth = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    Ok((lu.solve(&rhs), growth * l.scale.max(f64::MIN_POSITIVE)))
}

fn normalize(x: &[C64], dim: usize) -> Result<DMatrix<C64>> {
    let m = unvectorize(x, dim);
    let tr = m.trace();
    if tr.norm() == 0.0 || !tr.re.is_finite() {
        return Err(KerrError::Singular("steady-state solution has zero trace".into()));
    }
    let m = m / tr;
    Ok((&m + m.adjoint()) * C64::new(0.5, 0.0))
}

/// Unique steady state of `𝓛` (full space).
pub fn steady_state(l: &Liouvillian) -> Result<TruncatedDensityMatrix> {
    steady_state_in(l, None)
}

/// Unique steady state inside one parity block (`m ≡ n ≡ parity mod 2`).
pub fn steady_state_sector(l: &Liouvillian, parity: usize) -> Result<TruncatedDensityMatrix> {
    steady_state_in(l, Some(parity % 2))
}

/// Diagonal levels of one parity block, or all levels.
fn block_levels(d: usize, sector: Option<usize>) -> Vec<usize> {
    let first = sector.unwrap_or(0);
    (first..d).step_by(if sector.is_some() { 2 } else { 1 }).collect()
}

/// The first of the lowest four pins giving a nonsingular system.
fn first_pinned(l: &Liouvillian, sector: Option<usize>, levels: &[usize]) -> Option<(Vec<C64>, f64, usize)> {
    levels.iter().take(4).find_map(|&pin| pinned_solve(l, pin, sector).ok().map(|(x, cond)| (x, cond, pin)))
}

/// A unit-trace kernel vector of `𝓛` (or of one parity block) without the
/// conditioning and uniqueness checks of [`steady_state`]. Good enough to
/// deflate the zero mode when the kernel is merely ill-conditioned.
pub(crate) fn kernel_estimate(l: &Liouvillian, sector: Option<usize>) -> Option<Vec<C64>> {
    let (x, _, _) = first_pinned(l, sector, &block_levels(l.dim, sector))?;
    normalize(&x, l.dim).ok().map(|m| vectorize(&m))
}

/// Two pinned solves: first at the lowest level of the block, then at its most
/// populated level. Differing answers mean the kernel is not one-dimensional.
fn steady_state_in(l: &Liouvillian, sector: Option<usize>) -> Result<TruncatedDensityMatrix> {
    let d = l.dim;
    let levels = block_levels(d, sector);
    // Pass 1: the first pin with a nonsingular system.
    let (x1, cond1, pin1) = match first_pinned(l, sector, &levels) {
        Some(v) => v,
        // Every pin gave an exactly singular system.
        None => return Err(KerrError::DegenerateKernel { condition: f64::INFINITY, spread: f64::NAN }),
    };
    if cond1 > DEGENERATE_CONDITION {
        return Err(KerrError::DegenerateKernel { condition: cond1, spread: f64::NAN });
    }
    let rho1 = normalize(&x1, d)?;
    // Pass 2: pin the most populated other level of the first answer, if it
    // carries enough weight to be pinned safely.
    let top = levels.iter().map(|&k| rho1[(k, k)].re).fold(0.0, f64::max);
    let pin2 = levels
        .iter()
        .copied()
        .filter(|&k| k != pin1 && rho1[(k, k)].re > 1e-6 * top)
        .max_by(|&a, &b| rho1[(a, a)].re.total_cmp(&rho1[(b, b)].re));
    let rho = match pin2 {
        Some(pin2) => {
            let (x2, cond2) = pinned_solve(l, pin2, sector)
                .map_err(|_| KerrError::DegenerateKernel { condition: cond1, spread: f64::NAN })?;
            let rho2 = normalize(&x2, d)?;
            let spread = (&rho2 - &rho1).norm();
            if spread > 1e-6 {
                return Err(KerrError::DegenerateKernel { condition: cond1.max(cond2), spread });
            }
            rho2
        }
        None => rho1,
    };
    let residual = l.apply(&vectorize(&rho)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * l.scale.max(1.0) {
        return Err(KerrError::Singular(format!("steady-state residual {residual:e}")));
    }
    let out = TruncatedDensityMatrix::from_matrix(rho);
    let pops = out.populations();
    let boundary: f64 = pops[d.saturating_sub(5)..].iter().sum();
    if boundary > BOUNDARY_TOL {
        return Err(KerrError::CutoffTooSmall { cutoff: l.cutoff(), tail: boundary });
    }
    Ok(out)
}

/// Steady state with the cutoff doubled from `start` until the top levels are empty.
pub fn steady_state_adaptive(p: &PhysicalParams, start: usize) -> Result<TruncatedDensityMatrix> {
    let mut cutoff = start.max(8);
    loop {
        let l = build_liouvillian(p, cutoff)?;
        match steady_state(&l) {
            Err(KerrError::CutoffTooSmall { .. }) if cutoff < MAX_ORACLE_CUTOFF => {
                cutoff = (cutoff * 2).min(MAX_ORACLE_CUTOFF);
            }
            other => return other,
        }
    }
}

/// `‖𝓗₊ψ‖ / ‖ψ‖` of a dark state on `cutoff` lab-frame levels.
pub fn dark_state_residual(state: &DarkState, cutoff: usize) -> Result<f64> {
    crate::cqa::dark_state_residual(state, cutoff)
}

#[cfg(test)]
mod tests;
