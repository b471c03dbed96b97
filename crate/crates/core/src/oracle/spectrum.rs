//! Slowest decay rates of the Lindblad generator by shift-invert Arnoldi,
//! and projections of the slowest mode onto candidate operator bases.

use super::{kernel_estimate, unvectorize, Liouvillian};
use crate::cqa::DarkState;
use crate::fock::coherent_vector;
use crate::{KerrError, Result, C64};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Ritz pairs are accepted once their residual is below this fraction of |μ|.
const RITZ_TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 40;

/// Slow part of the generator's spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Highest Fock level kept.
    pub cutoff: usize,
    /// Nonzero eigenvalues nearest zero, ordered by decay rate.
    pub eigenvalues: Vec<C64>,
    /// Decay rates `−Re λ`, ascending.
    pub rates: Vec<f64>,
    /// Right eigenvector of the slowest rate, unit Hilbert-Schmidt norm.
    #[serde(skip)]
    pub slow_mode: Option<DMatrix<C64>>,
    /// Projection of `slow_mode` onto a bistable basis, once computed.
    pub projection_p: Option<f64>,
    /// Shift used for the inversion.
    pub shift: f64,
    /// Arnoldi restarts used.
    pub restarts: usize,
}

impl SpectrumReport {
    /// `γ2 / γ1`, if two rates are known.
    pub fn gap_ratio(&self) -> Option<f64> {
        (self.rates.len() >= 2).then(|| self.rates[1] / self.rates[0])
    }
}

/// Hilbert-Schmidt inner product `Tr[A† B]`.
fn hs(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let m = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::from_element(m, m, C64::new(0.0, 0.0));
    for i in 0..m {
        let mu = t[(i, i)];
        y[(i, i)] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in j + 1..=i {
                acc += t[(j, l)] * y[(l, i)];
            }
            let mut den = t[(j, j)] - mu;
            if den.norm() < 1e-14 * scale {
                den = C64::new(1e-14 * scale, 0.0);
            }
            y[(j, i)] = -acc / den;
        }
        let n = y.column(i).norm();
        y.column_mut(i).unscale_mut(n);
    }
    y
}

/// Deterministic start vector with components in every direction.
fn start_vector(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::new(1.0 + (0.37 * k as f64).sin(), 0.5 * (1.3 * k as f64).cos())).collect()
}

/// The `k` nonzero eigenvalues of `𝓛` nearest zero and the slowest mode.
///
/// Zero modes are deflated through the conserved traces, so the inversion at
/// a tiny shift never sees them. For a generator without loss the remaining
/// zero eigenvalues are discarded by magnitude.
pub fn spectrum(l: &Liouvillian, k: usize) -> Result<SpectrumReport> {
    if k < 2 {
        return Err(KerrError::Config("spectrum needs k >= 2".into()));
    }
    let n = l.size();
    let d = l.levels();
    if l.entries().is_empty() {
        // The zero map has no nonzero eigenvalues.
        return Ok(SpectrumReport {
            cutoff: l.cutoff(),
            eigenvalues: Vec::new(),
            rates: Vec::new(),
            slow_mode: None,
            projection_p: None,
            shift: 0.0,
            restarts: 0,
        });
    }
    let scale = l.scale();
    let shift = 1e-12 * scale;
    let lu = l.to_band(C64::new(shift, 0.0)).factor()?;
    // Each conserved trace (one per parity block when parity is conserved) has
    // a kernel vector; every other right eigenvector is traceless in each
    // block. Removing the block traces from every Krylov vector deflates the
    // zero modes exactly, however small the slowest rate is. Deflating along
    // an estimated kernel vector keeps rounding out of the other directions.
    let sectors: Vec<Option<usize>> = if l.conserves_parity() { vec![Some(0), Some(1)] } else { vec![None] };
    let deflation: Vec<(Vec<usize>, Vec<C64>)> = sectors
        .iter()
        .map(|&sector| {
            let levels: Vec<usize> = (0..d).filter(|m| sector.is_none_or(|s| m % 2 == s)).collect();
            let diag: Vec<usize> = levels.iter().map(|&m| m * d + m).collect();
            let y = kernel_estimate(l, sector).unwrap_or_else(|| {
                let mut y = vec![C64::new(0.0, 0.0); n];
                for &i in &diag {
                    y[i] = C64::new(1.0 / diag.len() as f64, 0.0);
                }
                y
            });
            (diag, y)
        })
        .collect();
    // Without loss the kernel is large and not tied to any trace; fall back
    // to discarding eigenvalues at rounding level.
    let zero_tol = if l.is_dissipative() { 0.0 } else { 1e-9 * scale };
    let project = |w: &mut [C64]| {
        for (diag, y) in &deflation {
            let tr: C64 = diag.iter().map(|&i| w[i]).sum();
            for (x, r) in w.iter_mut().zip(y) {
                *x -= tr * r;
            }
        }
    };
    let apply = |v: &[C64]| {
        let mut w = lu.solve(v);
        project(&mut w);
        w
    };

    let mut want = k;
    let mut v0 = start_vector(n);
    project(&mut v0);
    let mut restarts = 0;
    loop {
        let m = (3 * want + 30).max(50).min(n.saturating_sub(1)).max(1);
        // Arnoldi with repeated modified Gram-Schmidt.
        let nv = vnorm(&v0);
        if nv == 0.0 {
            return Err(KerrError::ConvergenceFailure("start vector vanished after projection".into()));
        }
        let mut basis: Vec<Vec<C64>> = vec![v0.iter().map(|z| z / nv).collect()];
        let mut h = DMatrix::from_element(m + 1, m, C64::new(0.0, 0.0));
        let mut size = m;
        for j in 0..m {
            let mut w = apply(&basis[j]);
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &w);
                    h[(i, j)] += c;
                    for (x, y) in w.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            let hn = vnorm(&w);
            h[(j + 1, j)] = C64::new(hn, 0.0);
            if hn <= 1e-13 * h.column(j).norm() {
                size = j + 1;
                break;
            }
            basis.push(w.iter().map(|z| z / hn).collect());
        }
        let hm = h.view((0, 0), (size, size)).into_owned();
        let beta = h[(size, size - 1)].norm();
        let (q, t) = nalgebra::linalg::Schur::new(hm).unpack();
        let y = &q * triangular_eigenvectors(&t);
        let mut ritz: Vec<(C64, usize, f64)> = (0..size)
            .map(|i| {
                let mu = t[(i, i)];
                let res = beta * y[(size - 1, i)].norm();
                (mu, i, res)
            })
            .collect();
        ritz.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
        // Translate to eigenvalues of 𝓛 and drop zero modes.
        let mut kept: Vec<(C64, usize, f64, f64)> = Vec::new();
        let mut zeros = 0;
        for &(mu, i, res) in &ritz {
            if mu.norm() == 0.0 {
                continue;
            }
            let lambda = C64::new(shift, 0.0) + mu.inv();
            if lambda.norm() < zero_tol {
                zeros += 1;
                continue;
            }
            kept.push((lambda, i, res / mu.norm(), mu.norm()));
            if kept.len() == k {
                break;
            }
        }
        let converged = kept.len() == k && kept.iter().all(|t| t.2 < RITZ_TOL);
        let exhausted = size < m || size + 1 >= n;
        if converged || exhausted || restarts >= MAX_RESTARTS {
            if !converged && !exhausted {
                let worst = kept.iter().map(|t| t.2).fold(0.0, f64::max);
                return Err(KerrError::ConvergenceFailure(format!(
                    "{restarts} restarts, Krylov size {m}, {} of {k} Ritz values, worst relative residual {worst:e}",
                    kept.len()
                )));
            }
            let mut pairs: Vec<(C64, usize)> = kept.iter().map(|t| (t.0, t.1)).collect();
            pairs.sort_by(|a, b| (-a.0.re).total_cmp(&(-b.0.re)));
            let eigenvalues: Vec<C64> = pairs.iter().map(|p| p.0).collect();
            let rates: Vec<f64> = eigenvalues.iter().map(|z| -z.re).collect();
            let slow_mode = pairs.first().map(|&(_, i)| {
                let coeffs = y.column(i);
                let mut x = vec![C64::new(0.0, 0.0); n];
                for (c, b) in coeffs.iter().zip(&basis) {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += c * bi;
                    }
                }
                // Two inverse-iteration sweeps polish the vector.
                for _ in 0..2 {
                    x = apply(&x);
                    let s = vnorm(&x);
                    x.iter_mut().for_each(|z| *z /= s);
                }
                let mut mat = unvectorize(&x, d);
                let s = mat.norm();
                mat.unscale_mut(s);
                mat
            });
            return Ok(SpectrumReport {
                cutoff: l.cutoff(),
                eigenvalues,
                rates,
                slow_mode,
                projection_p: None,
                shift,
                restarts,
            });
        }
        // Explicit restart on the sum of the wanted Ritz vectors.
        want = k + zeros;
        let mut next = vec![C64::new(0.0, 0.0); n];
        for &(_, i, _) in ritz.iter().take(want) {
            let coeffs = y.column(i);
            for (c, b) in coeffs.iter().zip(&basis) {
                for (xi, bi) in next.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
        }
        project(&mut next);
        v0 = next;
        restarts += 1;
    }
}

/// Share of an operator captured by the span of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projection {
    /// `Σ_k |Tr[B_k† X]|²` over the orthonormalized basis, for unit-norm X.
    pub value: f64,
    /// Basis elements kept after orthonormalization.
    pub kept: usize,
    /// Basis elements offered.
    pub total: usize,
}

/// Gram-Schmidt the basis under the Hilbert-Schmidt inner product (dropping
/// elements whose remainder falls below 1e-10 of their norm) and project `x`.
pub fn projection_onto(x: &DMatrix<C64>, basis: &[DMatrix<C64>]) -> Result<Projection> {
    let mut ortho: Vec<DMatrix<C64>> = Vec::new();
    for b in basis {
        let n0 = b.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut r = b.clone();
        for _ in 0..2 {
            for o in &ortho {
                let c = hs(o, &r);
                r -= o * c;
            }
        }
        let n = r.norm();
        if n > 1e-10 * n0 {
            ortho.push(r / C64::new(n, 0.0));
        }
    }
    if ortho.is_empty() {
        return Err(KerrError::RankDeficiency { kept: 0, total: basis.len() });
    }
    let xn = x.norm();
    let value = ortho.iter().map(|o| hs(o, x).norm_sqr()).sum::<f64>() / (xn * xn);
    Ok(Projection { value, kept: ortho.len(), total: basis.len() })
}

/// The four stationary modes `Tr_b[(|ψi⟩⟨ψj|)_+ ⊗ |0⟩⟨0|_−]` on `dim` levels.
pub fn mode_basis(pair: (&DarkState, &DarkState), dim: usize) -> Result<Vec<DMatrix<C64>>> {
    let c = [pair.0.lab_amplitudes()?, pair.1.lab_amplitudes()?];
    let mut out = Vec::with_capacity(4);
    for a in &c {
        for b in &c {
            out.push(a.mode_matrix(b, dim)?);
        }
    }
    Ok(out)
}

/// Outer products `|αi⟩⟨αj|` of coherent states on `dim` levels.
pub fn coherent_basis(amplitudes: &[C64], dim: usize) -> Vec<DMatrix<C64>> {
    let vecs: Vec<DVector<C64>> = amplitudes.iter().map(|&a| DVector::from_vec(coherent_vector(a, dim))).collect();
    let mut out = Vec::new();
    for a in &vecs {
        for b in &vecs {
            out.push(a * b.adjoint());
        }
    }
    out
}

/// `P` of the slow mode against the bistable dark-state pair.
pub fn slow_mode_projection(report: &SpectrumReport, pair: (&DarkState, &DarkState)) -> Result<Projection> {
    let slow =
        report.slow_mode.as_ref().ok_or_else(|| KerrError::ConvergenceFailure("report has no slow mode".into()))?;
    let basis = mode_basis(pair, slow.nrows())?;
    projection_onto(slow, &basis)
}
