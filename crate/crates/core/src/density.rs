//! Density matrices on a truncated Fock space.

use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Complex density matrix on levels `0..dim`, renormalized to unit trace.
///
/// `trace_deviation` keeps `|Tr ρ − 1|` as it was before renormalization so
/// that callers can judge truncation effects.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensityMatrix {
    matrix: DMatrix<C64>,
    trace_deviation: f64,
}

impl TruncatedDensityMatrix {
    /// Wrap a matrix, renormalizing its trace to one.
    pub fn from_matrix(mut matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square(), "density matrix must be square");
        let tr = matrix.trace();
        let trace_deviation = (tr - C64::new(1.0, 0.0)).norm();
        if tr.norm() > 0.0 {
            matrix /= tr;
        }
        Self { matrix, trace_deviation }
    }

    /// Pure state `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn from_pure(v: &[C64]) -> Self {
        let col = DVector::from_column_slice(v);
        Self::from_matrix(&col * col.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace_deviation(&self) -> f64 {
        self.trace_deviation
    }

    /// ⟨m|ρ|n⟩, zero outside the stored block.
    pub fn get(&self, m: usize, n: usize) -> C64 {
        if m < self.dim() && n < self.dim() {
            self.matrix[(m, n)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Photon-number distribution P(n) = ⟨n|ρ|n⟩.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.populations().iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// Normally ordered moment Tr[ρ (a†)^n a^m].
    pub fn moment(&self, n: usize, m: usize) -> C64 {
        // Tr[ρ a†^n a^m] = Σ_k ⟨k|a^m ρ a†^n|k⟩ = Σ_j ρ_{j+m, j+n} √((j+m)!/j!) √((j+n)!/j!)
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            if j + m >= d || j + n >= d {
                break;
            }
            let mut w = 1.0;
            for t in 1..=m {
                w *= ((j + t) as f64).sqrt();
            }
            for t in 1..=n {
                w *= ((j + t) as f64).sqrt();
            }
            acc += self.matrix[(j + m, j + n)] * w;
        }
        acc
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut e: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                e = e.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Zero-pad (or crop) to `dim` levels without renormalizing.
    pub fn resized(&self, dim: usize) -> Self {
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        let k = dim.min(self.dim());
        m.view_mut((0, 0), (k, k)).copy_from(&self.matrix.view((0, 0), (k, k)));
        Self { matrix: m, trace_deviation: self.trace_deviation }
    }

    /// Hilbert-Schmidt distance ‖ρ − σ‖₂, padding the smaller matrix with zeros.
    pub fn hs_distance(&self, other: &Self) -> f64 {
        let d = self.dim().max(other.dim());
        let a = self.resized(d);
        let b = other.resized(d);
        (a.matrix - b.matrix).norm()
    }

    /// ⟨v|ρ|v⟩ / ⟨v|v⟩: fidelity with a pure state.
    pub fn fidelity_with_pure(&self, v: &[C64]) -> f64 {
        let d = self.dim().min(v.len());
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += v[i].conj() * self.matrix[(i, j)] * v[j];
            }
        }
        acc.re / norm
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, padding the smaller matrix with zeros.
    pub fn uhlmann_fidelity(&self, other: &Self) -> f64 {
        let d = self.dim().max(other.dim());
        let a = self.resized(d).matrix;
        let b = other.resized(d).matrix;
        let root = hermitian_sqrt(&a);
        let inner = &root * b * &root;
        let ev = ((&inner + inner.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigenvalues();
        // Rounding-level eigenvalues would contribute O(√eps) each.
        let floor = 1e-13 * ev.iter().fold(0.0f64, |a, &x| a.max(x));
        let s: f64 = ev.iter().filter(|&&x| x > floor).map(|&x| x.sqrt()).sum();
        s * s
    }

    /// Restrict to levels of one parity (`parity` = 0 even, 1 odd) and renormalize.
    pub fn parity_block(&self, parity: usize) -> Self {
        let mut m = self.matrix.clone();
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i % 2 != parity || j % 2 != parity {
                    m[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        Self::from_matrix(m)
    }
}

/// Square root of the positive part of a Hermitian matrix.
fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let floor = 1e-13 * eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x));
    let roots = eig.eigenvalues.map(|x| C64::new(if x > floor { x.sqrt() } else { 0.0 }, 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}
