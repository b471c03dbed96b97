use super::TAIL_TOL;
use crate::density::TruncatedDensityMatrix;
use crate::fock::ln_factorials;
use crate::{KerrError, Result, C64};
use nalgebra::DMatrix;

/// Fock amplitudes of a dark state (collective mode) plus their norm.
///
/// Amplitudes are stored as `a_l = ψ_l / √l!`, where `ψ_l` is the l-th
/// derivative of the Segal-Bargmann function at the origin, so that
/// `N = Σ_l |ψ_l|² / l! = Σ_l |a_l|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeCache {
    scaled: Vec<C64>,
    norm: f64,
    ln_fact: Vec<f64>,
}

impl AmplitudeCache {
    pub fn new(scaled: Vec<C64>) -> Result<Self> {
        let norm: f64 = scaled.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() {
            return Err(KerrError::NonConvergence { terms: scaled.len() });
        }
        if norm <= 0.0 {
            return Err(KerrError::NoSolution("dark state has zero norm".into()));
        }
        let ln_fact = ln_factorials(2 * scaled.len() + 2);
        Ok(Self { scaled, norm, ln_fact })
    }

    /// Number of stored levels.
    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    /// Fock-normalized amplitudes `a_l` (unnormalized state).
    pub fn scaled(&self) -> &[C64] {
        &self.scaled
    }

    /// N = Σ |a_l|².
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// ψ_l = l-th derivative of the SB function at the origin.
    pub fn derivative(&self, l: usize) -> C64 {
        self.scaled.get(l).copied().unwrap_or_default() * (0.5 * self.ln_fact[l.min(self.ln_fact.len() - 1)]).exp()
    }

    /// Unit-norm Fock vector of the collective mode.
    pub fn normalized_vector(&self) -> Vec<C64> {
        let s = self.norm.sqrt();
        self.scaled.iter().map(|a| a / s).collect()
    }

    /// Probability mass in the last `levels` levels.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let n = self.scaled.len();
        self.scaled[n.saturating_sub(levels)..].iter().map(|a| a.norm_sqr()).sum::<f64>() / self.norm
    }

    fn check_tail(&self) -> Result<()> {
        let tail = self.tail_mass(5);
        if tail > TAIL_TOL {
            Err(KerrError::CutoffTooSmall { cutoff: self.len(), tail })
        } else {
            Ok(())
        }
    }

    /// √C(m+l, l) · 2^{−(m+l)/2}: amplitude of |m⟩_a|l⟩_b in |m+l⟩ of the collective mode.
    #[inline]
    fn split_weight(&self, m: usize, l: usize) -> f64 {
        let lf = &self.ln_fact;
        (0.5 * (lf[m + l] - lf[m] - lf[l]) - 0.5 * (m + l) as f64 * std::f64::consts::LN_2).exp()
    }

    /// ⟨m|ρ|n⟩ of the physical mode (in the frame of the amplitudes).
    pub fn rho_element(&self, m: usize, n: usize) -> Result<C64> {
        self.check_tail()?;
        let len = self.len();
        let mut acc = C64::new(0.0, 0.0);
        let mut l = 0;
        while m + l < len && n + l < len {
            let w = self.split_weight(m, l) * self.split_weight(n, l);
            acc += self.scaled[m + l] * self.scaled[n + l].conj() * w;
            l += 1;
        }
        Ok(acc / self.norm)
    }

    /// Normally ordered moment Tr[ρ (a†)^n a^m] of the physical mode.
    pub fn moment(&self, n: usize, m: usize) -> Result<C64> {
        self.check_tail()?;
        let len = self.len();
        let lf = &self.ln_fact;
        let mut acc = C64::new(0.0, 0.0);
        let mut l = 0;
        while m + l < len && n + l < len {
            let w = (0.5 * (lf[m + l] + lf[n + l]) - lf[l]).exp();
            acc += self.scaled[m + l] * self.scaled[n + l].conj() * w;
            l += 1;
        }
        Ok(acc * (-0.5 * (m + n) as f64 * std::f64::consts::LN_2).exp() / self.norm)
    }

    /// Mean photon number of the physical mode.
    pub fn mean_photon_number(&self) -> Result<f64> {
        Ok(self.moment(1, 1)?.re)
    }

    /// Rows of `B` with `ρ = B B† / N`: `B[m, l] = a_{m+l} · split_weight(m, l)`.
    fn split_matrix(&self, dim: usize, width: usize) -> DMatrix<C64> {
        let len = self.len();
        let mut b = DMatrix::from_element(dim, width, C64::new(0.0, 0.0));
        for m in 0..dim.min(len) {
            for l in 0..(len - m).min(width) {
                b[(m, l)] = self.scaled[m + l] * self.split_weight(m, l);
            }
        }
        b
    }

    /// Reduced density matrix of the physical mode on `dim` levels.
    pub fn density_matrix(&self, dim: usize) -> Result<TruncatedDensityMatrix> {
        self.check_tail()?;
        let dim = dim.min(self.len());
        let b = self.split_matrix(dim, self.len());
        let rho = (&b * b.adjoint()) / C64::new(self.norm, 0.0);
        Ok(TruncatedDensityMatrix::from_matrix(rho))
    }

    /// Physical-mode operator `Tr_b[(|ψ⟩⟨φ|)_+ ⊗ |0⟩⟨0|_−]` for unit-norm ψ (self)
    /// and φ (other), on `dim` levels. Its trace is `⟨φ|ψ⟩`.
    pub fn mode_matrix(&self, other: &AmplitudeCache, dim: usize) -> Result<DMatrix<C64>> {
        self.check_tail()?;
        other.check_tail()?;
        let width = self.len().max(other.len());
        let bl = self.split_matrix(dim, width);
        let br = other.split_matrix(dim, width);
        Ok((&bl * br.adjoint()) / C64::new((self.norm * other.norm).sqrt(), 0.0))
    }

    /// Smallest physical-mode dimension holding all but `tol` of the population.
    pub fn physical_support(&self, tol: f64) -> usize {
        let len = self.len();
        // Physical population P(k) = Σ_l |a_{k+l}|² C(k+l,k) 2^{−(k+l)}; accumulate from the top.
        let mut pops = vec![0.0; len];
        for (j, a) in self.scaled.iter().enumerate() {
            let p = a.norm_sqr() / self.norm;
            if p == 0.0 {
                continue;
            }
            for (k, pk) in pops.iter_mut().enumerate().take(j + 1) {
                let w = self.split_weight(k, j - k);
                *pk += p * w * w;
            }
        }
        let mut tail = 0.0;
        for k in (0..len).rev() {
            tail += pops[k];
            if tail > tol {
                return (k + 1).min(len);
            }
        }
        1
    }
}
