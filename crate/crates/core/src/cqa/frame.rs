use crate::density::TruncatedDensityMatrix;
use crate::fock::{displace_vector, displacement_margin};
use crate::{KerrError, Result, C64};
use nalgebra::DMatrix;

/// Largest tolerated trace change from truncating the displaced matrix.
const TRACE_TOL: f64 = 1e-8;

/// Return a physical-mode density matrix from the displaced frame to the lab
/// frame: `D(−α/√2) ρ D(−α/√2)†`.
///
/// The result lives on `ρ.dim() + margin` levels, with the margin chosen
/// from the displacement size. The unitary is applied column by column and
/// then row by row.
pub fn undisplace(rho: &TruncatedDensityMatrix, alpha: C64) -> Result<TruncatedDensityMatrix> {
    if alpha == C64::new(0.0, 0.0) {
        return Ok(rho.clone());
    }
    let beta = -alpha / std::f64::consts::SQRT_2;
    let d = rho.dim();
    let out = d + displacement_margin(d, beta);
    let m = rho.matrix();
    // Left factor: U ρ, an out × d matrix.
    let mut left = DMatrix::from_element(out, d, C64::new(0.0, 0.0));
    for j in 0..d {
        let col: Vec<C64> = m.column(j).iter().copied().collect();
        let (v, _) = displace_vector(&col, beta, out);
        for i in 0..out {
            left[(i, j)] = v[i];
        }
    }
    // (U ρ) U†: row i is the conjugate of U applied to the conjugated row.
    let mut lab = DMatrix::from_element(out, out, C64::new(0.0, 0.0));
    for i in 0..out {
        let row: Vec<C64> = left.row(i).iter().map(|z| z.conj()).collect();
        let (v, _) = displace_vector(&row, beta, out);
        for j in 0..out {
            lab[(i, j)] = v[j].conj();
        }
    }
    let deviation = (lab.trace() - rho.trace()).norm();
    if deviation > TRACE_TOL {
        return Err(KerrError::TruncationLoss { loss: deviation });
    }
    Ok(TruncatedDensityMatrix::from_matrix(lab))
}
