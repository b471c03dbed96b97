//! The non-Hermitian operator whose kernel is the dark state, and the
//! finite-kernel solver for a vanishing effective Kerr constant.

use super::{CoreSource, DarkState, FrameEquation, StateForm};
use crate::model::nearest_nonneg_integer;
use crate::{KerrError, PhysicalParams, Result, C64};

/// Rows `0..v.len()−2` of
/// `(K̃ c† + √2 Λ3*) c² + (2√2 Λ3 c† − 2Δ̃) c + 2Λ2 c† + 2√2 Λ1`
/// applied to the lab-frame Fock vector `v`.
pub fn apply_nonhermitian(p: &PhysicalParams, v: &[C64]) -> Vec<C64> {
    let kt = p.kerr_eff();
    let dt = p.detuning_eff();
    let s2 = std::f64::consts::SQRT_2;
    let rows = v.len().saturating_sub(2);
    (0..rows)
        .map(|m| {
            let mf = m as f64;
            let up2 = p.drive_cubic.conj() * s2 * ((mf + 1.0) * (mf + 2.0)).sqrt() * v[m + 2];
            let up1 = (kt * mf - dt * 2.0) * (mf + 1.0).sqrt() * v[m + 1];
            let diag = (p.drive_cubic * mf + p.drive_linear) * (2.0 * s2) * v[m];
            let down = if m > 0 { p.drive_pair * 2.0 * mf.sqrt() * v[m - 1] } else { C64::new(0.0, 0.0) };
            up2 + up1 + diag + down
        })
        .collect()
}

/// `‖𝓗₊ψ‖ / ‖ψ‖` over the first `cutoff` rows of the lab-frame state.
///
/// `‖ψ‖` is the norm of the whole state, not of its truncation: a state
/// living mostly above `cutoff` has tiny low-level amplitudes that come out of
/// heavy cancellation, and dividing by their own norm would magnify rounding.
pub fn dark_state_residual(state: &DarkState, cutoff: usize) -> Result<f64> {
    let cache = state.lab_amplitudes_at(cutoff + 2)?;
    let v = cache.scaled();
    let r = apply_nonhermitian(&state.params, v);
    let rn: f64 = r.iter().take(cutoff).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let window: f64 = v.iter().take(cutoff).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // Displacement is unitary and both frames share one seed, so the
    // displaced-frame norm is the lab norm in the same units.
    let whole = match &state.core {
        super::CoreSource::Fock(_) => window,
        _ => state.amplitudes().map_or(window, |c| c.norm().sqrt()),
    };
    Ok(rn / whole.max(window))
}

/// Dark state when K̃ = 0 (no Kerr, no two-photon loss), no two-photon drive,
/// and Λ1 = −n0 Λ3 for a nonnegative integer n0. The kernel is then spanned by
/// a vector supported on `0..=n0`, found by back substitution from `α_{n0} = 1`.
pub fn solve_finite_kernel(p: &PhysicalParams) -> Result<DarkState> {
    let zero = C64::new(0.0, 0.0);
    if !p.allow_negative_loss && p.loss_single < 0.0 {
        return Err(KerrError::NegativeLoss { name: "kappa1", value: p.loss_single });
    }
    if p.kerr != 0.0 || p.loss_pair != 0.0 {
        return Err(KerrError::WrongRegime("finite-kernel solver needs K = kappa2 = 0".into()));
    }
    if p.drive_pair != zero || p.drive_cubic == zero {
        return Err(KerrError::WrongRegime("finite-kernel solver needs Lambda2 = 0 and Lambda3 != 0".into()));
    }
    let (n0, res) = nearest_nonneg_integer(-p.drive_linear / p.drive_cubic);
    if res > 1e-12 {
        return Err(KerrError::NoSolution(
            "with K = kappa2 = 0 a normalizable dark state needs Lambda1 = -n Lambda3".into(),
        ));
    }
    let dt = p.detuning_eff();
    let s2 = std::f64::consts::SQRT_2;
    let mut alpha = vec![zero; n0 + 3];
    alpha[n0] = C64::new(1.0, 0.0);
    for m in (0..n0).rev() {
        let mf = m as f64;
        let rest = p.drive_cubic.conj() * s2 * ((mf + 1.0) * (mf + 2.0)).sqrt() * alpha[m + 2]
            - dt * 2.0 * (mf + 1.0).sqrt() * alpha[m + 1];
        alpha[m] = -rest / (p.drive_cubic * (2.0 * s2) * (mf - n0 as f64));
    }
    alpha.truncate(n0 + 1);
    Ok(DarkState {
        params: *p,
        displacement: zero,
        gauge: zero,
        gauge_span: zero,
        form: StateForm::TruncatedBlockade(n0),
        core: CoreSource::Fock(alpha),
        equation: FrameEquation { detuning_ratio: zero, source: zero, pump: zero, shear: zero },
    })
}
