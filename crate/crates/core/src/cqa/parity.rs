//! Parity-conserving regime: no one-photon loss and only the two-photon drive.

use super::{CoreSource, DarkState, FrameEquation, StateForm};
use crate::density::TruncatedDensityMatrix;
use crate::hyperfun::{pfq, SeriesControl};
use crate::model::derive;
use crate::{DerivedParams, KerrError, PhysicalParams, Result, C64};
use nalgebra::DMatrix;

/// Steady-state manifold of the parity-conserving regime.
#[derive(Debug, Clone)]
pub struct ParitySolution {
    /// The even dark state `₀F₁(1/2 − D/2; −λ2 z²/4)`.
    pub state: DarkState,
    /// N from its ₁F₂ closed form.
    pub norm: f64,
    /// Extremal state supported on even photon numbers.
    pub rho_even: TruncatedDensityMatrix,
    /// Extremal state supported on odd photon numbers.
    pub rho_odd: TruncatedDensityMatrix,
    /// `[(N+1) ρe + (N−1) ρo] / (2N)`: the state reached from vacuum.
    pub rho_plus: TruncatedDensityMatrix,
}

fn check_regime(p: &PhysicalParams) -> Result<()> {
    let zero = C64::new(0.0, 0.0);
    if p.loss_single != 0.0 || p.drive_linear != zero || p.drive_cubic != zero || p.loss_pair <= 0.0 {
        return Err(KerrError::WrongRegime("parity regime needs kappa1 = Lambda1 = Lambda3 = 0 and kappa2 > 0".into()));
    }
    Ok(())
}

/// `1/2 − D/2`.
fn even_parameter(d: &DerivedParams) -> C64 {
    C64::new(0.5, 0.0) - d.detuning_ratio * 0.5
}

/// N = ₁F₂(1/2; b, b*; |λ2/2|²) with b = 1/2 − D/2.
pub fn parity_closed_norm(d: &DerivedParams) -> Result<f64> {
    let b = even_parameter(d);
    let x = (d.pump * 0.5).norm_sqr();
    Ok(pfq(&[C64::new(0.5, 0.0)], &[b, b.conj()], C64::new(x, 0.0), &SeriesControl::default())?.re)
}

/// ψ_{2l} = (1/2)_l (−λ2)^l / (b)_l.
fn even_derivative(d: &DerivedParams, l: usize) -> C64 {
    let b = even_parameter(d);
    let mut v = C64::new(1.0, 0.0);
    for k in 0..l {
        v = v * (-d.pump) * (k as f64 + 0.5) / (b + k as f64);
    }
    v
}

/// ⟨m|ρ|n⟩ of the steady state from the ₂F₃ block formulas.
pub fn parity_rho_element(d: &DerivedParams, m: usize, n: usize) -> Result<C64> {
    if m % 2 != n % 2 {
        return Ok(C64::new(0.0, 0.0));
    }
    let ctl = SeriesControl::default();
    let dr = d.detuning_ratio;
    let x = C64::new((d.pump * 0.25).norm_sqr(), 0.0);
    let lf = crate::fock::ln_factorials(m.max(n));
    let pre = (-0.5 * ((m + n) as f64 * std::f64::consts::LN_2 + lf[m] + lf[n])).exp();
    let half = |k: usize| C64::new(k as f64 * 0.5, 0.0);
    let value = if m.is_multiple_of(2) {
        let f = pfq(
            &[half(m + 1), half(n + 1)],
            &[half(m + 1) - dr * 0.5, half(n + 1) - dr.conj() * 0.5, C64::new(0.5, 0.0)],
            x,
            &ctl,
        )?;
        even_derivative(d, m / 2) * even_derivative(d, n / 2).conj() * f
    } else {
        let f = pfq(
            &[half(m + 2), half(n + 2)],
            &[half(m + 2) - dr * 0.5, half(n + 2) - dr.conj() * 0.5, C64::new(1.5, 0.0)],
            x,
            &ctl,
        )?;
        let mf = C64::new(m as f64, 0.0);
        let nf = C64::new(n as f64, 0.0);
        let gain = d.pump.norm_sqr() * mf * nf / ((mf - dr) * (nf - dr.conj()) * 2.0);
        even_derivative(d, (m - 1) / 2) * even_derivative(d, (n - 1) / 2).conj() * gain * f
    };
    Ok(value * pre / parity_closed_norm(d)?)
}

/// Solve the parity-conserving regime.
pub fn parity_solve(p: &PhysicalParams) -> Result<ParitySolution> {
    check_regime(p)?;
    let d = derive(p)?;
    let b = even_parameter(&d);
    if let Some(k) = crate::hyperfun::nonpositive_integer(b, crate::hyperfun::POLE_TOL) {
        return Err(KerrError::PoleAtParameter { re: -(k as f64), im: 0.0 });
    }
    let state = DarkState {
        params: *p,
        displacement: C64::new(0.0, 0.0),
        gauge: d.gauge_plus,
        gauge_span: d.gauge_span(),
        form: StateForm::Kummer,
        core: CoreSource::Taylor { start: 0 },
        equation: FrameEquation::from_derived(&d),
    };
    let norm = parity_closed_norm(&d)?;
    let cache = state.amplitudes()?;
    let dim = (cache.physical_support(1e-16) + 10).min(cache.len());
    let rho_plus = cache.density_matrix(dim)?;
    let rho_even = rho_plus.parity_block(0);
    let odd_weight: f64 = rho_plus.populations().iter().skip(1).step_by(2).sum();
    let rho_odd = if odd_weight > 0.0 {
        rho_plus.parity_block(1)
    } else {
        // λ2 → 0 limit of the odd block.
        let mut m = DMatrix::from_element(dim.max(2), dim.max(2), C64::new(0.0, 0.0));
        m[(1, 1)] = C64::new(1.0, 0.0);
        TruncatedDensityMatrix::from_matrix(m)
    };
    Ok(ParitySolution { state, norm, rho_even, rho_odd, rho_plus })
}
