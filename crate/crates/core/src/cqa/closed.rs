//! Closed-form expressions used to cross-check the amplitude engines.

use crate::hyperfun::{kummer_1f1_accurate, pfq, SeriesControl};
use crate::{DerivedParams, KerrError, Result, C64};

/// Which gauge root carries the exponential prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Plus,
    Minus,
}

/// Displaced-frame SB value `e^{−ε z} ₁F₁(−r; −r2; (ε − ε') z)` in the chosen gauge,
/// where `r = (λ1 + ε D)/(ε − ε')` and `ε'` is the other root.
pub fn sb_value_in_gauge(d: &DerivedParams, z: C64, gauge: Gauge) -> Result<C64> {
    let (eps, other) = match gauge {
        Gauge::Plus => (d.gauge_plus, d.gauge_minus),
        Gauge::Minus => (d.gauge_minus, d.gauge_plus),
    };
    let span = eps - other;
    if span == C64::new(0.0, 0.0) {
        return Err(KerrError::Unsupported("gauge roots coincide".into()));
    }
    let r = (d.source + eps * d.detuning_ratio) / span;
    let ctl = SeriesControl::default();
    let f = kummer_1f1_accurate(-r, -d.resonance_index, span * z, &ctl)?;
    Ok((-eps * z).exp() * f)
}

/// `ψ_l = (−ε+)^l ₂F₁(−l, −r1; −r2; 1 − ε−/ε+)` together with `|ε+|^l Σ|terms|`,
/// the scale against which its rounding error should be judged.
pub fn closed_form_derivative(d: &DerivedParams, l: usize) -> Result<(C64, f64)> {
    let r1 = d.blockade_index.ok_or_else(|| KerrError::Unsupported("r1 is unbounded for this parameter set".into()))?;
    let r2 = d.resonance_index;
    let eps = d.gauge_plus;
    if eps == C64::new(0.0, 0.0) {
        return Err(KerrError::Unsupported("closed form needs a nonzero gauge root".into()));
    }
    let x = C64::new(1.0, 0.0) - d.gauge_minus / eps;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    for m in 0..l {
        let mf = m as f64;
        let den = C64::new(mf, 0.0) - r2;
        let num = (mf - l as f64) * (C64::new(mf, 0.0) - r1);
        if num == C64::new(0.0, 0.0) {
            break;
        }
        if den.norm() < 1e-13 {
            return Err(KerrError::PoleAtParameter { re: -r2.re, im: -r2.im });
        }
        term = term * num / den * x / (mf + 1.0);
        sum += term;
        abs_sum += term.norm();
    }
    let pre = (-eps).powu(l as u32);
    Ok((pre * sum, eps.norm().powi(l as i32) * abs_sum))
}

fn pure_hypergeometric_setup(d: &DerivedParams) -> Result<(C64, C64, f64)> {
    let lam3 = d.shear;
    if lam3 == C64::new(0.0, 0.0) || d.pump.norm() > 1e-13 * lam3.norm_sqr().max(1.0) {
        return Err(KerrError::WrongRegime("closed form needs λ2 = 0 and λ3 ≠ 0".into()));
    }
    Ok((-d.source / lam3, d.detuning_ratio, lam3.norm_sqr()))
}

/// ξ_m = (−r)_m / (−D)_m (−λ3)^m in the root-zero gauge.
fn pure_hypergeometric_derivative(r: C64, dr: C64, lam3: C64, m: usize) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for k in 0..m {
        let kf = k as f64;
        v = v * (C64::new(kf, 0.0) - r) / (C64::new(kf, 0.0) - dr) * (-lam3);
    }
    v
}

/// N = ₂F₂(−r, −r*; −D, −D*; |λ3|²) when λ2 = 0.
pub fn hypergeometric_norm(d: &DerivedParams) -> Result<f64> {
    let (r, dr, x) = pure_hypergeometric_setup(d)?;
    let ctl = SeriesControl::default();
    Ok(pfq(&[-r, -r.conj()], &[-dr, -dr.conj()], C64::new(x, 0.0), &ctl)?.re)
}

/// Displaced-frame ⟨m|ρ|n⟩ from the ₂F₂ closed form (λ2 = 0).
pub fn hypergeometric_rho_element(d: &DerivedParams, m: usize, n: usize) -> Result<C64> {
    let (r, dr, x) = pure_hypergeometric_setup(d)?;
    let ctl = SeriesControl::default();
    let xm = pure_hypergeometric_derivative(r, dr, d.shear, m);
    let xn = pure_hypergeometric_derivative(r, dr, d.shear, n);
    let mf = C64::new(m as f64, 0.0);
    let nf = C64::new(n as f64, 0.0);
    let f = pfq(&[mf - r, nf - r.conj()], &[mf - dr, nf - dr.conj()], C64::new(0.5 * x, 0.0), &ctl)?;
    let lf = crate::fock::ln_factorials(m.max(n));
    let pre = (-0.5 * ((m + n) as f64 * std::f64::consts::LN_2 + lf[m] + lf[n])).exp();
    Ok(xm * xn.conj() * f * pre / hypergeometric_norm(d)?)
}

/// Displaced-frame Tr[ρ (a†)^n a^m] from the ₂F₂ closed form (λ2 = 0).
pub fn hypergeometric_moment(d: &DerivedParams, n: usize, m: usize) -> Result<C64> {
    let (r, dr, x) = pure_hypergeometric_setup(d)?;
    let ctl = SeriesControl::default();
    let xm = pure_hypergeometric_derivative(r, dr, d.shear, m);
    let xn = pure_hypergeometric_derivative(r, dr, d.shear, n);
    let mf = C64::new(m as f64, 0.0);
    let nf = C64::new(n as f64, 0.0);
    let f = pfq(&[mf - r, nf - r.conj()], &[mf - dr, nf - dr.conj()], C64::new(x, 0.0), &ctl)?;
    let pre = (-0.5 * (m + n) as f64 * std::f64::consts::LN_2).exp();
    Ok(xm * xn.conj() * f * pre / hypergeometric_norm(d)?)
}
