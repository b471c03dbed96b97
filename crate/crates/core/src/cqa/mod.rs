//! Dark states of the collective mode and the exact steady state built from them.
//!
//! A dark state is stored as a recipe: a displacement `α+`, a gauge root `ε`,
//! the span `s = ε+ − ε−`, and a source for the core coefficients `c_m` of
//!
//! ```text
//! ξ(z) = e^{−ε z} Σ_m c_m (s z)^m / m!,      ψ_lab = D(−α+) ξ.
//! ```
//!
//! Fock amplitudes are generated on demand by one of two engines:
//! * a direct convolution of the exponential with a finite coefficient list
//!   (blockade, band-limited and bistable branches), which is exact and
//!   immune to the instability of recurrences for subdominant solutions;
//! * the gauge-free Taylor recurrence of the displaced-frame equation
//!   `(k − D) ξ_{k+1} + (k λ3 + λ1) ξ_k + k λ2 ξ_{k−1} = 0`, used for every
//!   infinite series.
//!
//! Internally the amplitudes are kept in Fock normalization
//! `a_l = ξ_l / √l!`, so that `N = Σ |a_l|²`.

mod cache;
mod closed;
mod frame;
pub mod pair;
mod parity;
mod residual;

pub use cache::AmplitudeCache;
pub use closed::{
    closed_form_derivative, hypergeometric_moment, hypergeometric_norm, hypergeometric_rho_element, sb_value_in_gauge,
    Gauge,
};
pub use frame::undisplace;
pub use pair::{bistable_pair, near_bistable_state, q_parameter, NearBistable};
pub use parity::{parity_closed_norm, parity_rho_element, parity_solve, ParitySolution};
pub use residual::{apply_nonhermitian, dark_state_residual, solve_finite_kernel};

use crate::fock::ln_factorials;
use crate::model::{classify, derive, nearest_nonneg_integer, PhaseClass, PhaseKind, DEFAULT_CLASS_TOL};
use crate::{DerivedParams, KerrError, PhysicalParams, Result, C64};
use serde::Serialize;

/// Analytic shape of a dark state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateForm {
    /// `e^{−εz} ₁F₁(−r1; −r2; s z)`.
    Kummer,
    /// Both gauge roots vanish: `₀F₁`-type (Bessel) solution.
    Bessel,
    /// Finite coefficient list `c_0..c_{n0}`.
    TruncatedBlockade(usize),
    /// Coefficients start at `c_{m0+1}`.
    AntiBlockadeShifted(usize),
    /// Band `c_{m0+1}..c_{n0}`.
    MediumWindow(usize, usize),
    /// Member (or first-order superposition) of a bistable pair.
    BistablePair,
}

/// Coefficients of the displaced-frame equation
/// `z ξ'' + (λ3 z − D) ξ' + (λ2 z + λ1) ξ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameEquation {
    pub detuning_ratio: C64,
    pub source: C64,
    pub pump: C64,
    pub shear: C64,
}

impl FrameEquation {
    pub fn from_derived(d: &DerivedParams) -> Self {
        Self { detuning_ratio: d.detuning_ratio, source: d.source, pump: d.pump, shear: d.shear }
    }
}

/// Where the core coefficients (or amplitudes) come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreSource {
    /// `c_start = first`, then `(m − r2) c_{m+1} = (m − r1) c_m` without end.
    Series { r1: C64, r2: C64, start: usize, first: C64 },
    /// Explicit list `c_start, c_start+1, ...`; zero elsewhere.
    Finite { start: usize, coeffs: Vec<C64> },
    /// All coefficients equal one: `ξ = e^{(s − ε) z}`.
    Coherent,
    /// No gauge structure (both roots zero): Taylor recurrence seeded with `ξ_start = 1`.
    Taylor { start: usize },
    /// Explicit lab-frame Fock amplitudes.
    Fock(Vec<C64>),
    /// `first + weight · second`.
    Superposition { first: Box<DarkState>, second: Box<DarkState>, weight: C64 },
}

/// A pure dark state of the collective mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkState {
    pub params: PhysicalParams,
    /// α+: the lab-frame state is `D(−α+)` applied to the displaced-frame state.
    pub displacement: C64,
    /// Gauge root ε of the representation.
    pub gauge: C64,
    /// Kummer argument scale `s` (ε+ − ε− in the plus gauge).
    pub gauge_span: C64,
    pub form: StateForm,
    pub core: CoreSource,
    pub equation: FrameEquation,
}

/// Cap for adaptive cutoff doubling.
pub const MAX_CUTOFF: usize = 8192;
/// Probability mass allowed in the last five retained levels.
pub const TAIL_TOL: f64 = 1e-12;

impl DarkState {
    /// `max(80, ⌈8(|ε|² + |α|²) + 40⌉)`.
    pub fn default_cutoff(&self) -> usize {
        let spread = self.gauge.norm_sqr().max(self.gauge_span.norm_sqr()) + self.displacement.norm_sqr();
        let est = (8.0 * spread + 40.0).ceil() as usize;
        est.max(80)
    }

    /// Displaced-frame Fock amplitudes `a_0..a_{len−1}` (not normalized).
    pub fn scaled_amplitudes(&self, len: usize) -> Vec<C64> {
        match &self.core {
            CoreSource::Series { start, first, .. } => {
                let seed = seed_amplitude(*first, self.gauge_span, *start);
                taylor_amplitudes(&self.equation, *start, seed, len)
            }
            CoreSource::Taylor { start } => {
                let seed = seed_amplitude(C64::new(1.0, 0.0), C64::new(0.0, 0.0), *start);
                taylor_amplitudes(&self.equation, *start, seed, len)
            }
            CoreSource::Finite { start, coeffs } => {
                convolution_amplitudes(self.gauge, self.gauge_span, *start, coeffs, len)
            }
            CoreSource::Coherent => exponential_amplitudes(self.gauge_span - self.gauge, len),
            CoreSource::Fock(v) => {
                let mut out = v.clone();
                out.resize(len, C64::new(0.0, 0.0));
                out
            }
            CoreSource::Superposition { first, second, weight } => {
                let a = first.scaled_amplitudes(len);
                let b = second.scaled_amplitudes(len);
                a.iter().zip(&b).map(|(x, y)| x + weight * y).collect()
            }
        }
    }

    /// Core coefficients `c_0..=c_cutoff` of this representation.
    pub fn core_list(&self, cutoff: usize) -> Result<Vec<C64>> {
        match &self.core {
            CoreSource::Series { r1, r2, start, first } => Ok(series_coefficients(*r1, *r2, *start, *first, cutoff)),
            CoreSource::Finite { start, coeffs } => {
                let mut out = vec![C64::new(0.0, 0.0); cutoff + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    if start + k <= cutoff {
                        out[start + k] = *c;
                    }
                }
                Ok(out)
            }
            CoreSource::Coherent => Ok(vec![C64::new(1.0, 0.0); cutoff + 1]),
            _ => Err(KerrError::Unsupported("this dark state has no core-coefficient description".into())),
        }
    }

    /// Displaced-frame amplitudes at a fixed cutoff.
    pub fn amplitudes_at(&self, cutoff: usize) -> Result<AmplitudeCache> {
        psi_amplitudes(self, cutoff)
    }

    /// Displaced-frame amplitudes with the adaptive cutoff rule.
    pub fn amplitudes(&self) -> Result<AmplitudeCache> {
        let mut cutoff = self.default_cutoff();
        loop {
            let cache = psi_amplitudes(self, cutoff)?;
            if cache.tail_mass(5) < TAIL_TOL {
                return Ok(cache);
            }
            if cutoff >= MAX_CUTOFF {
                return Err(KerrError::CutoffTooSmall { cutoff, tail: cache.tail_mass(5) });
            }
            cutoff = (cutoff * 2).min(MAX_CUTOFF);
        }
    }

    /// Lab-frame amplitudes on `cutoff` levels.
    pub fn lab_amplitudes_at(&self, cutoff: usize) -> Result<AmplitudeCache> {
        if self.displacement == C64::new(0.0, 0.0) {
            return psi_amplitudes(self, cutoff);
        }
        // Lab levels below `cutoff` draw on displaced-frame levels above it, up
        // to the margin or the state's own support, whichever ends first.
        let margin = cutoff + crate::fock::displacement_margin(cutoff, self.displacement);
        let support = self.amplitudes().map_or(margin, |c| c.len());
        let source = cutoff.max(margin.min(support));
        let shifted = psi_amplitudes(self, source)?;
        let (v, _) = crate::fock::displace_vector(shifted.scaled(), -self.displacement, cutoff);
        AmplitudeCache::new(v)
    }

    /// Lab-frame amplitudes with the adaptive cutoff rule applied in both frames.
    pub fn lab_amplitudes(&self) -> Result<AmplitudeCache> {
        let mut cutoff = self.default_cutoff();
        loop {
            let shifted = psi_amplitudes(self, cutoff)?;
            let cache = if self.displacement == C64::new(0.0, 0.0) {
                shifted.clone()
            } else {
                let (v, _) = crate::fock::displace_vector(shifted.scaled(), -self.displacement, cutoff);
                AmplitudeCache::new(v)?
            };
            let tail = shifted.tail_mass(5).max(cache.tail_mass(5));
            if tail < TAIL_TOL {
                return Ok(cache);
            }
            if cutoff >= MAX_CUTOFF {
                return Err(KerrError::CutoffTooSmall { cutoff, tail });
            }
            cutoff = (cutoff * 2).min(MAX_CUTOFF);
        }
    }

    /// Segal-Bargmann value of the displaced-frame state, `Σ a_l z^l / √l!`,
    /// normalized so that the value at the origin is `ξ(0)`.
    pub fn sb_value(&self, z: C64, len: usize) -> C64 {
        let a = self.scaled_amplitudes(len);
        let mut acc = C64::new(0.0, 0.0);
        let mut zpow = C64::new(1.0, 0.0);
        for (l, al) in a.iter().enumerate() {
            acc += al * zpow;
            zpow = zpow * z / ((l + 1) as f64).sqrt();
        }
        acc
    }
}

/// `c_start = first`, continued by the two-term recursion up to `c_cutoff`.
pub(crate) fn series_coefficients(r1: C64, r2: C64, start: usize, first: C64, cutoff: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); cutoff + 1];
    if start > cutoff {
        return out;
    }
    out[start] = first;
    for m in start..cutoff {
        let mf = m as f64;
        out[m + 1] = out[m] * (C64::new(mf, 0.0) - r1) / (C64::new(mf, 0.0) - r2);
    }
    out
}

/// Coefficients `c_start..=c_end` by the two-term recursion.
pub(crate) fn finite_coefficients(r1: C64, r2: C64, start: usize, end: usize) -> Vec<C64> {
    let full = series_coefficients(r1, r2, start, C64::new(1.0, 0.0), end);
    full[start..=end].to_vec()
}

fn seed_amplitude(first: C64, span: C64, start: usize) -> C64 {
    let lf = ln_factorials(start);
    let scale = (-0.5 * lf[start]).exp();
    if span == C64::new(0.0, 0.0) {
        first * scale
    } else {
        first * span.powu(start as u32) * scale
    }
}

/// Taylor recurrence in Fock normalization, seeded at `start`.
pub(crate) fn taylor_amplitudes(eq: &FrameEquation, start: usize, seed: C64, len: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut a = vec![zero; len];
    if start >= len {
        return a;
    }
    a[start] = seed;
    for k in start..len.saturating_sub(1) {
        let kf = k as f64;
        let prev = if k > start { a[k - 1] } else { zero };
        let numer = (eq.shear * kf + eq.source) * a[k] + eq.pump * kf.sqrt() * prev;
        if numer == zero {
            a[k + 1] = zero;
            continue;
        }
        let denom = (C64::new(kf, 0.0) - eq.detuning_ratio) * (kf + 1.0).sqrt();
        a[k + 1] = -numer / denom;
    }
    a
}

/// `a_l = Σ_m √C(l,m) (c_m s^m / √m!) ((−ε)^{l−m} / √(l−m)!)`.
pub(crate) fn convolution_amplitudes(eps: C64, span: C64, start: usize, coeffs: &[C64], len: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let lf = ln_factorials(len.max(start + coeffs.len()) + 1);
    let mut u = Vec::with_capacity(len);
    let mut t = C64::new(1.0, 0.0);
    for j in 0..len {
        u.push(t);
        t = t * (-eps) / ((j + 1) as f64).sqrt();
    }
    let v: Vec<C64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = start + k;
            let sm = if m == 0 { C64::new(1.0, 0.0) } else { span.powu(m as u32) };
            c * sm * (-0.5 * lf[m]).exp()
        })
        .collect();
    let mut a = vec![zero; len];
    for (l, al) in a.iter_mut().enumerate() {
        let mut acc = zero;
        for (k, vm) in v.iter().enumerate() {
            let m = start + k;
            if m > l {
                break;
            }
            let w = (0.5 * (lf[l] - lf[m] - lf[l - m])).exp();
            acc += vm * u[l - m] * w;
        }
        *al = acc;
    }
    a
}

/// Amplitudes of `e^{γ z}`: `γ^l / √l!`.
pub(crate) fn exponential_amplitudes(gamma: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut t = C64::new(1.0, 0.0);
    for l in 0..len {
        out.push(t);
        t = t * gamma / ((l + 1) as f64).sqrt();
    }
    out
}

/// Core coefficients `c_0..=c_cutoff` selected by the phase class.
pub fn core_coefficients(d: &DerivedParams, cls: &PhaseClass, cutoff: usize) -> Result<Vec<C64>> {
    if cutoff < 1 {
        return Err(KerrError::Config("cutoff must be at least 1".into()));
    }
    let r2 = d.resonance_index;
    let r1 = d
        .blockade_index
        .ok_or_else(|| KerrError::Unsupported("both gauge roots vanish; no core coefficients".into()))?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut out = vec![zero; cutoff + 1];
    match cls.kind {
        PhaseKind::Generic | PhaseKind::PureCoherent => {
            if cls.kind == PhaseKind::PureCoherent {
                out.iter_mut().for_each(|c| *c = one);
            } else {
                out = series_coefficients(r1, r2, 0, one, cutoff);
            }
        }
        PhaseKind::Blockade(n0) | PhaseKind::Bistable(n0, _) => {
            for (k, c) in finite_coefficients(r1, r2, 0, n0).into_iter().enumerate() {
                if k <= cutoff {
                    out[k] = c;
                }
            }
        }
        PhaseKind::AntiBlockade(m0) => out = series_coefficients(r1, r2, m0 + 1, one, cutoff),
        PhaseKind::MediumWindow(m0, n0) => {
            for (k, c) in finite_coefficients(r1, r2, m0 + 1, n0).into_iter().enumerate() {
                if m0 + 1 + k <= cutoff {
                    out[m0 + 1 + k] = c;
                }
            }
        }
    }
    if out.iter().any(|c| !c.is_finite()) {
        return Err(KerrError::NoSolution("core coefficients diverge for this phase class".into()));
    }
    Ok(out)
}

/// Build the dark state for a non-bistable parameter point.
pub fn solve_dark_state(d: &DerivedParams, cls: &PhaseClass) -> Result<DarkState> {
    let span = d.gauge_span();
    let mut state = DarkState {
        params: d.params,
        displacement: d.displacement,
        gauge: d.gauge_plus,
        gauge_span: span,
        form: StateForm::Kummer,
        core: CoreSource::Coherent,
        equation: FrameEquation::from_derived(d),
    };
    let both_zero = d.gauge_plus == C64::new(0.0, 0.0) && d.gauge_minus == C64::new(0.0, 0.0);
    if both_zero || d.blockade_index.is_none() {
        state.gauge = C64::new(0.0, 0.0);
        state.gauge_span = C64::new(0.0, 0.0);
        let (m0, res) = nearest_nonneg_integer(d.detuning_ratio);
        if d.source != C64::new(0.0, 0.0) && res < DEFAULT_CLASS_TOL {
            state.form = StateForm::AntiBlockadeShifted(m0);
            state.core = CoreSource::Taylor { start: m0 + 1 };
        } else {
            // With a vanishing source this is the vacuum for any D.
            state.form = StateForm::Bessel;
            state.core = CoreSource::Taylor { start: 0 };
        }
        return Ok(state);
    }
    let r1 = d.blockade_index.expect("checked above");
    let r2 = d.resonance_index;
    let one = C64::new(1.0, 0.0);
    match cls.kind {
        PhaseKind::Bistable(n1, n2) => {
            return Err(KerrError::WrongRegime(format!(
                "bistable point ({n1}, {n2}) has a two-dimensional dark manifold; use bistable_pair"
            )))
        }
        PhaseKind::PureCoherent => state.core = CoreSource::Coherent,
        PhaseKind::Blockade(n0) => {
            state.form = StateForm::TruncatedBlockade(n0);
            state.core = CoreSource::Finite { start: 0, coeffs: finite_coefficients(r1, r2, 0, n0) };
        }
        PhaseKind::AntiBlockade(m0) => {
            state.form = StateForm::AntiBlockadeShifted(m0);
            state.core = CoreSource::Series { r1, r2, start: m0 + 1, first: one };
        }
        PhaseKind::MediumWindow(m0, n0) => {
            state.form = StateForm::MediumWindow(m0, n0);
            state.core = CoreSource::Finite { start: m0 + 1, coeffs: finite_coefficients(r1, r2, m0 + 1, n0) };
        }
        PhaseKind::Generic => {
            // A terminating series in the other gauge is exact there and must
            // not be generated by a recurrence in which it is subdominant.
            let (n, res) = nearest_nonneg_integer(r2 - r1);
            if res < DEFAULT_CLASS_TOL {
                let r1_other = r2 - r1;
                state.gauge = d.gauge_minus;
                state.gauge_span = -span;
                state.core = CoreSource::Finite { start: 0, coeffs: finite_coefficients(r1_other, r2, 0, n) };
            } else {
                state.core = CoreSource::Series { r1, r2, start: 0, first: one };
            }
        }
    }
    Ok(state)
}

/// Convenience: validate, derive, classify and solve.
pub fn solve(p: &PhysicalParams) -> Result<DarkState> {
    let d = derive(p)?;
    let cls = classify(&d, DEFAULT_CLASS_TOL);
    solve_dark_state(&d, &cls)
}

/// Fill the displaced-frame amplitude cache on `cutoff` levels.
pub fn psi_amplitudes(s: &DarkState, cutoff: usize) -> Result<AmplitudeCache> {
    AmplitudeCache::new(s.scaled_amplitudes(cutoff.max(1)))
}

#[cfg(test)]
mod tests;
