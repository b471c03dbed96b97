//! Physical parameters, derived constants and the (r1, r2) phase classification.
//!
//! Conventions: K̃ = K − iκ2, Δ̃ = Δ + iκ1/2. Without the cubic drive the dark
//! state obeys `z ψ'' − D ψ' + (λ2 z + λ1) ψ = 0` with `D = 2Δ̃/K̃`,
//! `λ2 = 2Λ2/K̃`, `λ1 = 2√2 Λ1/K̃`. With the cubic drive the collective mode is
//! first displaced by `α+ = √2 Λ3 / K̃*`, after which
//! `z ξ'' + (λ3 z − D) ξ' + (λ2 z + λ1) ξ = 0` holds with
//!
//! ```text
//! D  = (2/K̃)(Δ̃ + 2|Λ3|²/K̃)
//! λ1 = √2Λ3/|K̃|² · (4|Λ3|²/K̃ + 2Δ̃) + (2√2/K̃)(Λ1 − Λ2Λ3*/K̃)
//! λ2 = (2Λ3²/|K̃|²)(K̃/K̃* − 2) + 2Λ2/K̃
//! λ3 = (2√2Λ3/K̃)(1 − K̃/K̃*)
//! ```
//!
//! The gauge roots ε± solve `ε² − λ3 ε + λ2 = 0`; the classifiers are
//! `r1 = (λ1 + ε+ D)/(ε+ − ε−)` and `r2 = D`. All rates are in units chosen
//! by the caller (K by convention); nothing here converts units.
//!
//! No `(a†)³` drive is representable: such a term makes the dark-state
//! condition admit only the zero vector, so the parameter set simply has no
//! slot for it.

use crate::error::{KerrError, Result};
use crate::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// The seven physical constants of the model plus the negative-loss flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Default"))]
pub struct Params<T> {
    /// Kerr nonlinearity K.
    #[serde(rename = "K")]
    pub kerr: T,
    /// Drive detuning Δ.
    #[serde(rename = "Delta", default)]
    pub detuning: T,
    /// Linear one-photon drive Λ1.
    #[serde(rename = "Lambda1", default)]
    pub drive_linear: Complex<T>,
    /// Two-photon drive Λ2.
    #[serde(rename = "Lambda2", default)]
    pub drive_pair: Complex<T>,
    /// Nonlinear one-photon drive Λ3 (the `a†a†a` term).
    #[serde(rename = "Lambda3", default)]
    pub drive_cubic: Complex<T>,
    /// One-photon loss κ1.
    #[serde(rename = "kappa1", default)]
    pub loss_single: T,
    /// Two-photon loss κ2.
    #[serde(rename = "kappa2", default)]
    pub loss_pair: T,
    /// Permit negative loss rates (analytic continuation only).
    #[serde(default)]
    pub allow_negative_loss: bool,
}

impl<T: Real> Params<T> {
    /// A bare Kerr resonator with every other constant zero.
    pub fn kerr_only(kerr: T) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            kerr,
            detuning: T::zero(),
            drive_linear: z,
            drive_pair: z,
            drive_cubic: z,
            loss_single: T::zero(),
            loss_pair: T::zero(),
            allow_negative_loss: false,
        }
    }

    pub fn with_detuning(mut self, v: T) -> Self {
        self.detuning = v;
        self
    }
    pub fn with_drive_linear(mut self, v: Complex<T>) -> Self {
        self.drive_linear = v;
        self
    }
    pub fn with_drive_pair(mut self, v: Complex<T>) -> Self {
        self.drive_pair = v;
        self
    }
    pub fn with_drive_cubic(mut self, v: Complex<T>) -> Self {
        self.drive_cubic = v;
        self
    }
    pub fn with_losses(mut self, single: T, pair: T) -> Self {
        self.loss_single = single;
        self.loss_pair = pair;
        self
    }

    /// K̃ = K − iκ2.
    pub fn kerr_eff(&self) -> Complex<T> {
        Complex::new(self.kerr, -self.loss_pair)
    }

    /// Δ̃ = Δ + iκ1/2.
    pub fn detuning_eff(&self) -> Complex<T> {
        Complex::new(self.detuning, self.loss_single * T::lit(0.5))
    }

    /// Accept iff the losses are nonnegative (unless flagged) and K̃ ≠ 0.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.kerr,
            self.detuning,
            self.drive_linear.re,
            self.drive_linear.im,
            self.drive_pair.re,
            self.drive_pair.im,
            self.drive_cubic.re,
            self.drive_cubic.im,
            self.loss_single,
            self.loss_pair,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(KerrError::Config("parameters must be finite".into()));
        }
        if !self.allow_negative_loss {
            if self.loss_single < T::zero() {
                return Err(KerrError::NegativeLoss {
                    name: "kappa1",
                    value: self.loss_single.to_f64().unwrap_or(f64::NAN),
                });
            }
            if self.loss_pair < T::zero() {
                return Err(KerrError::NegativeLoss {
                    name: "kappa2",
                    value: self.loss_pair.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if self.kerr == T::zero() && self.loss_pair == T::zero() {
            return Err(KerrError::DegenerateKerr);
        }
        Ok(())
    }

    /// Convert to another scalar type.
    pub fn cast<U: Real>(&self) -> Params<U> {
        let f = |x: T| U::lit(x.to_f64().unwrap_or(f64::NAN));
        let g = |z: Complex<T>| Complex::new(f(z.re), f(z.im));
        Params {
            kerr: f(self.kerr),
            detuning: f(self.detuning),
            drive_linear: g(self.drive_linear),
            drive_pair: g(self.drive_pair),
            drive_cubic: g(self.drive_cubic),
            loss_single: f(self.loss_single),
            loss_pair: f(self.loss_pair),
            allow_negative_loss: self.allow_negative_loss,
        }
    }
}

/// Complex constants consumed by the closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived<T> {
    pub params: Params<T>,
    /// K̃ = K − iκ2.
    pub kerr_eff: Complex<T>,
    /// Δ̃ = Δ + iκ1/2.
    pub detuning_eff: Complex<T>,
    /// D: the Kummer denominator is −D; equals r2.
    pub detuning_ratio: Complex<T>,
    /// λ1: constant term of the displaced-frame equation.
    pub source: Complex<T>,
    /// λ2: coefficient of z ψ.
    pub pump: Complex<T>,
    /// λ3: coefficient of z ψ'; zero whenever κ2 = 0.
    pub shear: Complex<T>,
    /// ε+: the gauge root used for the closed form.
    pub gauge_plus: Complex<T>,
    /// ε−: the other root.
    pub gauge_minus: Complex<T>,
    /// α+ = √2 Λ3 / K̃*: displacement of the collective mode.
    pub displacement: Complex<T>,
    /// r1; `None` when both gauge roots vanish while λ1 ≠ 0 (pure Bessel case,
    /// where r1 grows without bound).
    pub blockade_index: Option<Complex<T>>,
    /// r2 = D.
    pub resonance_index: Complex<T>,
}

impl<T: Real> Derived<T> {
    /// ε+ − ε−: scale of the Kummer argument.
    pub fn gauge_span(&self) -> Complex<T> {
        self.gauge_plus - self.gauge_minus
    }

    /// True when the cubic drive is absent.
    pub fn no_cubic(&self) -> bool {
        self.params.drive_cubic == Complex::new(T::zero(), T::zero())
    }
}

fn principal_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    // Fold a signed zero so that negative reals map to +i√|z|.
    Complex::new(z.re, z.im + T::zero()).sqrt()
}

/// Compute every derived constant. Runs [`Params::validate`] first.
pub fn derive<T: Real>(p: &Params<T>) -> Result<Derived<T>> {
    p.validate()?;
    let zero = Complex::new(T::zero(), T::zero());
    let one = T::one();
    let two = T::lit(2.0);
    let sqrt2 = T::SQRT_2();
    let kt = p.kerr_eff();
    let dt = p.detuning_eff();
    let (d, l1, l2, l3, ep, em, alpha);
    if p.drive_cubic == zero {
        d = dt * two / kt;
        l2 = p.drive_pair * two / kt;
        l1 = p.drive_linear * (two * sqrt2) / kt;
        l3 = zero;
        ep = Complex::new(T::zero(), one) * principal_sqrt(l2);
        em = -ep;
        alpha = zero;
    } else {
        let c3 = p.drive_cubic;
        let kc = kt.conj();
        let kabs2 = kt.norm_sqr();
        let c3abs2 = c3.norm_sqr();
        let ratio = kt / kc;
        d = (dt + kt.inv() * (c3abs2 * two)) * two / kt;
        l1 = c3 * sqrt2 / kabs2 * (kt.inv() * (T::lit(4.0) * c3abs2) + dt * two)
            + (p.drive_linear - p.drive_pair * c3.conj() / kt) * (two * sqrt2) / kt;
        l3 = c3 * (two * sqrt2) / kt * (Complex::new(one, T::zero()) - ratio);
        l2 = c3 * c3 * (two / kabs2) * (ratio - two) + p.drive_pair * two / kt;
        let disc = principal_sqrt(l3 * l3 - l2 * T::lit(4.0));
        let roots = [(l3 + disc) / two, (l3 - disc) / two];
        // Label ε+ by continuity with the cubic-free branch i√λ2'.
        let l2_ref = -(c3 * c3) * (two / kabs2) + p.drive_pair * two / kt;
        let reference = Complex::new(T::zero(), one) * principal_sqrt(l2_ref);
        let d0 = (roots[0] - reference).norm();
        let d1 = (roots[1] - reference).norm();
        let pick_first = if d0 == d1 { roots[0].im >= roots[1].im } else { d0 < d1 };
        let (a, b) = if pick_first { (roots[0], roots[1]) } else { (roots[1], roots[0]) };
        ep = a;
        em = b;
        alpha = c3 * sqrt2 / kc;
    }
    let span = ep - em;
    let scale = ep.norm().max(em.norm()).max(one);
    let numer = l1 + ep * d;
    let r1 = if span.norm() <= T::lit(1e-12) * scale {
        if ep.norm() <= T::lit(1e-14) {
            // Both roots vanish: bounded only when the source term vanishes too.
            if l1.norm() <= T::lit(1e-14) {
                Some(d / two)
            } else {
                None
            }
        } else if numer.norm() <= T::lit(1e-12) * scale {
            Some(zero)
        } else {
            return Err(KerrError::DegenerateGauge {
                eps_re: ep.re.to_f64().unwrap_or(f64::NAN),
                eps_im: ep.im.to_f64().unwrap_or(f64::NAN),
            });
        }
    } else {
        Some(numer / span)
    };
    Ok(Derived {
        params: *p,
        kerr_eff: kt,
        detuning_eff: dt,
        detuning_ratio: d,
        source: l1,
        pump: l2,
        shear: l3,
        gauge_plus: ep,
        gauge_minus: em,
        displacement: alpha,
        blockade_index: r1,
        resonance_index: d,
    })
}

/// Phase-diagram region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseKind {
    Generic,
    /// r1 = r2, neither integer: the dark state is a coherent state.
    PureCoherent,
    /// r1 = n0: the gauge-transformed state has at most n0 photons.
    Blockade(usize),
    /// r2 = m0: the gauge-transformed state has no population in 1..=m0.
    AntiBlockade(usize),
    /// (r1, r2) = (n1, n2) with n1 ≤ n2: a two-dimensional dark manifold.
    Bistable(usize, usize),
    /// (r1, r2) = (n1, n2) with n2 < n1, stored as (n2, n1): a band-limited state.
    MediumWindow(usize, usize),
}

/// Classification together with the distances used to reach it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseClass {
    pub kind: PhaseKind,
    /// Distance of r1 to the nearest nonnegative integer (∞ when r1 is unbounded).
    pub r1_residual: f64,
    /// Distance of r2 to the nearest nonnegative integer.
    pub r2_residual: f64,
}

/// Default classification tolerance for exactly specified parameter points.
pub const DEFAULT_CLASS_TOL: f64 = 1e-9;

/// Nearest nonnegative integer and the distance to it.
pub fn nearest_nonneg_integer<T: Real>(z: Complex<T>) -> (usize, f64) {
    let re = z.re.to_f64().unwrap_or(f64::NAN);
    let im = z.im.to_f64().unwrap_or(f64::NAN);
    let n = re.round().max(0.0);
    (n as usize, ((re - n).powi(2) + im * im).sqrt())
}

/// Place (r1, r2) on the phase diagram.
pub fn classify<T: Real>(d: &Derived<T>, tol: f64) -> PhaseClass {
    let (n2, res2) = nearest_nonneg_integer(d.resonance_index);
    let (n1, res1) = match d.blockade_index {
        Some(r1) => nearest_nonneg_integer(r1),
        None => (0, f64::INFINITY),
    };
    let int1 = res1 < tol;
    let int2 = res2 < tol;
    let kind = match (int1, int2) {
        (true, true) if n1 <= n2 => PhaseKind::Bistable(n1, n2),
        (true, true) => PhaseKind::MediumWindow(n2, n1),
        (true, false) => PhaseKind::Blockade(n1),
        (false, true) => PhaseKind::AntiBlockade(n2),
        (false, false) => {
            let same = d
                .blockade_index
                .map(|r1| (r1 - d.resonance_index).norm().to_f64().unwrap_or(f64::NAN) < tol)
                .unwrap_or(false);
            if same {
                PhaseKind::PureCoherent
            } else {
                PhaseKind::Generic
            }
        }
    };
    PhaseClass { kind, r1_residual: res1, r2_residual: res2 }
}

/// Classify a derived parameter set directly from (r1, r2) values; used by
/// the phase-diagram map and tests.
pub fn classify_indices(r1: num_complex::Complex64, r2: num_complex::Complex64, tol: f64) -> PhaseClass {
    let mut d = derive(&Params::<f64>::kerr_only(1.0)).expect("bare Kerr is valid");
    d.blockade_index = Some(r1);
    d.resonance_index = r2;
    classify(&d, tol)
}
