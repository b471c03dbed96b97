use super::{finite_coefficients, CoreSource, DarkState, FrameEquation, StateForm};
use crate::model::{classify, PhaseKind, DEFAULT_CLASS_TOL};
use crate::{DerivedParams, KerrError, Result, C64};

/// Largest distance of (r1, r2) from (n1, n2) accepted as "near".
pub const NEAR_RADIUS: f64 = 0.1;

/// Ratio c_{n2+1}/c_{n1} picked up across the gap, with the small factors
/// δr1/δr2 removed: 1 on the diagonal, −Π (m − n1)/(m − n2) over n1 < m < n2 otherwise.
fn gap_factor(n1: usize, n2: usize) -> C64 {
    if n1 == n2 {
        return C64::new(1.0, 0.0);
    }
    let mut g = -1.0;
    for m in n1 + 1..n2 {
        g *= (m as f64 - n1 as f64) / (m as f64 - n2 as f64);
    }
    C64::new(g, 0.0)
}

/// The pair at the lattice point itself: (r1, r2) snapped to (n1, n2), with
/// the frame equation adjusted to match so that both engines agree.
fn pair_members(d: &DerivedParams, n1: usize, n2: usize) -> (DarkState, DarkState) {
    let r1 = C64::new(n1 as f64, 0.0);
    let r2 = C64::new(n2 as f64, 0.0);
    let span = d.gauge_span();
    let mut equation = FrameEquation::from_derived(d);
    equation.detuning_ratio = r2;
    if span != C64::new(0.0, 0.0) {
        equation.source = r1 * span - d.gauge_plus * r2;
    }
    let base = DarkState {
        params: d.params,
        displacement: d.displacement,
        gauge: d.gauge_plus,
        gauge_span: span,
        form: StateForm::BistablePair,
        core: CoreSource::Coherent,
        equation,
    };
    let low = finite_coefficients(r1, r2, 0, n1);
    let last = *low.last().expect("nonempty");
    let mut first = base.clone();
    first.core = CoreSource::Finite { start: 0, coeffs: low };
    let mut second = base;
    second.core = if span == C64::new(0.0, 0.0) {
        CoreSource::Taylor { start: n2 + 1 }
    } else {
        CoreSource::Series { r1, r2, start: n2 + 1, first: last * gap_factor(n1, n2) }
    };
    (first, second)
}

/// The two dark states spanning the bistable manifold at (r1, r2) = (n1, n2):
/// a blockade branch with coefficients up to `c_{n1}` and a shifted branch
/// starting at `c_{n2+1}`.
pub fn bistable_pair(d: &DerivedParams, n1: usize, n2: usize) -> Result<(DarkState, DarkState)> {
    let cls = classify(d, DEFAULT_CLASS_TOL);
    if cls.kind != PhaseKind::Bistable(n1, n2) {
        return Err(KerrError::NotBistable(format!("classified as {:?}", cls.kind)));
    }
    Ok(pair_members(d, n1, n2))
}

/// First-order dark state near a bistable point.
#[derive(Debug, Clone)]
pub struct NearBistable {
    /// ψ1 + (δr1/δr2) ψ2.
    pub state: DarkState,
    /// δr1/δr2.
    pub ratio: C64,
    /// Superposition parameter of `(1+Q) e^{−εz} + (1−Q) e^{εz}`, for (0, 0) only.
    pub q: Option<C64>,
}

/// Superposition of the bistable pair selected by a small offset from (n1, n2).
pub fn near_bistable_state(d: &DerivedParams, n1: usize, n2: usize) -> Result<NearBistable> {
    if n1 > n2 {
        return Err(KerrError::NotNearBistable("requires n1 ≤ n2".into()));
    }
    let r1 = d.blockade_index.ok_or_else(|| KerrError::NotNearBistable("r1 is unbounded".into()))?;
    let dr1 = r1 - C64::new(n1 as f64, 0.0);
    let dr2 = d.resonance_index - C64::new(n2 as f64, 0.0);
    if dr1.norm() >= NEAR_RADIUS || dr2.norm() >= NEAR_RADIUS {
        return Err(KerrError::NotNearBistable(format!(
            "|δr1| = {:.3e}, |δr2| = {:.3e} (limit {NEAR_RADIUS})",
            dr1.norm(),
            dr2.norm()
        )));
    }
    if dr2 == C64::new(0.0, 0.0) {
        return Err(KerrError::NotNearBistable("r2 sits exactly on the integer".into()));
    }
    let ratio = dr1 / dr2;
    let (first, second) = pair_members(d, n1, n2);
    let mut state = first.clone();
    state.core = CoreSource::Superposition { first: Box::new(first), second: Box::new(second), weight: ratio };
    let q = if n1 == 0 && n2 == 0 { Some(q_parameter(d)) } else { None };
    Ok(NearBistable { state, ratio, q })
}

/// `Q = 1 − 2 δr1/δr2` near (0, 0); without the cubic drive this is the
/// rational expression `−λ1 / (ε+ D)`.
pub fn q_parameter(d: &DerivedParams) -> C64 {
    if d.no_cubic() && d.gauge_plus != C64::new(0.0, 0.0) {
        return -d.source / (d.gauge_plus * d.detuning_ratio);
    }
    let r1 = d.blockade_index.unwrap_or(C64::new(f64::NAN, f64::NAN));
    C64::new(1.0, 0.0) - r1 * 2.0 / d.resonance_index
}
