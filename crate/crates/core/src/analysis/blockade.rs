//! Blockade locations. Both r1 (in Λ1) and r2 (in Δ) are affine in the
//! parameter being tuned, so two evaluations fix the inverse exactly.

use crate::model::derive;
use crate::{DerivedParams, KerrError, PhysicalParams, Result, C64};

/// Value `x` with `index(set(p0, x)) = target`, assuming `index` is affine in `x`.
pub fn invert_affine<S, I>(p0: &PhysicalParams, set: S, index: I, target: C64) -> Result<C64>
where
    S: Fn(&mut PhysicalParams, C64),
    I: Fn(&DerivedParams) -> Option<C64>,
{
    let eval = |x: C64| -> Result<C64> {
        let mut p = *p0;
        set(&mut p, x);
        index(&derive(&p)?).ok_or_else(|| KerrError::InversionFailure("index is unbounded".into()))
    };
    let at0 = eval(C64::new(0.0, 0.0))?;
    let slope = eval(C64::new(1.0, 0.0))? - at0;
    if slope.norm() <= 1e-14 * (1.0 + at0.norm()) {
        return Err(KerrError::InversionFailure("index does not depend on the tuned parameter".into()));
    }
    Ok((target - at0) / slope)
}

/// Λ1 values placing r1 on 0, 1, ..., `n_max`.
///
/// Without a cubic drive these are `Λ1⁽⁰⁾ + i n √(K̃Λ2)` with
/// `Λ1⁽⁰⁾ = −i Δ̃ √Λ2 K̃^{−1/2}` (square roots on the branch of the gauge root);
/// with a cubic drive the spacing follows from the same affine inversion.
pub fn locate_blockade_points(p0: &PhysicalParams, n_max: usize) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    if p0.drive_pair == zero && p0.drive_cubic == zero {
        return Err(KerrError::WrongRegime("blockade points need Lambda2 or Lambda3 nonzero".into()));
    }
    let set = |p: &mut PhysicalParams, x: C64| p.drive_linear = x;
    let index = |d: &DerivedParams| d.blockade_index;
    (0..=n_max).map(|n| invert_affine(p0, set, index, C64::new(n as f64, 0.0))).collect()
}
