//! Metastability, parity-regime and phase-diagram tables.

use super::blockade::invert_affine;
use super::{complex_cells, complex_columns, error_cell, real_cell, Tabular};
use crate::cqa::{bistable_pair, parity_solve};
use crate::fock::cat_vector;
use crate::model::{classify, derive, PhaseKind, DEFAULT_CLASS_TOL};
use crate::oracle::{
    build_liouvillian, coherent_basis, projection_onto, semiclassical_fixed_points, slow_mode_projection, spectrum,
};
use crate::{DarkState, DerivedParams, KerrError, PhysicalParams, Result, TruncatedDensityMatrix, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------- metastability

fn default_meta_cutoff() -> usize {
    50
}
fn default_meta_eigenvalues() -> usize {
    6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetastabilityOptions {
    /// Fock cutoff of the Liouvillian.
    #[serde(default = "default_meta_cutoff")]
    pub cutoff: usize,
    /// Eigenvalues requested from the spectrum.
    #[serde(default = "default_meta_eigenvalues")]
    pub eigenvalues: usize,
}

impl Default for MetastabilityOptions {
    fn default() -> Self {
        Self { cutoff: default_meta_cutoff(), eigenvalues: default_meta_eigenvalues() }
    }
}

/// Decay rates and slow-mode quality at one one-photon loss rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetastabilityRow {
    pub kappa1: f64,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    /// γ2/γ1.
    pub gap_ratio: Option<f64>,
    /// κ1/γ1.
    pub loss_over_gamma1: Option<f64>,
    /// 1 − P with the exact bistable operators.
    pub infidelity_bistable: Option<f64>,
    /// 1 − P with operators built from the stable mean-field coherent states.
    pub infidelity_coherent: Option<f64>,
    pub coherent_amplitudes: Vec<C64>,
    pub error: Option<String>,
}

impl Tabular for MetastabilityRow {
    fn columns() -> Vec<String> {
        [
            "kappa1",
            "gamma1",
            "gamma2",
            "gap_ratio",
            "kappa1_over_gamma1",
            "one_minus_p_bistable",
            "one_minus_p_coherent",
            "coherent_states",
            "error",
        ]
        .map(String::from)
        .to_vec()
    }

    fn cells(&self) -> Vec<String> {
        vec![
            real_cell(Some(self.kappa1)),
            real_cell(self.gamma1),
            real_cell(self.gamma2),
            real_cell(self.gap_ratio),
            real_cell(self.loss_over_gamma1),
            real_cell(self.infidelity_bistable),
            real_cell(self.infidelity_coherent),
            self.coherent_amplitudes.len().to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Parameters of the metastable recipe: `Δ = nK/2` and `Λ1 = −i(n/2)√(Λ2K)`,
/// which put the lossless model at (r1, r2) = (0, n).
pub fn recipe_params(p0: &PhysicalParams, n: usize, kappa1: f64) -> PhysicalParams {
    let half = n as f64 / 2.0;
    let mut p = *p0;
    p.detuning = half * p0.kerr;
    p.drive_linear = C64::new(0.0, -half) * (p0.drive_pair * p0.kerr).sqrt();
    p.loss_single = kappa1;
    p
}

fn metastability_row(
    p: &PhysicalParams,
    pair: (&DarkState, &DarkState),
    opts: &MetastabilityOptions,
) -> MetastabilityRow {
    let mut row = MetastabilityRow {
        kappa1: p.loss_single,
        gamma1: None,
        gamma2: None,
        gap_ratio: None,
        loss_over_gamma1: None,
        infidelity_bistable: None,
        infidelity_coherent: None,
        coherent_amplitudes: semiclassical_fixed_points(p).stable_amplitudes(),
        error: None,
    };
    let mut fill = || -> Result<()> {
        let l = build_liouvillian(p, opts.cutoff)?;
        let rep = spectrum(&l, opts.eigenvalues.max(2))?;
        if rep.rates.len() < 2 {
            return Err(KerrError::ConvergenceFailure(format!("only {} decay rates found", rep.rates.len())));
        }
        let (g1, g2) = (rep.rates[0], rep.rates[1]);
        row.gamma1 = Some(g1);
        row.gamma2 = Some(g2);
        row.gap_ratio = Some(g2 / g1);
        row.loss_over_gamma1 = Some(p.loss_single / g1);
        row.infidelity_bistable = Some(1.0 - slow_mode_projection(&rep, pair)?.value);
        let slow = rep.slow_mode.as_ref().ok_or_else(|| KerrError::ConvergenceFailure("no slow mode".into()))?;
        let basis = coherent_basis(&row.coherent_amplitudes, l.levels());
        row.infidelity_coherent = Some(1.0 - projection_onto(slow, &basis)?.value);
        Ok(())
    };
    if let Err(e) = fill() {
        row.error = Some(error_cell(&e));
    }
    row
}

/// Slowest decay rates and slow-mode projections along a one-photon loss sweep
/// of the metastable recipe (see [`recipe_params`]). `p0` supplies K and Λ2.
pub fn metastability_report(
    p0: &PhysicalParams,
    n: usize,
    kappa1_values: &[f64],
    opts: &MetastabilityOptions,
) -> Result<Vec<MetastabilityRow>> {
    let zero = C64::new(0.0, 0.0);
    if p0.loss_pair != 0.0 || p0.drive_cubic != zero || p0.drive_pair == zero {
        return Err(KerrError::WrongRegime("metastable recipe needs Lambda2 != 0 and kappa2 = Lambda3 = 0".into()));
    }
    if kappa1_values.iter().any(|&k| k.is_nan() || k <= 0.0) {
        return Err(KerrError::Config("kappa1 values must be positive".into()));
    }
    let lossless = derive(&recipe_params(p0, n, 0.0))?;
    let (first, second) = bistable_pair(&lossless, 0, n)?;
    Ok(kappa1_values
        .par_iter()
        .map(|&k| metastability_row(&recipe_params(p0, n, k), (&first, &second), opts))
        .collect())
}

// ---------------------------------------------------------------- parity

/// Fidelities of the extremal parity states at one detuning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityRow {
    pub detuning: f64,
    /// Cat amplitude `i√(λ2/2)`.
    pub cat_amplitude: Option<C64>,
    /// ⟨cat+|ρe|cat+⟩.
    pub even_cat: Option<f64>,
    /// ⟨0|ρe|0⟩.
    pub even_vacuum: Option<f64>,
    /// ⟨cat−|ρo|cat−⟩.
    pub odd_cat: Option<f64>,
    /// ⟨1|ρo|1⟩.
    pub odd_one: Option<f64>,
    /// Uhlmann fidelity of ρe with the even cat (equal to `even_cat` for a pure target).
    pub even_cat_uhlmann: Option<f64>,
    /// Tr[Π ρe] and Tr[Π ρo].
    pub parity_even: Option<f64>,
    pub parity_odd: Option<f64>,
    /// N in closed form and as the direct amplitude sum.
    pub norm_closed: Option<f64>,
    pub norm_sum: Option<f64>,
    pub error: Option<String>,
}

impl Tabular for ParityRow {
    fn columns() -> Vec<String> {
        let mut c = vec!["detuning".to_string()];
        c.extend(complex_columns("cat_amplitude"));
        c.extend(
            [
                "f_even_cat",
                "f_even_vacuum",
                "f_odd_cat",
                "f_odd_one",
                "uhlmann_even_cat",
                "parity_even",
                "parity_odd",
                "norm_closed",
                "norm_sum",
                "error",
            ]
            .map(String::from),
        );
        c
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![real_cell(Some(self.detuning))];
        c.extend(complex_cells(self.cat_amplitude));
        c.extend(
            [
                self.even_cat,
                self.even_vacuum,
                self.odd_cat,
                self.odd_one,
                self.even_cat_uhlmann,
                self.parity_even,
                self.parity_odd,
                self.norm_closed,
                self.norm_sum,
            ]
            .map(real_cell),
        );
        c.push(self.error.clone().unwrap_or_default());
        c
    }
}

fn parity_expectation(rho: &TruncatedDensityMatrix) -> f64 {
    rho.populations().iter().enumerate().map(|(m, &x)| if m % 2 == 0 { x } else { -x }).sum()
}

fn parity_row(p: &PhysicalParams) -> ParityRow {
    let mut row = ParityRow {
        detuning: p.detuning,
        cat_amplitude: None,
        even_cat: None,
        even_vacuum: None,
        odd_cat: None,
        odd_one: None,
        even_cat_uhlmann: None,
        parity_even: None,
        parity_odd: None,
        norm_closed: None,
        norm_sum: None,
        error: None,
    };
    let mut fill = || -> Result<()> {
        let d = derive(p)?;
        let beta = C64::new(0.0, 1.0) * (d.pump * 0.5).sqrt();
        row.cat_amplitude = Some(beta);
        let sol = parity_solve(p)?;
        // Cats are compared on enough levels to hold both the state and the cat.
        let dim = sol.rho_even.dim().max(sol.rho_odd.dim()).max((beta.norm_sqr() * 4.0) as usize + 40);
        let even = sol.rho_even.resized(dim);
        let odd = sol.rho_odd.resized(dim);
        let cat_even = cat_vector(beta, 1.0, dim);
        let cat_odd = cat_vector(beta, -1.0, dim);
        let fock = |k: usize| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[k] = C64::new(1.0, 0.0);
            v
        };
        row.even_cat = Some(even.fidelity_with_pure(&cat_even));
        row.even_vacuum = Some(even.fidelity_with_pure(&fock(0)));
        row.odd_cat = Some(odd.fidelity_with_pure(&cat_odd));
        row.odd_one = Some(odd.fidelity_with_pure(&fock(1)));
        row.even_cat_uhlmann = Some(even.uhlmann_fidelity(&TruncatedDensityMatrix::from_pure(&cat_even)));
        row.parity_even = Some(parity_expectation(&sol.rho_even));
        row.parity_odd = Some(parity_expectation(&sol.rho_odd));
        row.norm_closed = Some(sol.norm);
        row.norm_sum = Some(sol.state.amplitudes()?.norm());
        Ok(())
    };
    if let Err(e) = fill() {
        row.error = Some(error_cell(&e));
    }
    row
}

/// Cat and Fock-state fidelities of the two extremal steady states of the
/// parity-conserving regime, one row per detuning.
pub fn parity_report(p0: &PhysicalParams, detunings: &[f64]) -> Result<Vec<ParityRow>> {
    let zero = C64::new(0.0, 0.0);
    if p0.loss_single != 0.0
        || p0.drive_linear != zero
        || p0.drive_cubic != zero
        || p0.loss_pair.is_nan()
        || p0.loss_pair <= 0.0
    {
        return Err(KerrError::WrongRegime("parity report needs kappa1 = Lambda1 = Lambda3 = 0 and kappa2 > 0".into()));
    }
    Ok(detunings
        .par_iter()
        .map(|&delta| {
            let mut p = *p0;
            p.detuning = delta;
            parity_row(&p)
        })
        .collect())
}

// ---------------------------------------------------------------- phase diagram

/// Rectangle of target (r1, r2) values, both real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramSpec {
    pub r1_min: f64,
    pub r1_max: f64,
    pub r2_min: f64,
    pub r2_max: f64,
    /// Cells along r1.
    pub n_r1: usize,
    /// Cells along r2.
    pub n_r2: usize,
}

impl PhaseDiagramSpec {
    fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.r1_min, self.r1_max, self.r2_min, self.r2_max].iter().all(|x| x.is_finite());
        if !finite || self.n_r1 == 0 || self.n_r2 == 0 {
            return Err(KerrError::Config("phase diagram needs finite ranges and at least one cell per axis".into()));
        }
        Ok(())
    }
}

/// One phase-diagram cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCell {
    pub r1_target: f64,
    pub r2_target: f64,
    /// Inverted detuning.
    pub detuning: Option<f64>,
    /// Inverted one-photon drive.
    pub drive_linear: Option<C64>,
    pub kind: Option<PhaseKind>,
    pub error: Option<String>,
}

impl Tabular for PhaseCell {
    fn columns() -> Vec<String> {
        let mut c = vec!["r1".to_string(), "r2".to_string(), "Delta".to_string()];
        c.extend(complex_columns("Lambda1"));
        c.extend(["class".to_string(), "error".to_string()]);
        c
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![real_cell(Some(self.r1_target)), real_cell(Some(self.r2_target)), real_cell(self.detuning)];
        c.extend(complex_cells(self.drive_linear));
        c.push(self.kind.map(|k| format!("{k:?}")).unwrap_or_default());
        c.push(self.error.clone().unwrap_or_default());
        c
    }
}

fn phase_cell(p0: &PhysicalParams, r1: f64, r2: f64) -> PhaseCell {
    let mut cell =
        PhaseCell { r1_target: r1, r2_target: r2, detuning: None, drive_linear: None, kind: None, error: None };
    let mut fill = || -> Result<()> {
        let delta = invert_affine(
            p0,
            |p, x| p.detuning = x.re,
            |d: &DerivedParams| Some(d.resonance_index),
            C64::new(r2, 0.0),
        )?;
        if delta.im.abs() > 1e-12 * (1.0 + delta.re.abs()) {
            return Err(KerrError::InversionFailure(format!("r2 = {r2} needs a complex detuning {delta}")));
        }
        let mut p = *p0;
        p.detuning = delta.re;
        cell.detuning = Some(delta.re);
        let drive =
            invert_affine(&p, |q, x| q.drive_linear = x, |d: &DerivedParams| d.blockade_index, C64::new(r1, 0.0))?;
        p.drive_linear = drive;
        cell.drive_linear = Some(drive);
        cell.kind = Some(classify(&derive(&p)?, DEFAULT_CLASS_TOL).kind);
        Ok(())
    };
    if let Err(e) = fill() {
        cell.error = Some(error_cell(&e));
    }
    cell
}

/// Classify a grid of (r1, r2) targets. The detuning is solved from r2, then
/// Λ1 from r1; every other parameter is taken from `p0`. Cells are ordered
/// with r1 varying fastest.
pub fn phase_diagram(p0: &PhysicalParams, spec: &PhaseDiagramSpec) -> Result<Vec<PhaseCell>> {
    spec.validate()?;
    p0.validate()?;
    let cells: Vec<(f64, f64)> = (0..spec.n_r2)
        .flat_map(|j| {
            let r2 = PhaseDiagramSpec::axis(spec.r2_min, spec.r2_max, spec.n_r2, j);
            (0..spec.n_r1).map(move |i| (PhaseDiagramSpec::axis(spec.r1_min, spec.r1_max, spec.n_r1, i), r2))
        })
        .collect();
    Ok(cells.par_iter().map(|&(r1, r2)| phase_cell(p0, r1, r2)).collect())
}
