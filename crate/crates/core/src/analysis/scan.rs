//! One-parameter sweeps.

use super::{complex_cells, complex_columns, error_cell, real_cell, Tabular};
use crate::cqa::solve;
use crate::model::{classify, derive, PhaseKind, DEFAULT_CLASS_TOL};
use crate::oracle::{semiclassical_fixed_points, steady_state_adaptive};
use crate::{KerrError, PhysicalParams, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Straight path through one parameter, from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", deny_unknown_fields)]
pub enum ScanAxis {
    Lambda1 {
        start: C64,
        end: C64,
    },
    Delta {
        start: f64,
        end: f64,
    },
    #[serde(rename = "kappa1")]
    Kappa1 {
        start: f64,
        end: f64,
    },
    Lambda2 {
        start: C64,
        end: C64,
    },
    Lambda3 {
        start: C64,
        end: C64,
    },
}

impl ScanAxis {
    pub fn name(&self) -> &'static str {
        match self {
            ScanAxis::Lambda1 { .. } => "Lambda1",
            ScanAxis::Delta { .. } => "Delta",
            ScanAxis::Kappa1 { .. } => "kappa1",
            ScanAxis::Lambda2 { .. } => "Lambda2",
            ScanAxis::Lambda3 { .. } => "Lambda3",
        }
    }

    fn ends(&self) -> (C64, C64) {
        let r = |x: f64| C64::new(x, 0.0);
        match *self {
            ScanAxis::Lambda1 { start, end } | ScanAxis::Lambda2 { start, end } | ScanAxis::Lambda3 { start, end } => {
                (start, end)
            }
            ScanAxis::Delta { start, end } | ScanAxis::Kappa1 { start, end } => (r(start), r(end)),
        }
    }

    /// Parameter value at point `i` of `points`.
    pub fn value(&self, i: usize, points: usize) -> C64 {
        let (a, b) = self.ends();
        if points <= 1 {
            return a;
        }
        let t = i as f64 / (points - 1) as f64;
        a + (b - a) * t
    }

    /// Distance travelled along the path at point `i`.
    pub fn position(&self, i: usize, points: usize) -> f64 {
        (self.value(i, points) - self.ends().0).norm()
    }

    /// `p0` with the scanned parameter replaced.
    pub fn apply(&self, p0: &PhysicalParams, v: C64) -> PhysicalParams {
        let mut p = *p0;
        match self {
            ScanAxis::Lambda1 { .. } => p.drive_linear = v,
            ScanAxis::Delta { .. } => p.detuning = v.re,
            ScanAxis::Kappa1 { .. } => p.loss_single = v.re,
            ScanAxis::Lambda2 { .. } => p.drive_pair = v,
            ScanAxis::Lambda3 { .. } => p.drive_cubic = v,
        }
        p
    }
}

fn default_oracle_every() -> usize {
    16
}
fn default_oracle_cutoff() -> usize {
    30
}
fn default_true() -> bool {
    true
}

/// What to compute at each point besides the CQA photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanOptions {
    /// Run the Lindblad oracle.
    #[serde(default)]
    pub oracle: bool,
    /// With `oracle`, run it on every `oracle_every`-th point only.
    #[serde(default = "default_oracle_every")]
    pub oracle_every: usize,
    /// Starting cutoff of the adaptive oracle.
    #[serde(default = "default_oracle_cutoff")]
    pub oracle_cutoff: usize,
    /// Number of lab-frame Fock probabilities to record (0 for none).
    #[serde(default)]
    pub fock_levels: usize,
    /// Record the stable mean-field branches.
    #[serde(default = "default_true")]
    pub classical: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            oracle: false,
            oracle_every: default_oracle_every(),
            oracle_cutoff: default_oracle_cutoff(),
            fock_levels: 0,
            classical: true,
        }
    }
}

/// One scan point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub index: usize,
    /// Distance from the start of the path.
    pub position: f64,
    pub axis_value: C64,
    pub params: PhysicalParams,
    pub r1: Option<C64>,
    pub r2: Option<C64>,
    pub class: Option<PhaseKind>,
    /// ⟨n⟩ from the exact solution.
    pub mean_n: Option<f64>,
    /// ⟨n⟩ from the Lindblad steady state, when sampled.
    pub mean_n_oracle: Option<f64>,
    pub fock_probs: Vec<f64>,
    /// `|α|²` of each stable mean-field amplitude, ascending.
    pub classical_branches: Vec<f64>,
    pub error: Option<String>,
    pub oracle_error: Option<String>,
}

/// Widest list of classical branches written to CSV.
const BRANCH_COLUMNS: usize = 3;

impl ScanRow {
    /// Header for rows recorded with `fock_levels` Fock probabilities.
    pub fn columns_for(fock_levels: usize) -> Vec<String> {
        let mut c: Vec<String> = vec!["index".into(), "position".into()];
        c.extend(complex_columns("axis"));
        c.extend(complex_columns("r1"));
        c.extend(complex_columns("r2"));
        c.extend(["class".into(), "mean_n".into(), "mean_n_oracle".into()]);
        c.extend((0..fock_levels).map(|m| format!("p{m}")));
        c.extend((0..BRANCH_COLUMNS).map(|j| format!("branch{j}")));
        c.extend(["error".into(), "oracle_error".into()]);
        c
    }
}

impl Tabular for ScanRow {
    /// Header without Fock columns; see [`ScanRow::columns_for`].
    fn columns() -> Vec<String> {
        Self::columns_for(0)
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![self.index.to_string(), real_cell(Some(self.position))];
        c.extend(complex_cells(Some(self.axis_value)));
        c.extend(complex_cells(self.r1));
        c.extend(complex_cells(self.r2));
        c.push(self.class.map(|k| format!("{k:?}")).unwrap_or_default());
        c.push(real_cell(self.mean_n));
        c.push(real_cell(self.mean_n_oracle));
        c.extend(self.fock_probs.iter().map(|&x| real_cell(Some(x))));
        c.extend((0..BRANCH_COLUMNS).map(|j| real_cell(self.classical_branches.get(j).copied())));
        c.push(self.error.clone().unwrap_or_default());
        c.push(self.oracle_error.clone().unwrap_or_default());
        c
    }
}

/// Ordered rows of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub points: usize,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Rows whose exact solution failed.
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn evaluate(p0: &PhysicalParams, axis: &ScanAxis, i: usize, points: usize, opts: &ScanOptions) -> ScanRow {
    let v = axis.value(i, points);
    let p = axis.apply(p0, v);
    let mut row = ScanRow {
        index: i,
        position: axis.position(i, points),
        axis_value: v,
        params: p,
        r1: None,
        r2: None,
        class: None,
        mean_n: None,
        mean_n_oracle: None,
        fock_probs: Vec::new(),
        classical_branches: Vec::new(),
        error: None,
        oracle_error: None,
    };
    let mut exact = || -> Result<()> {
        let d = derive(&p)?;
        row.r1 = d.blockade_index;
        row.r2 = Some(d.resonance_index);
        row.class = Some(classify(&d, DEFAULT_CLASS_TOL).kind);
        let cache = solve(&p)?.lab_amplitudes()?;
        row.mean_n = Some(cache.mean_photon_number()?);
        for m in 0..opts.fock_levels {
            let prob = if m < cache.len() { cache.rho_element(m, m)?.re } else { 0.0 };
            row.fock_probs.push(prob);
        }
        Ok(())
    };
    if let Err(e) = exact() {
        row.error = Some(error_cell(&e));
        row.fock_probs.resize(opts.fock_levels, f64::NAN);
    }
    if opts.oracle && i.is_multiple_of(opts.oracle_every.max(1)) {
        match steady_state_adaptive(&p, opts.oracle_cutoff) {
            Ok(rho) => row.mean_n_oracle = Some(rho.mean_photon_number()),
            Err(e) => row.oracle_error = Some(error_cell(&e)),
        }
    }
    if opts.classical {
        let fp = semiclassical_fixed_points(&p);
        let mut n: Vec<f64> = fp.stable_amplitudes().iter().map(|a| a.norm_sqr()).collect();
        n.sort_by(f64::total_cmp);
        row.classical_branches = n;
    }
    row
}

/// Sweep `points` values along `axis`, handing each row to `sink` in index
/// order as soon as its batch is done.
pub fn scan_with<F>(
    p0: &PhysicalParams,
    axis: &ScanAxis,
    points: usize,
    opts: &ScanOptions,
    mut sink: F,
) -> Result<ScanResult>
where
    F: FnMut(&ScanRow),
{
    if points == 0 {
        return Err(KerrError::Config("scan needs at least one point".into()));
    }
    let batch = 2 * rayon::current_num_threads().max(1);
    let mut rows = Vec::with_capacity(points);
    let mut lo = 0;
    while lo < points {
        let hi = (lo + batch).min(points);
        let done: Vec<ScanRow> = (lo..hi).into_par_iter().map(|i| evaluate(p0, axis, i, points, opts)).collect();
        for r in done {
            sink(&r);
            rows.push(r);
        }
        lo = hi;
    }
    Ok(ScanResult { axis: *axis, points, rows })
}

/// Sweep without streaming.
pub fn scan(p0: &PhysicalParams, axis: &ScanAxis, points: usize, opts: &ScanOptions) -> Result<ScanResult> {
    scan_with(p0, axis, points, opts, |_| {})
}

/// Full width of the deepest dip of `values` at twice its minimum, with
/// linear interpolation between samples. `None` if the dip is not enclosed.
pub fn dip_full_width(positions: &[f64], values: &[f64]) -> Option<f64> {
    let (imin, &vmin) = values.iter().enumerate().filter(|(_, v)| v.is_finite()).min_by(|a, b| a.1.total_cmp(b.1))?;
    let level = 2.0 * vmin;
    let cross = |i: usize, j: usize| {
        let (x0, x1, y0, y1) = (positions[i], positions[j], values[i], values[j]);
        x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    };
    let left = (0..imin).rev().find(|&i| values[i] >= level).map(|i| cross(i + 1, i))?;
    let right = (imin + 1..values.len()).find(|&i| values[i] >= level).map(|i| cross(i - 1, i))?;
    Some(right - left)
}
