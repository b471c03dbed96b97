//! Subcommand bodies. Each writes its files and returns `Ok` or a [`CliError`].

use super::config::{CommandKind, PhaseFunction, RunConfig};
use super::CliError;
use crate::analysis::{
    complex_cells, complex_columns, metastability_report, parity_report, phase_diagram, real_cell, scan_with, CsvSink,
    MetastabilityOptions, PhaseDiagramSpec, ScanOptions, ScanRow, Tabular,
};
use crate::cqa::{near_bistable_state, solve_dark_state, solve_finite_kernel};
use crate::model::{classify, derive, DEFAULT_CLASS_TOL};
use crate::oracle::{build_liouvillian, spectrum, steady_state_adaptive};
use crate::phase_space::{q_function, wigner_numeric, wigner_pure};
use crate::{DarkState, DerivedParams, KerrError, PhaseClass, C64};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Oracle starting cutoff when none is configured.
const ORACLE_CUTOFF: usize = 30;
/// Liouvillian cutoff for `spectrum` when none is configured.
const SPECTRUM_CUTOFF: usize = 40;
const SPECTRUM_EIGENVALUES: usize = 6;
/// Physical population left outside `rho.csv` when the cutoff is automatic.
const RHO_TAIL: f64 = 1e-14;

pub(super) fn dispatch(cfg: &RunConfig, resolved: &str, out: &Path) -> Result<(), CliError> {
    let run = Run { cfg, resolved, out };
    match cfg.command.expect("set by the caller") {
        CommandKind::Derive => run.derive(),
        CommandKind::Solve => run.solve(),
        CommandKind::Wigner => run.wigner(),
        CommandKind::Scan => run.scan(),
        CommandKind::Spectrum => run.spectrum(),
        CommandKind::Metastable => run.metastable(),
        CommandKind::Parity => run.parity(),
        CommandKind::PhaseDiagram => run.phase_diagram(),
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    resolved: &'a str,
    out: &'a Path,
}

/// Dark state for `solve` and `wigner`, with the constants when they exist.
struct Solved {
    derived: Option<DerivedParams>,
    class: Option<PhaseClass>,
    state: DarkState,
}

fn no_rows(what: &str) -> CliError {
    CliError { code: "NoRows".into(), message: format!("no {what} row succeeded"), exit_code: 3 }
}

impl Run<'_> {
    fn tol(&self) -> f64 {
        self.cfg.tol.unwrap_or(DEFAULT_CLASS_TOL)
    }

    fn config_value(&self) -> Value {
        serde_json::from_str(self.resolved).expect("resolved config is JSON")
    }

    fn comments(&self) -> Vec<String> {
        vec![format!("config: {}", self.resolved)]
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.out.join(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| CliError::io(&format!("cannot create {}", path.display()), e))
    }

    fn write_json(&self, name: &str, body: Value) -> Result<(), CliError> {
        let mut doc = json!({ "config": self.config_value() });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let mut f = self.create(name)?;
        serde_json::to_writer_pretty(&mut f, &doc).expect("values serialize");
        writeln!(f).and_then(|_| f.flush()).map_err(|e| CliError::io(name, e))
    }

    fn summary(&self, file: &str, rows: usize, failures: usize, extra: Value) -> Result<(), CliError> {
        let mut body = json!({ "output": file, "rows": rows, "failures": failures });
        if let (Value::Object(b), Value::Object(x)) = (&mut body, extra) {
            b.extend(x);
        }
        self.write_json("summary.json", body)
    }

    fn sink(&self, name: &str, columns: &[String]) -> Result<CsvSink<BufWriter<File>>, CliError> {
        CsvSink::new(self.create(name)?, &self.comments(), columns).map_err(|e| CliError::io(name, e))
    }

    /// Evaluate `chunk` on successive slices of `items`, writing each batch
    /// of rows before starting the next. Returns (rows, failures).
    fn stream<X, R, F, B>(
        &self,
        name: &str,
        items: &[X],
        chunk: usize,
        eval: F,
        failed: B,
    ) -> Result<(usize, usize), CliError>
    where
        R: Tabular,
        F: Fn(&[X]) -> crate::Result<Vec<R>>,
        B: Fn(&R) -> bool,
    {
        let mut sink = self.sink(name, &R::columns())?;
        let (mut rows, mut failures) = (0, 0);
        for part in items.chunks(chunk.max(1)) {
            for r in eval(part)? {
                sink.push(&r).map_err(|e| CliError::io(name, e))?;
                rows += 1;
                failures += usize::from(failed(&r));
            }
        }
        Ok((rows, failures))
    }

    fn solved(&self) -> Result<Solved, CliError> {
        let p = &self.cfg.params;
        match derive(p) {
            Ok(d) => {
                let cls = classify(&d, self.tol());
                let state = solve_dark_state(&d, &cls)?;
                Ok(Solved { derived: Some(d), class: Some(cls), state })
            }
            // Without Kerr or two-photon loss the constants diverge, but a
            // finite kernel may still exist.
            Err(KerrError::DegenerateKerr) => match solve_finite_kernel(p) {
                Ok(state) => Ok(Solved { derived: None, class: None, state }),
                Err(_) => Err(KerrError::DegenerateKerr.into()),
            },
            Err(e) => Err(e.into()),
        }
    }

    fn derive(&self) -> Result<(), CliError> {
        let d = derive(&self.cfg.params)?;
        let cls = classify(&d, self.tol());
        self.write_json("derived.json", json!({ "derived": d, "class": cls }))
    }

    fn solve(&self) -> Result<(), CliError> {
        let s = self.solved()?;
        let cache = s.state.lab_amplitudes()?;
        let dim = match self.cfg.cutoff {
            Some(c) => c + 1,
            None => cache.physical_support(RHO_TAIL).max(2),
        };
        let rho = cache.density_matrix(dim)?;
        let mean_n = cache.mean_photon_number()?;
        let oracle = if self.cfg.oracle {
            let o = steady_state_adaptive(&self.cfg.params, self.cfg.cutoff.unwrap_or(ORACLE_CUTOFF))?;
            let exact = cache.density_matrix(o.dim())?;
            json!({
                "cutoff": o.dim() - 1,
                "mean_n": o.mean_photon_number(),
                "mean_n_relative_difference": (o.mean_photon_number() - mean_n).abs() / mean_n.abs().max(f64::MIN_POSITIVE),
                "hs_distance": o.hs_distance(&exact),
            })
        } else {
            Value::Null
        };
        let mut f = self.create("rho.csv")?;
        write_rho(&mut f, &self.comments(), &rho).map_err(|e| CliError::io("rho.csv", e))?;
        self.write_json(
            "state.json",
            json!({
                "derived": s.derived,
                "class": s.class,
                "form": s.state.form,
                "displacement": s.state.displacement,
                "mean_n": mean_n,
                "fock_probs": rho.populations(),
                "cutoff": rho.dim() - 1,
                "oracle": oracle,
            }),
        )
    }

    fn wigner(&self) -> Result<(), CliError> {
        let spec = self.cfg.grid.expect("checked by parse");
        let grid = spec.build()?;
        let function = self.cfg.function.unwrap_or_default();
        let mut notes = Vec::new();
        let values = match (function, self.cfg.oracle) {
            (PhaseFunction::Wigner, false) => {
                notes.push("path: closed-form".to_string());
                wigner_pure(&self.solved()?.state, &grid)?
            }
            (PhaseFunction::Husimi, false) => {
                notes.push("path: closed-form (collective mode)".to_string());
                q_function(&self.solved()?.state, &grid)?
            }
            (PhaseFunction::Wigner, true) => {
                let rho = steady_state_adaptive(&self.cfg.params, self.cfg.cutoff.unwrap_or(ORACLE_CUTOFF))?;
                notes.push(format!("path: numeric (oracle steady state, cutoff {})", rho.dim() - 1));
                wigner_numeric(&rho, &grid)?
            }
            (PhaseFunction::Husimi, true) => {
                return Err(KerrError::Config("the collective-mode Husimi function has no oracle path".into()).into())
            }
        };
        notes.push(format!("function: {}", if function == PhaseFunction::Wigner { "wigner" } else { "husimi" }));
        if let Ok(d) = derive(&self.cfg.params) {
            if let Ok(Some(q)) = near_bistable_state(&d, 0, 0).map(|nb| nb.q) {
                notes.push(format!("Q: {:.16e} {:.16e}", q.re, q.im));
            }
        }
        notes.extend(self.comments());
        let name = if function == PhaseFunction::Wigner { "wigner.dat" } else { "husimi.dat" };
        let mut f = self.create(name)?;
        values.write_text(&mut f, &notes).and_then(|_| f.flush()).map_err(|e| CliError::io(name, e))
    }

    fn scan(&self) -> Result<(), CliError> {
        let axis = self.cfg.axis.expect("checked by parse");
        let points = self.cfg.points.expect("checked by parse");
        let mut opts = self.cfg.scan.unwrap_or_default();
        opts.oracle |= self.cfg.oracle;
        if let Some(c) = self.cfg.cutoff {
            opts.oracle_cutoff = c;
        }
        let opts: ScanOptions = opts;
        let mut sink = self.sink("scan.csv", &ScanRow::columns_for(opts.fock_levels))?;
        let mut write_err = None;
        let result = scan_with(&self.cfg.params, &axis, points, &opts, |row| {
            if write_err.is_none() {
                write_err = sink.push(row).err();
            }
        })?;
        if let Some(e) = write_err {
            return Err(CliError::io("scan.csv", e));
        }
        let failures = result.failures();
        self.summary("scan.csv", result.rows.len(), failures, json!({}))?;
        if failures == result.rows.len() {
            return Err(no_rows("scan"));
        }
        Ok(())
    }

    fn spectrum(&self) -> Result<(), CliError> {
        let cutoff = self.cfg.cutoff.unwrap_or(SPECTRUM_CUTOFF);
        let l = build_liouvillian(&self.cfg.params, cutoff)?;
        let report = spectrum(&l, self.cfg.eigenvalues.unwrap_or(SPECTRUM_EIGENVALUES))?;
        let rows: Vec<SpectrumRow> = report
            .eigenvalues
            .iter()
            .zip(&report.rates)
            .enumerate()
            .map(|(index, (&eigenvalue, &rate))| SpectrumRow { index, eigenvalue, rate })
            .collect();
        let mut sink = self.sink("spectrum.csv", &SpectrumRow::columns())?;
        for r in &rows {
            sink.push(r).map_err(|e| CliError::io("spectrum.csv", e))?;
        }
        self.summary(
            "spectrum.csv",
            rows.len(),
            0,
            json!({
                "cutoff": report.cutoff,
                "gap_ratio": report.gap_ratio(),
                "shift": report.shift,
                "restarts": report.restarts,
            }),
        )?;
        if rows.is_empty() {
            return Err(no_rows("spectrum"));
        }
        Ok(())
    }

    fn metastable(&self) -> Result<(), CliError> {
        let n = self.cfg.n.expect("checked by parse");
        let kappas = self.cfg.kappa1_values.as_deref().expect("checked by parse");
        let mut opts = MetastabilityOptions::default();
        if let Some(c) = self.cfg.cutoff {
            opts.cutoff = c;
        }
        if let Some(k) = self.cfg.eigenvalues {
            opts.eigenvalues = k;
        }
        let threads = rayon::current_num_threads();
        let (rows, failures) = self.stream(
            "metastable.csv",
            kappas,
            threads,
            |ks| metastability_report(&self.cfg.params, n, ks, &opts),
            |r| r.error.is_some(),
        )?;
        self.summary("metastable.csv", rows, failures, json!({ "n": n }))?;
        if failures == rows {
            return Err(no_rows("metastable"));
        }
        Ok(())
    }

    fn parity(&self) -> Result<(), CliError> {
        let detunings = self.cfg.detunings.as_deref().expect("checked by parse");
        let threads = rayon::current_num_threads();
        let (rows, failures) = self.stream(
            "parity.csv",
            detunings,
            threads,
            |ds| parity_report(&self.cfg.params, ds),
            |r| r.error.is_some(),
        )?;
        self.summary("parity.csv", rows, failures, json!({}))?;
        if failures == rows {
            return Err(no_rows("parity"));
        }
        Ok(())
    }

    fn phase_diagram(&self) -> Result<(), CliError> {
        let spec = self.cfg.phase_diagram.expect("checked by parse");
        // One r2 line per batch, so finished lines are on disk.
        let lines: Vec<PhaseDiagramSpec> = (0..spec.n_r2.max(1))
            .map(|j| {
                let r2 = if spec.n_r2 <= 1 {
                    spec.r2_min
                } else {
                    spec.r2_min + (spec.r2_max - spec.r2_min) * j as f64 / (spec.n_r2 - 1) as f64
                };
                PhaseDiagramSpec { r2_min: r2, r2_max: r2, n_r2: 1, ..spec }
            })
            .collect();
        let (rows, failures) = self.stream(
            "phase_diagram.csv",
            &lines,
            1,
            |line| phase_diagram(&self.cfg.params, &line[0]),
            |c| c.error.is_some(),
        )?;
        self.summary("phase_diagram.csv", rows, failures, json!({}))?;
        if failures == rows {
            return Err(no_rows("phase-diagram"));
        }
        Ok(())
    }
}

/// One eigenvalue of the Lindblad generator.
#[derive(Debug, Clone, Serialize)]
struct SpectrumRow {
    index: usize,
    eigenvalue: C64,
    rate: f64,
}

impl Tabular for SpectrumRow {
    fn columns() -> Vec<String> {
        let mut c = vec!["index".to_string()];
        c.extend(complex_columns("eigenvalue"));
        c.push("rate".into());
        c
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![self.index.to_string()];
        c.extend(complex_cells(Some(self.eigenvalue)));
        c.push(real_cell(Some(self.rate)));
        c
    }
}

/// Density matrix as CSV: row index `m`, then `re_n, im_n` for each column `n`.
fn write_rho<W: Write>(out: &mut W, comments: &[String], rho: &crate::TruncatedDensityMatrix) -> std::io::Result<()> {
    let dim = rho.dim();
    let mut columns = vec!["m".to_string()];
    for n in 0..dim {
        columns.extend(complex_columns(&n.to_string()));
    }
    let mut sink = CsvSink::new(out, comments, &columns)?;
    for m in 0..dim {
        sink.push(&RhoRow { m, values: (0..dim).map(|n| rho.get(m, n)).collect() })?;
    }
    sink.into_inner()?.flush()
}

struct RhoRow {
    m: usize,
    values: Vec<C64>,
}

impl Tabular for RhoRow {
    fn columns() -> Vec<String> {
        vec!["m".into()]
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![self.m.to_string()];
        c.extend(self.values.iter().flat_map(|&z| complex_cells(Some(z))));
        c
    }
}
