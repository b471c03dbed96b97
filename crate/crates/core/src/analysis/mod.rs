//! Data tables built on the exact solutions and the oracle.
//!
//! Every report is a list of plain rows. Rows implement [`Tabular`] so that
//! the CLI can stream them to CSV as they are produced. Per-point failures are
//! stored in the row and never abort a sweep.

mod blockade;
mod reports;
mod scan;

pub use blockade::{invert_affine, locate_blockade_points};
pub use reports::{
    metastability_report, parity_report, phase_diagram, recipe_params, MetastabilityOptions, MetastabilityRow,
    ParityRow, PhaseCell, PhaseDiagramSpec,
};
pub use scan::{dip_full_width, scan, scan_with, ScanAxis, ScanOptions, ScanResult, ScanRow};

use crate::{KerrError, C64};
use std::io::Write;

/// A row that can be written as one CSV record.
pub trait Tabular {
    /// Column names; complex quantities appear as `name_re`, `name_im`.
    fn columns() -> Vec<String>;
    /// Cells in column order.
    fn cells(&self) -> Vec<String>;
}

/// Real number with 17 significant digits; empty when absent.
pub fn real_cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

/// Complex number as two cells.
pub fn complex_cells(z: Option<C64>) -> [String; 2] {
    [real_cell(z.map(|z| z.re)), real_cell(z.map(|z| z.im))]
}

/// `name_re`, `name_im`.
pub fn complex_columns(name: &str) -> [String; 2] {
    [format!("{name}_re"), format!("{name}_im")]
}

/// Short text for a failed point: `Code: message`.
pub fn error_cell(e: &KerrError) -> String {
    format!("{}: {}", e.code(), e)
}

/// Row-by-row CSV writer. Comment lines (prefixed with `# `) go first, then
/// the header. Every record is flushed so partial output survives a crash.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W, comments: &[String], columns: &[String]) -> std::io::Result<Self> {
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(columns)?;
        writer.flush()?;
        Ok(Self { writer })
    }

    pub fn push<R: Tabular>(&mut self, row: &R) -> std::io::Result<()> {
        self.writer.write_record(row.cells())?;
        self.writer.flush()
    }

    pub fn into_inner(self) -> std::io::Result<W> {
        self.writer.into_inner().map_err(|e| e.into_error())
    }
}

/// Write a whole table at once.
pub fn write_table<W: Write, R: Tabular>(out: W, comments: &[String], rows: &[R]) -> std::io::Result<W> {
    let mut sink = CsvSink::new(out, comments, &R::columns())?;
    for r in rows {
        sink.push(r)?;
    }
    sink.into_inner()
}
