//! Run configuration: one JSON object per invocation.

use crate::analysis::{PhaseDiagramSpec, ScanAxis, ScanOptions};
use crate::phase_space::PhaseGrid;
use crate::{KerrError, PhysicalParams, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Subcommand names as they appear on the command line and in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Derive,
    Solve,
    Wigner,
    Scan,
    Spectrum,
    Metastable,
    Parity,
    PhaseDiagram,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Derive => "derive",
            CommandKind::Solve => "solve",
            CommandKind::Wigner => "wigner",
            CommandKind::Scan => "scan",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Metastable => "metastable",
            CommandKind::Parity => "parity",
            CommandKind::PhaseDiagram => "phase-diagram",
        }
    }

    /// Keys accepted besides the common ones.
    fn extra_keys(self) -> &'static [&'static str] {
        match self {
            CommandKind::Derive | CommandKind::Solve => &[],
            CommandKind::Wigner => &["grid", "function"],
            CommandKind::Scan => &["axis", "points", "scan"],
            CommandKind::Spectrum => &["eigenvalues"],
            CommandKind::Metastable => &["n", "kappa1_values", "eigenvalues"],
            CommandKind::Parity => &["detunings"],
            CommandKind::PhaseDiagram => &["phase_diagram"],
        }
    }
}

const COMMON_KEYS: [&str; 5] = ["params", "command", "cutoff", "tol", "oracle"];

/// Grid bounds and sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny)
    }
}

/// Quasi-probability written by `wigner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseFunction {
    /// Wigner function of the physical cavity.
    #[default]
    Wigner,
    /// Husimi function of the pure collective-mode state.
    Husimi,
}

/// Everything a run needs. Command-specific fields are optional here and
/// checked by [`RunConfig::parse`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysicalParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    /// Fock cutoff (highest level kept) for density matrices and the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    /// Distance to an integer below which r1, r2 count as integers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Cross-check with the Lindblad oracle.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<PhaseFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<ScanAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detunings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_diagram: Option<PhaseDiagramSpec>,
}

fn missing(key: &str, cmd: CommandKind) -> KerrError {
    KerrError::Config(format!("`{}` requires the `{key}` key", cmd.name()))
}

impl RunConfig {
    /// Parse and validate the JSON text for `cmd`. Keys that `cmd` does not
    /// use are rejected, as are keys no command uses.
    pub fn parse(text: &str, cmd: CommandKind) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| KerrError::Config(format!("invalid JSON: {e}")))?;
        let obj = value.as_object().ok_or_else(|| KerrError::Config("config must be a JSON object".into()))?;
        for key in obj.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !cmd.extra_keys().contains(&key.as_str()) {
                return Err(KerrError::Config(format!("unknown key `{key}` for `{}`", cmd.name())));
            }
        }
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| KerrError::Config(e.to_string()))?;
        if let Some(c) = cfg.command {
            if c != cmd {
                return Err(KerrError::Config(format!("config is for `{}`, not `{}`", c.name(), cmd.name())));
            }
        }
        cfg.check(cmd)?;
        Ok(cfg)
    }

    fn check(&self, cmd: CommandKind) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(KerrError::Config(format!("tol must be positive, got {t}")));
            }
        }
        if self.cutoff == Some(0) {
            return Err(KerrError::Config("cutoff must be at least 1".into()));
        }
        match cmd {
            CommandKind::Wigner => {
                self.grid.ok_or_else(|| missing("grid", cmd))?.build()?;
            }
            CommandKind::Scan => {
                self.axis.ok_or_else(|| missing("axis", cmd))?;
                if self.points.ok_or_else(|| missing("points", cmd))? == 0 {
                    return Err(KerrError::Config("points must be at least 1".into()));
                }
            }
            CommandKind::Spectrum | CommandKind::Metastable => {
                if matches!(self.eigenvalues, Some(k) if k < 2) {
                    return Err(KerrError::Config("eigenvalues must be at least 2".into()));
                }
                if cmd == CommandKind::Metastable {
                    self.n.ok_or_else(|| missing("n", cmd))?;
                    let ks = self.kappa1_values.as_ref().ok_or_else(|| missing("kappa1_values", cmd))?;
                    if ks.is_empty() || ks.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
                        return Err(KerrError::Config(
                            "kappa1_values must be a nonempty list of positive numbers".into(),
                        ));
                    }
                }
            }
            CommandKind::Parity => {
                let ds = self.detunings.as_ref().ok_or_else(|| missing("detunings", cmd))?;
                if ds.is_empty() || ds.iter().any(|d| !d.is_finite()) {
                    return Err(KerrError::Config("detunings must be a nonempty list of finite numbers".into()));
                }
            }
            CommandKind::PhaseDiagram => {
                self.phase_diagram.ok_or_else(|| missing("phase_diagram", cmd))?;
            }
            CommandKind::Derive | CommandKind::Solve => {}
        }
        Ok(())
    }
}
