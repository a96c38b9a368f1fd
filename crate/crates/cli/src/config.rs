//! Run configuration: one JSON document drives every subcommand, so a run is
//! reproducible from its config alone. Unknown keys anywhere in the tree are
//! rejected, and every rejection carries the key path that caused it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use qwindow_core::profiles::DEFAULT_PROFILE_CAP;
use qwindow_core::{EtaProfile, ProfileKind, WindowNormalization};
use serde::Deserialize;

use crate::table::Format;

/// A fatal configuration problem, reported with the offending key path.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn at(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    #[serde(default)]
    pub quantum: QuantumConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Radii for the spot evaluations of the `brackets` command.
    #[serde(default)]
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    /// One of `zero`, `constant`, `interior_quadratic`, `damped_oscillatory`,
    /// `taylor_at_boundary`.
    pub variant: String,
    /// Variant-specific parameters; leftover entries are rejected.
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub rho_c: f64,
    /// Window normalization: `root-two` (default) or `unit`.
    #[serde(default)]
    pub normalization: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumConfig {
    pub l_min: u32,
    pub l_max: u32,
    /// Indicial branches to sweep (subset of {0, 1}).
    pub ks: Vec<u32>,
    /// Dimensionless energy Ē used by `classify` and `solve`.
    pub energy_bar: f64,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig {
            l_min: 0,
            l_max: 3,
            ks: vec![0, 1],
            energy_bar: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Determinant truncation order for `spectrum` / boundary-condition order
    /// for `eta-conditions`.
    pub truncation: usize,
    /// Series degree for `solve`.
    pub series_degree: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum tolerated relative discrepancy between the two coefficient
    /// routes in `--strict` mode.
    pub strict_tol: f64,
    /// ε range for `solve` (must exclude 0).
    pub range: [f64; 2],
    /// Number of grid points on the range.
    pub steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            truncation: 6,
            series_degree: 12,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            strict_tol: 1e-9,
            range: [0.85, 1.15],
            steps: 31,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub hbar: f64,
    pub mass: f64,
    pub units: Units,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            hbar: 1.0,
            mass: 1.0,
            units: Units::Natural,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// Significant digits for rendered numbers.
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: Format::Csv,
            path: None,
            precision: 12,
        }
    }
}

/// Parses the config document with key-path error reporting. Validation is
/// separate ([`RunConfig::validate`]) so command-line overrides can be applied
/// in between.
pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::at("config", format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| ConfigError::at(e.path().to_string(), e.inner().to_string()))
}

impl RunConfig {
    /// Applies command-line overrides: `--l` pins the l range to a single
    /// value, `--order` overrides both the determinant truncation and the
    /// series degree.
    pub fn apply_overrides(&mut self, l: Option<u32>, order: Option<usize>) {
        if let Some(l) = l {
            self.quantum.l_min = l;
            self.quantum.l_max = l;
        }
        if let Some(order) = order {
            self.solver.truncation = order;
            self.solver.series_degree = order;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let q = &self.quantum;
        if q.l_min > q.l_max {
            return Err(ConfigError::at(
                "quantum.l_min",
                format!("l_min {} exceeds l_max {}", q.l_min, q.l_max),
            ));
        }
        if q.ks.is_empty() {
            return Err(ConfigError::at("quantum.ks", "at least one branch is required"));
        }
        for &k in &q.ks {
            if k > 1 {
                return Err(ConfigError::at(
                    "quantum.ks",
                    format!("indicial branch must be 0 or 1, got {k}"),
                ));
            }
        }
        if !q.energy_bar.is_finite() {
            return Err(ConfigError::at("quantum.energy_bar", "must be finite"));
        }
        let s = &self.solver;
        let cap = DEFAULT_PROFILE_CAP - 3;
        if s.truncation > cap {
            return Err(ConfigError::at(
                "solver.truncation",
                format!("must be at most {cap} (derivative cap minus 3)"),
            ));
        }
        if s.series_degree > cap {
            return Err(ConfigError::at(
                "solver.series_degree",
                format!("must be at most {cap} (derivative cap minus 3)"),
            ));
        }
        for (name, v) in [
            ("solver.rel_tol", s.rel_tol),
            ("solver.abs_tol", s.abs_tol),
            ("solver.strict_tol", s.strict_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::at(name, format!("must be positive, got {v}")));
            }
        }
        if !(s.range[0].is_finite() && s.range[1].is_finite() && s.range[0] <= s.range[1]) {
            return Err(ConfigError::at(
                "solver.range",
                format!("must be an ordered pair, got [{}, {}]", s.range[0], s.range[1]),
            ));
        }
        if s.range[0] <= 0.0 {
            return Err(ConfigError::at(
                "solver.range",
                "must exclude ε = 0 (lower bound must be positive)",
            ));
        }
        if s.steps == 0 {
            return Err(ConfigError::at("solver.steps", "must be at least 1"));
        }
        let c = &self.constants;
        if !(c.hbar.is_finite() && c.hbar > 0.0) {
            return Err(ConfigError::at("constants.hbar", "must be positive"));
        }
        if !(c.mass.is_finite() && c.mass > 0.0) {
            return Err(ConfigError::at("constants.mass", "must be positive"));
        }
        let precision = self.output.precision;
        if !(1..=17).contains(&precision) {
            return Err(ConfigError::at(
                "output.precision",
                format!("significant digits must lie in 1..=17, got {precision}"),
            ));
        }
        if let Some(samples) = &self.samples {
            if samples.is_empty() {
                return Err(ConfigError::at("samples", "must not be empty when given"));
            }
            for (i, &r) in samples.iter().enumerate() {
                if !(r.is_finite() && r > 0.0) {
                    return Err(ConfigError::at(
                        format!("samples[{i}]"),
                        format!("radius must be positive, got {r}"),
                    ));
                }
            }
        }
        if !(self.profile.rho_c.is_finite() && self.profile.rho_c > 0.0) {
            return Err(ConfigError::at("profile.rho_c", "must be positive"));
        }
        // Surface variant/parameter problems during validation too.
        self.profile.build()?;
        self.profile.normalization()?;
        Ok(())
    }
}

fn take_f64(
    params: &mut BTreeMap<String, serde_json::Value>,
    key: &str,
) -> Result<f64, ConfigError> {
    let value = params
        .remove(key)
        .ok_or_else(|| ConfigError::at(format!("profile.parameters.{key}"), "missing parameter"))?;
    value.as_f64().ok_or_else(|| {
        ConfigError::at(
            format!("profile.parameters.{key}"),
            format!("expected a number, got {value}"),
        )
    })
}

fn take_f64_list(
    params: &mut BTreeMap<String, serde_json::Value>,
    key: &str,
) -> Result<Vec<f64>, ConfigError> {
    let value = params
        .remove(key)
        .ok_or_else(|| ConfigError::at(format!("profile.parameters.{key}"), "missing parameter"))?;
    let arr = value.as_array().ok_or_else(|| {
        ConfigError::at(
            format!("profile.parameters.{key}"),
            format!("expected an array of numbers, got {value}"),
        )
    })?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64().ok_or_else(|| {
                ConfigError::at(
                    format!("profile.parameters.{key}[{i}]"),
                    format!("expected a number, got {v}"),
                )
            })
        })
        .collect()
}

impl ProfileConfig {
    pub fn build(&self) -> Result<EtaProfile, ConfigError> {
        let mut params = self.parameters.clone();
        let kind = match self.variant.as_str() {
            "zero" => ProfileKind::Zero,
            "constant" => ProfileKind::Constant {
                value: take_f64(&mut params, "value")?,
            },
            "interior_quadratic" => ProfileKind::InteriorQuadratic {
                alpha: take_f64(&mut params, "alpha")?,
                beta: take_f64(&mut params, "beta")?,
            },
            "damped_oscillatory" => ProfileKind::DampedOscillatory {
                alpha: take_f64(&mut params, "alpha")?,
                beta: take_f64(&mut params, "beta")?,
            },
            "taylor_at_boundary" => ProfileKind::TaylorAtBoundary {
                coeffs: take_f64_list(&mut params, "coeffs")?,
            },
            other => {
                return Err(ConfigError::at(
                    "profile.variant",
                    format!(
                        "unknown variant `{other}` (expected zero, constant, \
                         interior_quadratic, damped_oscillatory, taylor_at_boundary)"
                    ),
                ))
            }
        };
        if let Some(key) = params.keys().next() {
            return Err(ConfigError::at(
                format!("profile.parameters.{key}"),
                format!("unknown parameter for variant `{}`", self.variant),
            ));
        }
        EtaProfile::new(kind, self.rho_c).map_err(|e| ConfigError::at("profile", e.to_string()))
    }

    pub fn normalization(&self) -> Result<WindowNormalization, ConfigError> {
        match self.normalization.as_deref() {
            None | Some("root-two") => Ok(WindowNormalization::RootTwo),
            Some("unit") => Ok(WindowNormalization::Unit),
            Some(other) => Err(ConfigError::at(
                "profile.normalization",
                format!("expected `root-two` or `unit`, got `{other}`"),
            )),
        }
    }
}
