//! Declarative run configuration.
//!
//! A run is described by one TOML file with nested sections; command-line
//! flags only override individual keys. Unknown keys are rejected so typos
//! surface as parse errors with the offending field named.
//!
//! ```toml
//! [value]
//! family = "quadratic"          # quadratic | polynomial | action-table | fig1-4action
//!
//! [density]
//! family = "uniform"            # uniform | triangular | rotation | tabulated
//!
//! [solver]
//! grid = 1001
//!
//! [output]
//! dir = "out"
//! ```

use crate::error::CliError;
use infomenu_core::comparative;
use infomenu_core::model::value::{value_from_actions, ActionPayoff};
use infomenu_core::solver::SolveOptions;
use infomenu_core::{BeliefDensity, ValueFunction};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub value: ValueConfig,
    pub density: DensityConfig,
    pub solver: SolverConfig,
    pub verify: VerifyConfig,
    pub oracle: OracleConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValueConfig {
    /// quadratic | polynomial | action-table | fig1-4action
    pub family: String,
    /// Ascending coefficients for the polynomial family.
    pub coefficients: Vec<f64>,
    /// `[u(a, l), u(a, h)]` rows for the action-table family.
    pub actions: Vec<[f64; 2]>,
}

impl Default for ValueConfig {
    fn default() -> Self {
        ValueConfig {
            family: "quadratic".to_owned(),
            coefficients: Vec::new(),
            actions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    /// uniform | triangular | rotation | tabulated
    pub family: String,
    /// Tilt of the rotation family (rotation of the uniform base).
    pub t: f64,
    /// Node grid for the tabulated family (must span [0, 1]).
    pub nodes: Vec<f64>,
    /// Density values at the nodes (normalized automatically).
    pub values: Vec<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            family: "uniform".to_owned(),
            t: 0.0,
            nodes: Vec::new(),
            values: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub grid: usize,
    pub threshold_tol: f64,
    pub foc_tol: f64,
    pub lambda_residual_tol: f64,
    pub lambda_bracket: [f64; 2],
    pub override_assumptions: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolveOptions::default();
        SolverConfig {
            grid: o.grid_size,
            threshold_tol: o.threshold_tol,
            foc_tol: o.foc_tol,
            lambda_residual_tol: o.lambda_residual_tol,
            lambda_bracket: [o.lambda_bracket.0, o.lambda_bracket.1],
            override_assumptions: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Belief grid for the global IC/IR check.
    pub grid: usize,
    pub ic_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: 2001,
            ic_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub types: usize,
    pub type_lo: f64,
    pub type_hi: f64,
    /// Noise grid step for the simple-experiment catalog.
    pub noise_step: f64,
    /// Posterior grid step for the three-signal extension.
    pub posterior_step: f64,
    pub budget: u64,
    pub restarts: usize,
    pub seed: u64,
    /// Accept local search when enumeration exceeds the budget.
    pub allow_fallback: bool,
    /// IC/IR tolerance for mechanism verification.
    pub ic_tol: f64,
    /// Revenue-gain tolerance for the three-signal check.
    pub gain_tol: f64,
    /// Dedicated (smaller) instance for the three-signal check.
    pub three_signal_types: usize,
    pub three_signal_lo: f64,
    pub three_signal_hi: f64,
    pub three_signal_noise: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            types: 21,
            type_lo: 0.05,
            type_hi: 0.95,
            noise_step: 0.1,
            posterior_step: 0.125,
            budget: 2_000_000,
            restarts: 64,
            seed: 7,
            allow_fallback: true,
            ic_tol: 1e-7,
            gain_tol: 1e-6,
            three_signal_types: 7,
            three_signal_lo: 0.1,
            three_signal_hi: 0.9,
            three_signal_noise: vec![1.0 / 3.0, 2.0 / 3.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Rotation tilts, solved in ascending order.
    pub t_values: Vec<f64>,
    /// Belief probes for the per-type monotonicity checks.
    pub probes: Vec<f64>,
    /// Slack for the weak monotonicity comparisons.
    pub slack: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            t_values: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            probes: vec![0.1, 0.2, 0.8, 0.9],
            slack: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
        }
    }
}

/// Command-line overrides of individual config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub override_assumptions: bool,
}

impl RunConfig {
    /// Parse a config file, apply overrides, and validate.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(out) = &overrides.out {
            self.output.dir = out.clone();
        }
        if let Some(grid) = overrides.grid {
            self.solver.grid = grid;
            self.verify.grid = grid;
        }
        if let Some(tol) = overrides.tol {
            self.verify.ic_tol = tol;
            self.oracle.ic_tol = tol;
            self.oracle.gain_tol = tol;
        }
        if let Some(seed) = overrides.seed {
            self.oracle.seed = seed;
        }
        if overrides.override_assumptions {
            self.solver.override_assumptions = true;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("solver.threshold_tol", self.solver.threshold_tol),
            ("solver.foc_tol", self.solver.foc_tol),
            ("solver.lambda_residual_tol", self.solver.lambda_residual_tol),
            ("verify.ic_tol", self.verify.ic_tol),
            ("oracle.ic_tol", self.oracle.ic_tol),
            ("oracle.gain_tol", self.oracle.gain_tol),
            ("sweep.slack", self.sweep.slack),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(CliError::input(format!(
                    "{name} must be > 0 (got {v})"
                )));
            }
        }
        for (name, g) in [("solver.grid", self.solver.grid), ("verify.grid", self.verify.grid)] {
            if g < 64 {
                return Err(CliError::input(format!("{name} must be >= 64 (got {g})")));
            }
        }
        if !(self.solver.lambda_bracket[0] > 0.0
            && self.solver.lambda_bracket[0] < self.solver.lambda_bracket[1]
            && self.solver.lambda_bracket[1] < 1.0)
        {
            return Err(CliError::input(
                "solver.lambda_bracket must satisfy 0 < lo < hi < 1".to_owned(),
            ));
        }
        // families must be resolvable
        self.build_value()?;
        self.build_density()?;
        Ok(())
    }

    pub fn build_value(&self) -> Result<ValueFunction, CliError> {
        match self.value.family.as_str() {
            "quadratic" => Ok(ValueFunction::quadratic()),
            "polynomial" => {
                if self.value.coefficients.is_empty() {
                    return Err(CliError::input(
                        "value.coefficients required for the polynomial family",
                    ));
                }
                Ok(ValueFunction::polynomial(self.value.coefficients.clone())?)
            }
            "action-table" => {
                if self.value.actions.is_empty() {
                    return Err(CliError::input(
                        "value.actions required for the action-table family",
                    ));
                }
                let actions = self
                    .value
                    .actions
                    .iter()
                    .map(|&[low, high]| ActionPayoff { low, high })
                    .collect();
                Ok(value_from_actions(actions)?)
            }
            "fig1-4action" => Ok(fig1_value()),
            other => Err(CliError::input(format!(
                "value.family '{other}' is not one of quadratic | polynomial | action-table | fig1-4action"
            ))),
        }
    }

    pub fn build_density(&self) -> Result<BeliefDensity, CliError> {
        match self.density.family.as_str() {
            "uniform" => Ok(BeliefDensity::uniform()),
            "triangular" => Ok(BeliefDensity::triangular()),
            "rotation" => Ok(comparative::rotation_density(
                &BeliefDensity::uniform(),
                self.density.t,
            )?),
            "tabulated" => {
                if self.density.nodes.is_empty() {
                    return Err(CliError::input(
                        "density.nodes/values required for the tabulated family",
                    ));
                }
                Ok(BeliefDensity::tabulated(
                    self.density.nodes.clone(),
                    self.density.values.clone(),
                )?)
            }
            other => Err(CliError::input(format!(
                "density.family '{other}' is not one of uniform | triangular | rotation | tabulated"
            ))),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            grid_size: self.solver.grid,
            threshold_tol: self.solver.threshold_tol,
            foc_tol: self.solver.foc_tol,
            lambda_residual_tol: self.solver.lambda_residual_tol,
            lambda_bracket: (self.solver.lambda_bracket[0], self.solver.lambda_bracket[1]),
            override_assumptions: self.solver.override_assumptions,
        }
    }
}

/// Built-in symmetric four-action decision problem with kinks at 0.15, 0.5,
/// and 0.85: steep outer actions, shallow inner ones.
pub fn fig1_value() -> ValueFunction {
    value_from_actions(vec![
        ActionPayoff { low: 0.0, high: -1.0 },
        ActionPayoff { low: -0.075, high: -0.575 },
        ActionPayoff { low: -0.575, high: -0.075 },
        ActionPayoff { low: -1.0, high: 0.0 },
    ])
    .expect("static table")
}
