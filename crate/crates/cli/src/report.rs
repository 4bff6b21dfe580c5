//! Typed JSON reports, one per command.
//!
//! Every report carries the tool version and the resolved config, so each
//! numeric field is traceable to the run that produced it. Wall-clock timings
//! are deliberately kept out of these files (they go to `run.log`) so reruns
//! of identical configs are byte-identical.

use crate::config::RunConfig;
use infomenu_core::assumptions::{AssumptionReport, GateReport, HScanReport};
use infomenu_core::comparative::{DispersionPivot, MonotoneReport};
use infomenu_core::oracle::{DiscreteMechanism, IcIrReport, PatternReport, ThreeSignalReport};
use infomenu_core::solver::{FlatPriceOptimum, ThresholdSet};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub thresholds: ThresholdSet,
    pub revenue: f64,
    pub grid_points: usize,
    pub assumptions: GateReport,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub rows: usize,
    pub ic: IcIrReport,
    pub assumptions: Vec<AssumptionReport>,
    /// Revenue recomputed from the CSV rows by quadrature.
    pub revenue_from_csv: f64,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct ClosedFormComparison {
    pub restricted_revenue: f64,
    pub oracle_revenue: f64,
    pub relative_gap: f64,
    pub restriction_feasible: bool,
    pub worst_restriction_violation: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub type_count: usize,
    pub catalog_size: usize,
    pub mu0: f64,
    pub mu0_source: String,
    pub mechanism: DiscreteMechanism,
    pub ic: IcIrReport,
    pub pattern: PatternReport,
    pub three_signal: ThreeSignalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ClosedFormComparison>,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct MemberSummary {
    pub t: f64,
    pub thresholds: ThresholdSet,
    pub revenue: f64,
    pub pivot: DispersionPivot,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub members: Vec<MemberSummary>,
    pub thresholds_monotone: MonotoneReport,
    pub blackwell_monotone: MonotoneReport,
    pub surplus_monotone: MonotoneReport,
    /// Definition-order verdicts between consecutive members.
    pub dispersion_order: Vec<bool>,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct FlatReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub flat: FlatPriceOptimum,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub menu_revenue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominance_margin: Option<f64>,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct AssumptionsReport {
    pub version: &'static str,
    pub command: &'static str,
    pub pass: bool,
    pub reports: Vec<AssumptionReport>,
    pub h_scans: Vec<HScanReport>,
    pub config: RunConfig,
}
