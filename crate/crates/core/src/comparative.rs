//! Dispersive order on symmetric belief densities and comparative statics of
//! the optimal menu.
//!
//! A density `f` is more dispersed than `g` when, below the critical point
//! `mu-_g`, `f(mu)/(0.5 - F(mu)) >= g(mu)/(0.5 - G(mu))`. The critical point
//! is defined by `g(mu) + G(mu) - 0.5 = 0`; that equation can lack a root in
//! `(0, 1/2)` (the uniform density is the basic example), in which case the
//! threshold form `g(mu) mu + G(mu) - 0.5 = 0` — the full-revelation edge at
//! a symmetric multiplier — is used instead. Both candidate pivots are
//! reported so the discrepancy stays visible.
//!
//! The rotation family tilts a symmetric base density linearly around the
//! pivot pair `(c, 1-c)` with `c` the base's `mu-` at multiplier 1/2: mass
//! moves from the center to the tails at rate `t`, preserving symmetry and
//! total mass exactly.

use crate::error::Error;
use crate::model::density::{BeliefDensity, PiecewiseLinearDensity};
use crate::model::experiment::{Orientation, SimpleExperiment};
use crate::model::value::ValueFunction;
use crate::numeric::{bisect, linspace, merge_grid};
use crate::solver::{self, OptimalMenu, SolveOptions};
use serde::{Deserialize, Serialize};

/// Candidate critical points of a symmetric density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPivot {
    /// Root of `g(mu) + G(mu) - 0.5 = 0`, when it exists in (0, 1/2).
    pub printed_root: Option<f64>,
    /// Root of `g(mu) mu + G(mu) - 0.5 = 0` (always exists).
    pub threshold_root: f64,
    /// The pivot actually used by the order check.
    pub used: f64,
}

/// Both critical-point candidates for a symmetric density.
pub fn dispersion_pivot(g: &BeliefDensity) -> Result<DispersionPivot, Error> {
    if !g.is_symmetric() {
        return Err(Error::invalid(
            "dispersion pivot",
            "density must be symmetric",
        ));
    }
    let printed_root = bisect(|mu| g.density(mu) + g.cdf(mu) - 0.5, 1e-9, 0.5, 1e-13).ok();
    let threshold_root = bisect(|mu| g.density(mu) * mu + g.cdf(mu) - 0.5, 1e-9, 0.5, 1e-13)
        .map_err(|e| Error::ThresholdNotFound {
            equation: "g(mu)mu + G(mu) - 0.5 = 0",
            lo: e.lo,
            hi: e.hi,
            flo: e.flo,
            fhi: e.fhi,
        })?;
    let used = printed_root.unwrap_or(threshold_root);
    Ok(DispersionPivot {
        printed_root,
        threshold_root,
        used,
    })
}

/// Whether `f` is more dispersed than `g` (both symmetric).
///
/// Checks `f(mu)/(0.5-F(mu)) >= g(mu)/(0.5-G(mu)) - 1e-10` on a 512-point
/// grid of `(0, mu-_g)`.
pub fn is_more_dispersed(f: &BeliefDensity, g: &BeliefDensity) -> Result<bool, Error> {
    if !f.is_symmetric() || !g.is_symmetric() {
        return Err(Error::invalid(
            "dispersive order",
            "both densities must be symmetric",
        ));
    }
    let pivot = dispersion_pivot(g)?.used;
    let grid = linspace(0.0, pivot, 514);
    for &mu in &grid[1..grid.len() - 1] {
        let rf = f.density(mu) / (0.5 - f.cdf(mu));
        let rg = g.density(mu) / (0.5 - g.cdf(mu));
        if rf < rg - 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest rotation magnitude keeping the tilted density nonnegative.
pub fn max_rotation(base: &BeliefDensity) -> Result<f64, Error> {
    let (nodes, tilt) = rotation_nodes(base)?;
    let mut t_max = f64::INFINITY;
    for (&x, &r) in nodes.iter().zip(tilt.iter()) {
        if r < 0.0 {
            t_max = t_max.min(base.density(x) / -r);
        }
    }
    Ok(t_max)
}

/// Tilt the base density by `t` around its critical pair.
///
/// The tilt is piecewise linear, vanishes at the pivots `(c, 1-c)`, moves
/// mass toward the tails, and integrates to zero on each half, so the result
/// stays a symmetric probability density; `t` beyond feasibility is a domain
/// error naming the largest usable value.
pub fn rotation_density(base: &BeliefDensity, t: f64) -> Result<BeliefDensity, Error> {
    if !base.is_symmetric() {
        return Err(Error::invalid("rotation", "base density must be symmetric"));
    }
    if t < 0.0 {
        return Err(Error::invalid("rotation", "t must be >= 0"));
    }
    let t_max = max_rotation(base)?;
    if t > t_max {
        return Err(Error::invalid(
            "rotation",
            format!("t = {t} exceeds the largest feasible tilt {t_max:.6}"),
        ));
    }
    let (nodes, tilt) = rotation_nodes(base)?;
    let values: Vec<f64> = nodes
        .iter()
        .zip(tilt.iter())
        .map(|(&x, &r)| (base.density(x) + t * r).max(0.0))
        .collect();
    let pwl = PiecewiseLinearDensity::new(nodes, values)?;
    Ok(BeliefDensity::labeled(
        format!("{}+rotation({t})", base.label()),
        pwl,
        true,
    ))
}

/// Node grid and unit tilt for the rotation of a symmetric base.
///
/// Left half: slope `-alpha` on `[0, c]`, slope `-beta` on `[c, 1/2]` with
/// `alpha c^2 = beta (1/2 - c)^2` so each side of the pivot moves equal mass;
/// right half mirrored. `alpha` is normalized to 1.
fn rotation_nodes(base: &BeliefDensity) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let c = solver::solve_thresholds(base, 0.5, 1e-12)?.mu_minus;
    let beta = c * c / ((0.5 - c) * (0.5 - c));
    let left = |mu: f64| {
        if mu <= c {
            c - mu
        } else {
            beta * (c - mu)
        }
    };
    let tilt = |mu: f64| {
        if mu <= 0.5 {
            left(mu)
        } else {
            left(1.0 - mu)
        }
    };
    let nodes = merge_grid(
        base.piecewise().nodes(),
        &[0.0, c, 0.5, 1.0 - c, 1.0],
    );
    let values: Vec<f64> = nodes.iter().map(|&x| tilt(x)).collect();
    Ok((nodes, values))
}

/// The rotation family at the requested tilts, sorted by `t`.
pub fn rotation_family(
    base: &BeliefDensity,
    ts: &[f64],
) -> Result<Vec<(f64, BeliefDensity)>, Error> {
    let mut ts = ts.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.iter()
        .map(|&t| Ok((t, rotation_density(base, t)?)))
        .collect()
}

/// Blackwell comparison of two simple experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlackwellOrder {
    Dominates,
    Dominated,
    Equivalent,
    Incomparable,
}

/// Order simple experiments by informativeness: full dominates everything,
/// null is dominated by everything, same-orientation experiments order by
/// noise, and interior experiments of opposite orientation are incomparable.
pub fn blackwell_compare(e1: SimpleExperiment, e2: SimpleExperiment) -> BlackwellOrder {
    use Orientation::*;
    let a = e1.canonical();
    let b = e2.canonical();
    match (a.orientation, b.orientation) {
        (Full, Full) | (Null, Null) => BlackwellOrder::Equivalent,
        (Full, _) | (_, Null) => BlackwellOrder::Dominates,
        (_, Full) | (Null, _) => BlackwellOrder::Dominated,
        (RevealL, RevealL) | (RevealH, RevealH) => {
            if (a.noise - b.noise).abs() <= 1e-12 {
                BlackwellOrder::Equivalent
            } else if a.noise > b.noise {
                BlackwellOrder::Dominates
            } else {
                BlackwellOrder::Dominated
            }
        }
        _ => BlackwellOrder::Incomparable,
    }
}

/// One solved member of a density family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub t: f64,
    pub density: BeliefDensity,
    pub menu: OptimalMenu,
}

/// Solve the menu for every family member.
pub fn solve_family(
    v: &ValueFunction,
    family: &[(f64, BeliefDensity)],
    opts: &SolveOptions,
) -> Result<Vec<FamilyMember>, Error> {
    family
        .iter()
        .map(|(t, density)| {
            let menu = solver::build_menu(v, density, opts)?;
            Ok(FamilyMember {
                t: *t,
                density: density.clone(),
                menu,
            })
        })
        .collect()
}

/// A single monotonicity failure across consecutive family members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFailure {
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<f64>,
    pub what: String,
    pub amount: f64,
}

/// Verdict of a comparative-statics scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub slack: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<MonotoneFailure>,
}

impl MonotoneReport {
    fn new(slack: f64) -> Self {
        MonotoneReport {
            pass: true,
            slack,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, failure: MonotoneFailure) {
        if !ok {
            self.pass = false;
            self.failures.push(failure);
        }
    }
}

/// More dispersion must widen both the full-revelation interval and the
/// served interval: `mu-` falls, `mu+` rises, exclusion points move outward.
pub fn thresholds_monotone(members: &[FamilyMember], slack: f64) -> MonotoneReport {
    let mut report = MonotoneReport::new(slack);
    for w in members.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (ta, tb) = (a.menu.thresholds, b.menu.thresholds);
        let checks = [
            ("mu- must not increase", ta.mu_minus - tb.mu_minus),
            ("mu+ must not decrease", tb.mu_plus - ta.mu_plus),
            (
                "low exclusion point must not increase",
                ta.mu_excl_lo - tb.mu_excl_lo,
            ),
            (
                "high exclusion point must not decrease",
                tb.mu_excl_hi - ta.mu_excl_hi,
            ),
        ];
        for (what, margin) in checks {
            report.check(
                margin >= -slack,
                MonotoneFailure {
                    t_lo: a.t,
                    t_hi: b.t,
                    probe: None,
                    what: what.to_owned(),
                    amount: margin,
                },
            );
        }
    }
    report
}

/// Contract assigned to a probe belief, solved exactly.
fn probe_contract(
    v: &ValueFunction,
    member: &FamilyMember,
    mu: f64,
) -> Result<SimpleExperiment, Error> {
    let c = solver::contract_at(v, &member.density, &member.menu.thresholds, mu, 1e-14)?;
    Ok(c.experiment())
}

/// Every probe must receive a weakly Blackwell-better experiment as the
/// family grows more dispersed.
pub fn blackwell_monotone(
    v: &ValueFunction,
    members: &[FamilyMember],
    probes: &[f64],
    slack: f64,
) -> Result<MonotoneReport, Error> {
    let mut report = MonotoneReport::new(slack);
    for w in members.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for &mu in probes {
            let ea = probe_contract(v, a, mu)?;
            let eb = probe_contract(v, b, mu)?;
            // same-orientation noise comparisons get the numeric slack
            let ok = match blackwell_compare(eb, ea) {
                BlackwellOrder::Dominates | BlackwellOrder::Equivalent => true,
                BlackwellOrder::Dominated => {
                    ea.orientation == eb.orientation && eb.noise >= ea.noise - slack
                }
                BlackwellOrder::Incomparable => false,
            };
            report.check(
                ok,
                MonotoneFailure {
                    t_lo: a.t,
                    t_hi: b.t,
                    probe: Some(mu),
                    what: format!(
                        "contract degraded from {:?}(noise {:.6}) to {:?}(noise {:.6})",
                        ea.orientation, ea.noise, eb.orientation, eb.noise
                    ),
                    amount: ea.noise - eb.noise,
                },
            );
        }
    }
    Ok(report)
}

/// Per-type surplus must be nondecreasing in dispersion at every probe.
pub fn surplus_monotone(members: &[FamilyMember], probes: &[f64], slack: f64) -> MonotoneReport {
    let mut report = MonotoneReport::new(slack);
    for w in members.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for &mu in probes {
            let sa = surplus_at(&a.menu, mu);
            let sb = surplus_at(&b.menu, mu);
            report.check(
                sb >= sa - slack,
                MonotoneFailure {
                    t_lo: a.t,
                    t_hi: b.t,
                    probe: Some(mu),
                    what: format!("surplus fell from {sa:.9} to {sb:.9}"),
                    amount: sa - sb,
                },
            );
        }
    }
    report
}

/// Surplus at a probe from the menu grid (nearest grid point; probes on the
/// grid are matched exactly).
pub fn surplus_at(menu: &OptimalMenu, mu: f64) -> f64 {
    let idx = menu
        .points
        .binary_search_by(|p| p.mu.partial_cmp(&mu).unwrap())
        .unwrap_or_else(|i| i.min(menu.points.len() - 1));
    menu.points[idx].surplus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_pivot_falls_back_to_threshold_form() {
        let f = BeliefDensity::uniform();
        let pivot = dispersion_pivot(&f).unwrap();
        assert!(pivot.printed_root.is_none());
        assert!((pivot.threshold_root - 0.25).abs() < 1e-10);
        assert!((pivot.used - 0.25).abs() < 1e-10);
    }

    #[test]
    fn rotation_zero_is_the_base() {
        let base = BeliefDensity::uniform();
        let rot = rotation_density(&base, 0.0).unwrap();
        for mu in [0.0, 0.2, 0.5, 0.8, 1.0] {
            assert!((rot.density(mu) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_moves_mass_to_the_tails() {
        let base = BeliefDensity::uniform();
        let rot = rotation_density(&base, 0.4).unwrap();
        assert!((rot.density(0.0) - 1.1).abs() < 1e-12);
        assert!((rot.density(0.5) - 0.9).abs() < 1e-12);
        assert!((rot.density(1.0) - 1.1).abs() < 1e-12);
        assert!((rot.density(0.25) - 1.0).abs() < 1e-12);
        assert!(rot.is_symmetric());
        // mass preserved without renormalization
        let xs = linspace(0.0, 1.0, 2001);
        let ys: Vec<f64> = xs.iter().map(|&x| rot.density(x)).collect();
        assert!((crate::numeric::trapezoid(&xs, &ys) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_rejects_infeasible_tilt() {
        let base = BeliefDensity::uniform();
        let t_max = max_rotation(&base).unwrap();
        assert!((t_max - 4.0).abs() < 1e-9, "uniform t_max should be 4, got {t_max}");
        assert!(rotation_density(&base, t_max + 0.1).is_err());
    }

    #[test]
    fn dispersive_order_on_the_rotation_family() {
        let base = BeliefDensity::uniform();
        let rot = rotation_density(&base, 0.4).unwrap();
        assert!(is_more_dispersed(&rot, &base).unwrap());
        assert!(!is_more_dispersed(&base, &rot).unwrap());
        assert!(is_more_dispersed(&base, &base).unwrap(), "reflexive");
    }

    #[test]
    fn dispersive_order_is_transitive_on_the_family() {
        let base = BeliefDensity::uniform();
        let f1 = rotation_density(&base, 0.1).unwrap();
        let f2 = rotation_density(&base, 0.25).unwrap();
        let f3 = rotation_density(&base, 0.4).unwrap();
        assert!(is_more_dispersed(&f2, &f1).unwrap());
        assert!(is_more_dispersed(&f3, &f2).unwrap());
        assert!(is_more_dispersed(&f3, &f1).unwrap());
    }

    #[test]
    fn blackwell_compare_ladder() {
        let rl6 = SimpleExperiment::reveal_l(0.6).unwrap();
        let rl4 = SimpleExperiment::reveal_l(0.4).unwrap();
        let rh3 = SimpleExperiment::reveal_h(0.3).unwrap();
        let rh5 = SimpleExperiment::reveal_h(0.5).unwrap();
        assert_eq!(blackwell_compare(rl6, rl4), BlackwellOrder::Dominates);
        assert_eq!(blackwell_compare(rl4, rl6), BlackwellOrder::Dominated);
        assert_eq!(
            blackwell_compare(SimpleExperiment::full(), rh3),
            BlackwellOrder::Dominates
        );
        assert_eq!(
            blackwell_compare(SimpleExperiment::null(), rh3),
            BlackwellOrder::Dominated
        );
        assert_eq!(
            blackwell_compare(SimpleExperiment::reveal_l(0.5).unwrap(), rh5),
            BlackwellOrder::Incomparable
        );
    }

    #[test]
    fn incomparable_pair_is_ranked_oppositely_by_two_priors() {
        use crate::model::belief::Belief;
        use crate::model::experiment::{experiment_value, ExperimentKind};
        let v = ValueFunction::quadratic();
        let rl = ExperimentKind::from(SimpleExperiment::reveal_l(0.5).unwrap());
        let rh = ExperimentKind::from(SimpleExperiment::reveal_h(0.5).unwrap());
        let at = |e: &ExperimentKind, mu: f64| experiment_value(e, Belief::new(mu).unwrap(), &v);
        // a high-belief buyer prefers contradicting evidence and vice versa
        assert!(at(&rl, 0.8) > at(&rh, 0.8));
        assert!(at(&rh, 0.2) > at(&rl, 0.2));
    }

    #[test]
    fn family_menus_are_monotone() {
        let v = ValueFunction::quadratic();
        let base = BeliefDensity::uniform();
        let family = rotation_family(&base, &[0.0, 0.2, 0.4]).unwrap();
        let members = solve_family(&v, &family, &SolveOptions::default()).unwrap();
        let thresholds = thresholds_monotone(&members, 1e-8);
        assert!(thresholds.pass, "{:?}", thresholds.failures);
        let probes = [0.1, 0.2, 0.8, 0.9];
        let blackwell = blackwell_monotone(&v, &members, &probes, 1e-8).unwrap();
        assert!(blackwell.pass, "{:?}", blackwell.failures);
        let surplus = surplus_monotone(&members, &probes, 1e-8);
        assert!(surplus.pass, "{:?}", surplus.failures);
    }

    #[test]
    fn single_member_family_is_vacuously_monotone() {
        let v = ValueFunction::quadratic();
        let base = BeliefDensity::uniform();
        let family = rotation_family(&base, &[0.2]).unwrap();
        let members = solve_family(&v, &family, &SolveOptions::default()).unwrap();
        assert!(thresholds_monotone(&members, 1e-8).pass);
        assert!(surplus_monotone(&members, &[0.3], 1e-8).pass);
    }

    #[test]
    fn repeated_t_values_pass_weak_monotonicity() {
        let v = ValueFunction::quadratic();
        let base = BeliefDensity::uniform();
        let family = rotation_family(&base, &[0.2, 0.2]).unwrap();
        let members = solve_family(&v, &family, &SolveOptions::default()).unwrap();
        assert!(thresholds_monotone(&members, 1e-8).pass);
    }
}
