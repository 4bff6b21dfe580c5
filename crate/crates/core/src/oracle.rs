//! Ground-truth machinery on finite instances.
//!
//! A discrete instance is a weighted list of buyer beliefs and a finite
//! experiment catalog (always containing the null and full experiments). For
//! a fixed assignment of types to catalog entries, the revenue-maximal price
//! vector solves a shortest-path problem on the incentive graph:
//!
//! ```text
//! p_i <= U_i(a_i) - V(mu_i)                    (IR, arc from the root)
//! p_i <= p_k + U_i(a_i) - U_i(a_k)             (IC, arc k -> i)
//! ```
//!
//! so `p_i` is the shortest root distance; a negative cycle means the
//! assignment cannot be priced. The optimal mechanism is found by exhaustive
//! assignment enumeration when `|catalog|^|types|` fits the budget, otherwise
//! by seeded steepest-ascent local search over single-type reassignments,
//! flagged in the output. Both modes reduce deterministically: maximum
//! revenue, ties to the lexicographically smallest assignment.

use crate::error::Error;
use crate::model::belief::Belief;
use crate::model::experiment::{
    experiment_value, ExperimentKind, GeneralExperiment, Orientation, SimpleExperiment,
};
use crate::model::value::ValueFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One buyer type: a belief with its population weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypePoint {
    pub belief: f64,
    pub weight: f64,
}

/// A finite screening instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteInstance {
    pub types: Vec<TypePoint>,
    pub catalog: Vec<GeneralExperiment>,
    pub value: ValueFunction,
}

impl DiscreteInstance {
    /// Validate weights, deduplicate the catalog up to signal relabeling, and
    /// require null and full experiments to be present.
    pub fn new(
        types: Vec<TypePoint>,
        catalog: Vec<GeneralExperiment>,
        value: ValueFunction,
    ) -> Result<Self, Error> {
        if types.is_empty() {
            return Err(Error::invalid("instance", "needs at least one type"));
        }
        if types
            .iter()
            .any(|t| t.weight < 0.0 || !(0.0..=1.0).contains(&t.belief))
        {
            return Err(Error::invalid(
                "instance",
                "weights must be >= 0 and beliefs in [0, 1]",
            ));
        }
        let mass: f64 = types.iter().map(|t| t.weight).sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "instance",
                format!("type weights sum to {mass}, expected 1"),
            ));
        }
        let catalog = dedup_catalog(catalog);
        let has_null = catalog
            .iter()
            .any(|e| matches!(e.as_simple().map(|s| s.orientation), Some(Orientation::Null)));
        let has_full = catalog
            .iter()
            .any(|e| matches!(e.as_simple().map(|s| s.orientation), Some(Orientation::Full)));
        if !has_null || !has_full {
            return Err(Error::invalid(
                "instance",
                "catalog must contain the null and full experiments",
            ));
        }
        Ok(DiscreteInstance {
            types,
            catalog,
            value,
        })
    }

    /// Index of the null experiment in the catalog.
    pub fn null_index(&self) -> usize {
        self.catalog
            .iter()
            .position(|e| matches!(e.as_simple().map(|s| s.orientation), Some(Orientation::Null)))
            .expect("validated at construction")
    }

    /// Index of the full experiment in the catalog.
    pub fn full_index(&self) -> usize {
        self.catalog
            .iter()
            .position(|e| matches!(e.as_simple().map(|s| s.orientation), Some(Orientation::Full)))
            .expect("validated at construction")
    }

    /// Instance with the same types and value but an extended catalog.
    pub fn with_extended_catalog(&self, extra: Vec<GeneralExperiment>) -> DiscreteInstance {
        let mut catalog = self.catalog.clone();
        catalog.extend(extra);
        DiscreteInstance {
            types: self.types.clone(),
            catalog: dedup_catalog(catalog),
            value: self.value.clone(),
        }
    }

    fn tableau(&self) -> Tableau {
        let u: Vec<Vec<f64>> = self
            .types
            .iter()
            .map(|t| {
                let mu = Belief::clamped(t.belief);
                self.catalog
                    .iter()
                    .map(|e| experiment_value(&ExperimentKind::General(e.clone()), mu, &self.value))
                    .collect()
            })
            .collect();
        let outside: Vec<f64> = self
            .types
            .iter()
            .map(|t| self.value.value(t.belief))
            .collect();
        let weights: Vec<f64> = self.types.iter().map(|t| t.weight).collect();
        Tableau { u, outside, weights }
    }
}

/// Precomputed experiment values: `u[i][j] = U(catalog[j], mu_i)`.
struct Tableau {
    u: Vec<Vec<f64>>,
    outside: Vec<f64>,
    weights: Vec<f64>,
}

impl Tableau {
    fn revenue(&self, prices: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(prices.iter())
            .map(|(w, p)| w * p)
            .sum()
    }
}

/// A priced assignment of types to catalog entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMechanism {
    pub assignment: Vec<usize>,
    pub prices: Vec<f64>,
    pub revenue: f64,
    /// Whether the search was exhaustive (certified optimal over the catalog).
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

/// Revenue-maximal IC/IR prices for a fixed assignment, by Bellman-Ford
/// shortest paths from the IR root.
pub fn best_prices_for_assignment(
    instance: &DiscreteInstance,
    assignment: &[usize],
) -> Result<Vec<f64>, Error> {
    let tab = instance.tableau();
    best_prices(&tab, assignment)
}

fn best_prices(tab: &Tableau, assignment: &[usize]) -> Result<Vec<f64>, Error> {
    let n = tab.outside.len();
    debug_assert_eq!(assignment.len(), n);
    // root distance 0; initial relax over the IR arcs
    let mut d: Vec<f64> = (0..n)
        .map(|i| tab.u[i][assignment[i]] - tab.outside[i])
        .collect();
    for _round in 0..n {
        let mut changed = false;
        for i in 0..n {
            let own = tab.u[i][assignment[i]];
            for k in 0..n {
                if k == i {
                    continue;
                }
                let via = d[k] + own - tab.u[i][assignment[k]];
                if via < d[i] - 1e-15 {
                    d[i] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(d);
        }
    }
    // still relaxing after n rounds: negative cycle
    for i in 0..n {
        let own = tab.u[i][assignment[i]];
        for k in 0..n {
            if k != i && d[k] + own - tab.u[i][assignment[k]] < d[i] - 1e-9 {
                return Err(Error::InfeasibleAssignment { type_index: i });
            }
        }
    }
    Ok(d)
}

type Candidate = (f64, Vec<usize>, Vec<f64>);

fn mechanism_for(tab: &Tableau, assignment: Vec<usize>) -> Option<Candidate> {
    best_prices(tab, &assignment)
        .ok()
        .map(|p| (tab.revenue(&p), assignment, p))
}

/// Keep the higher revenue; exact ties go to the lexicographically smaller
/// assignment. Exact comparison keeps the parallel reduction associative.
fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Search options for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Maximum number of assignments enumerated exhaustively.
    pub budget: u64,
    /// Local-search restarts when enumeration exceeds the budget.
    pub restarts: usize,
    /// Seed for the local-search restart assignments.
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: 2_000_000,
            restarts: 64,
            seed: 7,
        }
    }
}

/// Best mechanism over the catalog: exhaustive within budget, otherwise
/// deterministic seeded local search (flagged).
pub fn brute_force_optimal(
    instance: &DiscreteInstance,
    opts: &OracleOptions,
) -> DiscreteMechanism {
    brute_force_with_seeds(instance, opts, &[])
}

/// Like [`brute_force_optimal`], with extra assignments injected as local
/// search starting points (ignored in exhaustive mode).
pub fn brute_force_with_seeds(
    instance: &DiscreteInstance,
    opts: &OracleOptions,
    extra_seeds: &[Vec<usize>],
) -> DiscreteMechanism {
    let tab = instance.tableau();
    let n = instance.types.len();
    let m = instance.catalog.len();
    let total = (m as f64).powi(n as i32);
    if total <= opts.budget as f64 {
        let total = total as u64;
        let best = (0..total)
            .into_par_iter()
            .fold(
                || None,
                |acc, idx| {
                    let assignment = decode_assignment(idx, n, m);
                    better(acc, mechanism_for(&tab, assignment))
                },
            )
            .reduce(|| None, better);
        let (revenue, assignment, prices) = best.expect("all-null assignment is always feasible");
        return DiscreteMechanism {
            assignment,
            prices,
            revenue,
            exhaustive: true,
            flags: Vec::new(),
        };
    }

    // local search fallback
    let null = instance.null_index();
    let full = instance.full_index();
    let mut starts: Vec<Vec<usize>> = vec![vec![null; n], vec![full; n]];
    starts.extend(extra_seeds.iter().cloned());
    let randoms = opts.restarts.saturating_sub(starts.len());
    for r in 0..randoms {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        starts.push((0..n).map(|_| rng.gen_range(0..m)).collect());
    }
    let best = starts
        .into_par_iter()
        .map(|s| local_search(&tab, s, m))
        .fold(|| None, better)
        .reduce(|| None, better);
    let (revenue, assignment, prices) = best.expect("null start is always feasible");
    DiscreteMechanism {
        assignment,
        prices,
        revenue,
        exhaustive: false,
        flags: vec![format!(
            "local-search: {:.3e} assignments exceed budget {}",
            total, opts.budget
        )],
    }
}

fn decode_assignment(mut idx: u64, n: usize, m: usize) -> Vec<usize> {
    // type 0 is the most significant digit, so index order is lexicographic
    let mut a = vec![0usize; n];
    for slot in a.iter_mut().rev() {
        *slot = (idx % m as u64) as usize;
        idx /= m as u64;
    }
    a
}

/// Steepest-ascent over single-type reassignments.
fn local_search(tab: &Tableau, start: Vec<usize>, m: usize) -> Option<Candidate> {
    let n = start.len();
    let mut current = mechanism_for(tab, start)?;
    loop {
        let mut best_move: Option<Candidate> = None;
        for i in 0..n {
            let old = current.1[i];
            for j in 0..m {
                if j == old {
                    continue;
                }
                let mut cand = current.1.clone();
                cand[i] = j;
                best_move = better(best_move, mechanism_for(tab, cand));
            }
        }
        match best_move {
            Some(mv) if mv.0 > current.0 + 1e-12 => current = mv,
            _ => return Some(current),
        }
    }
}

/// Global IC/IR verdict for a finite set of types against an offered set of
/// contracts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcIrReport {
    pub pass: bool,
    pub tolerance: f64,
    pub worst_violation: f64,
    /// Belief of the worst-violating type.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_type: Option<f64>,
    /// Index of the contract the worst violation deviates to; `None` when the
    /// binding deviation is the outside option.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_deviation: Option<usize>,
}

/// Check every type against every offered contract and the outside option.
///
/// `net_own[i]` is type `i`'s utility net of price under its assigned
/// contract; `u(i, j)` the gross utility of contract `j` to type `i`.
pub fn verify_ic_ir(
    types: &[f64],
    net_own: &[f64],
    outside: &[f64],
    prices: &[f64],
    u: impl Fn(usize, usize) -> f64,
    tol: f64,
) -> IcIrReport {
    let mut report = IcIrReport {
        pass: true,
        tolerance: tol,
        worst_violation: 0.0,
        worst_type: None,
        worst_deviation: None,
    };
    for (i, &mu) in types.iter().enumerate() {
        let ir = outside[i] - net_own[i];
        if ir > report.worst_violation {
            report.worst_violation = ir;
            report.worst_type = Some(mu);
            report.worst_deviation = None;
        }
        for (j, &pj) in prices.iter().enumerate() {
            let gain = u(i, j) - pj - net_own[i];
            if gain > report.worst_violation {
                report.worst_violation = gain;
                report.worst_type = Some(mu);
                report.worst_deviation = Some(j);
            }
        }
    }
    report.pass = report.worst_violation <= tol;
    report
}

/// IC/IR check of a mechanism on its own instance.
pub fn verify_mechanism(
    instance: &DiscreteInstance,
    mechanism: &DiscreteMechanism,
    tol: f64,
) -> IcIrReport {
    let tab = instance.tableau();
    let types: Vec<f64> = instance.types.iter().map(|t| t.belief).collect();
    let net_own: Vec<f64> = (0..types.len())
        .map(|i| tab.u[i][mechanism.assignment[i]] - mechanism.prices[i])
        .collect();
    // deviations target assigned contracts at their holders' prices
    verify_ic_ir(
        &types,
        &net_own,
        &tab.outside,
        &mechanism.prices,
        |i, k| tab.u[i][mechanism.assignment[k]],
        tol,
    )
}

/// Report of the three-signal catalog extension check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeSignalReport {
    pub base_revenue: f64,
    pub extended_revenue: f64,
    pub gain: f64,
    pub pass: bool,
    pub base_exhaustive: bool,
    pub extended_exhaustive: bool,
    pub base_catalog: usize,
    pub extended_catalog: usize,
}

/// Three-signal experiments whose signal posteriors (at prior 1/2) lie on a
/// grid of the given step: `{0, nu, 1}` layouts, two-interior pairs, and one
/// conclusive signal plus two interior posteriors. The free signal mass runs
/// over the same grid.
pub fn three_signal_extension(step: f64) -> Vec<GeneralExperiment> {
    let mut posteriors = Vec::new();
    let mut x = step;
    while x < 1.0 - 1e-12 {
        posteriors.push(x);
        x += step;
    }
    let masses = posteriors.clone();
    let mut out = Vec::new();
    // signal with posterior nu (at prior 1/2) and mass m has likelihoods
    // (2 m nu, 2 m (1 - nu))
    let push = |out: &mut Vec<GeneralExperiment>, sig: Vec<(f64, f64)>| {
        if let Ok(e) = GeneralExperiment::new(sig) {
            out.push(e);
        }
    };
    for &nu in &posteriors {
        for &m in &masses {
            // {0, nu, 1}: conclusive-l mass p0, interior mass m, conclusive-h p1
            let p1 = 0.5 - m * nu;
            let p0 = 1.0 - m - p1;
            if p1 >= -1e-12 && p0 >= -1e-12 {
                push(
                    &mut out,
                    vec![
                        (0.0, 2.0 * p0.max(0.0)),
                        (2.0 * m * nu, 2.0 * m * (1.0 - nu)),
                        (2.0 * p1.max(0.0), 0.0),
                    ],
                );
            }
        }
    }
    for (a, &nu1) in posteriors.iter().enumerate() {
        for &nu2 in posteriors.iter().skip(a + 1) {
            // two interior posteriors, masses pinned by the prior
            if nu1 < 0.5 && nu2 > 0.5 {
                let m1 = (nu2 - 0.5) / (nu2 - nu1);
                let m2 = 1.0 - m1;
                push(
                    &mut out,
                    vec![
                        (2.0 * m1 * nu1, 2.0 * m1 * (1.0 - nu1)),
                        (2.0 * m2 * nu2, 2.0 * m2 * (1.0 - nu2)),
                    ],
                );
            }
            // one conclusive + two interior, free mass on the first interior
            for &m1 in &masses {
                // {0, nu1, nu2}: the interior masses carry the whole mean
                let m2 = (0.5 - m1 * nu1) / nu2;
                let p0 = 1.0 - m1 - m2;
                if m2 >= -1e-12 && p0 >= -1e-12 {
                    push(
                        &mut out,
                        vec![
                            (0.0, 2.0 * p0.max(0.0)),
                            (2.0 * m1 * nu1, 2.0 * m1 * (1.0 - nu1)),
                            (2.0 * m2.max(0.0) * nu2, 2.0 * m2.max(0.0) * (1.0 - nu2)),
                        ],
                    );
                }
                // {nu1, nu2, 1}: m1 nu1 + m2 nu2 + p1 = 0.5 with m1+m2+p1 = 1
                let p1 = (0.5 - m1 * nu1 - (1.0 - m1) * nu2) / (1.0 - nu2);
                let m2c = 1.0 - m1 - p1;
                if p1 >= -1e-12 && m2c >= -1e-12 {
                    push(
                        &mut out,
                        vec![
                            (2.0 * m1 * nu1, 2.0 * m1 * (1.0 - nu1)),
                            (2.0 * m2c.max(0.0) * nu2, 2.0 * m2c.max(0.0) * (1.0 - nu2)),
                            (2.0 * p1.max(0.0), 0.0),
                        ],
                    );
                }
            }
        }
    }
    out
}

/// Extend the catalog with three-signal experiments and re-solve; the gain
/// over the base optimum should be negligible.
pub fn three_signal_no_improvement(
    instance: &DiscreteInstance,
    posterior_step: f64,
    opts: &OracleOptions,
    tol: f64,
) -> ThreeSignalReport {
    let base = brute_force_optimal(instance, opts);
    let extended = instance.with_extended_catalog(three_signal_extension(posterior_step));
    // the base optimum remains a valid assignment; seed the search with it
    let ext = brute_force_with_seeds(&extended, opts, std::slice::from_ref(&base.assignment));
    let gain = ext.revenue - base.revenue;
    ThreeSignalReport {
        base_revenue: base.revenue,
        extended_revenue: ext.revenue,
        gain,
        pass: gain < tol,
        base_exhaustive: base.exhaustive,
        extended_exhaustive: ext.exhaustive,
        base_catalog: instance.catalog.len(),
        extended_catalog: extended.catalog.len(),
    }
}

/// Outcome of the revealed-state pattern check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    /// False when the mechanism holds non-simple experiments.
    pub applicable: bool,
    pub pass: bool,
    /// `(type index, orientation)` of each served type on the wrong side.
    pub violations: Vec<(usize, Orientation)>,
}

/// Check that served types below `mu0` hold reveal-h (or full) experiments
/// and served types above hold reveal-l (or full).
pub fn revealed_state_pattern(
    instance: &DiscreteInstance,
    mechanism: &DiscreteMechanism,
    mu0: f64,
) -> PatternReport {
    let mut violations = Vec::new();
    for (i, (&a, t)) in mechanism
        .assignment
        .iter()
        .zip(instance.types.iter())
        .enumerate()
    {
        let Some(simple) = instance.catalog[a].as_simple() else {
            return PatternReport {
                applicable: false,
                pass: false,
                violations: Vec::new(),
            };
        };
        let ok = match simple.canonical().orientation {
            Orientation::Null | Orientation::Full => true,
            Orientation::RevealH => t.belief <= mu0 + 1e-12,
            Orientation::RevealL => t.belief >= mu0 - 1e-12,
        };
        if !ok {
            violations.push((i, simple.orientation));
        }
    }
    PatternReport {
        applicable: true,
        pass: violations.is_empty(),
        violations,
    }
}

/// Simple-experiment catalog over a noise grid, plus null and full.
pub fn simple_catalog(noise_levels: &[f64]) -> Vec<GeneralExperiment> {
    let mut catalog = vec![
        SimpleExperiment::null().to_general(),
        SimpleExperiment::full().to_general(),
    ];
    for &x in noise_levels {
        if x > 0.0 && x < 1.0 {
            catalog.push(SimpleExperiment::reveal_l(x).expect("grid in (0,1)").to_general());
            catalog.push(SimpleExperiment::reveal_h(x).expect("grid in (0,1)").to_general());
        }
    }
    dedup_catalog(catalog)
}

/// Evenly weighted types spanning `[lo, hi]`.
pub fn uniform_types(n: usize, lo: f64, hi: f64) -> Vec<TypePoint> {
    let beliefs = crate::numeric::linspace(lo, hi, n);
    let w = 1.0 / n as f64;
    let mut types: Vec<TypePoint> = beliefs
        .iter()
        .map(|&belief| TypePoint { belief, weight: w })
        .collect();
    // force the weights to sum to exactly 1
    let sum: f64 = types.iter().take(n - 1).map(|t| t.weight).sum();
    types[n - 1].weight = 1.0 - sum;
    types
}

fn dedup_catalog(catalog: Vec<GeneralExperiment>) -> Vec<GeneralExperiment> {
    let mut seen = std::collections::BTreeSet::new();
    catalog
        .into_iter()
        .filter(|e| seen.insert(e.canonical_key()))
        .collect()
}
