//! Value-of-belief functions.
//!
//! `V(mu)` is the buyer's maximal expected payoff from his decision problem at
//! belief `mu`. Two families are supported:
//!
//! - smooth polynomials, evaluated with analytic first and second derivatives
//!   so that no numerical differentiation enters any first-order condition;
//! - finite action tables, where `V(mu) = max_a  mu*u(a,h) + (1-mu)*u(a,l)`
//!   is piecewise linear and convex. Tables expose the maximizing action but
//!   no classical derivative at kinks, so derivative-based operations refuse
//!   them.

use crate::error::Error;
use crate::numeric::linspace;
use serde::{Deserialize, Serialize};

/// One row of an action table: payoffs in states `l` and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPayoff {
    pub low: f64,
    pub high: f64,
}

impl ActionPayoff {
    /// Expected payoff of the action at belief `mu`.
    fn expected(&self, mu: f64) -> f64 {
        mu * self.high + (1.0 - mu) * self.low
    }
}

/// A finite decision problem: the buyer picks one action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionTable {
    actions: Vec<ActionPayoff>,
}

impl ActionTable {
    pub fn new(actions: Vec<ActionPayoff>) -> Result<Self, Error> {
        if actions.is_empty() {
            return Err(Error::invalid("action table", "table must be nonempty"));
        }
        if actions
            .iter()
            .any(|a| !a.low.is_finite() || !a.high.is_finite())
        {
            return Err(Error::invalid("action table", "payoffs must be finite"));
        }
        Ok(ActionTable { actions })
    }

    pub fn actions(&self) -> &[ActionPayoff] {
        &self.actions
    }

    /// Index of the expected-payoff-maximizing action, ties to the lower index.
    pub fn best_action(&self, mu: f64) -> usize {
        let mut best = 0;
        let mut best_value = self.actions[0].expected(mu);
        for (i, a) in self.actions.iter().enumerate().skip(1) {
            let v = a.expected(mu);
            if v > best_value {
                best = i;
                best_value = v;
            }
        }
        best
    }

    fn value(&self, mu: f64) -> f64 {
        self.actions[self.best_action(mu)].expected(mu)
    }

    /// Subgradient bounds at `mu`: slopes of the optimal actions just left and
    /// just right of `mu`. They coincide except at kinks.
    pub fn subgradient(&self, mu: f64) -> (f64, f64) {
        let slope = |a: &ActionPayoff| a.high - a.low;
        let at = self.best_action(mu);
        let mut lo = slope(&self.actions[at]);
        let mut hi = lo;
        let v = self.value(mu);
        for a in &self.actions {
            if (a.expected(mu) - v).abs() <= 1e-12 {
                let s = slope(a);
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        (lo, hi)
    }
}

/// Polynomial in ascending powers of `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, Error> {
        if coefficients.is_empty() {
            return Err(Error::invalid("polynomial", "needs at least one coefficient"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("polynomial", "coefficients must be finite"));
        }
        Ok(Polynomial { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Polynomial {
        if self.coefficients.len() == 1 {
            return Polynomial {
                coefficients: vec![0.0],
            };
        }
        Polynomial {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    /// Coefficients of `p(1 - x)`.
    fn reflected(&self) -> Vec<f64> {
        let n = self.coefficients.len();
        let mut out = vec![0.0; n];
        // binomial expansion of (1 - x)^k
        let mut binom = vec![vec![0.0; n]; n];
        for (k, row) in binom.iter_mut().enumerate() {
            row[0] = 1.0;
            for j in 1..=k {
                row[j] = row[j - 1] * ((k - j + 1) as f64) / (j as f64);
            }
        }
        for (k, &c) in self.coefficients.iter().enumerate() {
            for (j, out_j) in out.iter_mut().enumerate().take(k + 1) {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *out_j += c * sign * binom[k][j];
            }
        }
        out
    }
}

/// The buyer's value of belief, with analytic derivatives when smooth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValueFunction {
    /// Twice continuously differentiable polynomial value.
    Smooth(Polynomial),
    /// Piecewise-linear value induced by a finite action table.
    Table(ActionTable),
}

impl ValueFunction {
    /// The quadratic-loss benchmark value `V(mu) = mu^2 - mu`.
    pub fn quadratic() -> Self {
        ValueFunction::Smooth(Polynomial::new(vec![0.0, -1.0, 1.0]).expect("static coefficients"))
    }

    /// Smooth polynomial value from ascending coefficients.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self, Error> {
        Ok(ValueFunction::Smooth(Polynomial::new(coefficients)?))
    }

    /// Value induced by a finite action table.
    pub fn from_table(table: ActionTable) -> Self {
        ValueFunction::Table(table)
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, ValueFunction::Smooth(_))
    }

    /// `V(mu)`.
    pub fn value(&self, mu: f64) -> f64 {
        match self {
            ValueFunction::Smooth(p) => p.eval(mu),
            ValueFunction::Table(t) => t.value(mu),
        }
    }

    /// `V'(mu)`; endpoint values are the family's one-sided limits.
    pub fn deriv(&self, mu: f64) -> Result<f64, Error> {
        match self {
            ValueFunction::Smooth(p) => Ok(p.derivative().eval(mu)),
            ValueFunction::Table(_) => Err(Error::UnsupportedValueKind {
                operation: "first derivative",
            }),
        }
    }

    /// `V''(mu)`.
    pub fn deriv2(&self, mu: f64) -> Result<f64, Error> {
        match self {
            ValueFunction::Smooth(p) => Ok(p.derivative().derivative().eval(mu)),
            ValueFunction::Table(_) => Err(Error::UnsupportedValueKind {
                operation: "second derivative",
            }),
        }
    }

    /// Whether `V(mu) = V(1-mu)` identically.
    ///
    /// Exact (coefficient-level) for polynomials; sampled for tables.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ValueFunction::Smooth(p) => {
                let refl = p.reflected();
                p.coefficients
                    .iter()
                    .zip(refl.iter())
                    .all(|(a, b)| (a - b).abs() <= 1e-12)
            }
            ValueFunction::Table(_) => linspace(0.0, 1.0, 257)
                .iter()
                .all(|&mu| (self.value(mu) - self.value(1.0 - mu)).abs() <= 1e-12),
        }
    }

    /// Convexity check: sampled second differences must be >= -1e-9.
    pub fn validate_convex(&self, grid_size: usize) -> Result<(), Error> {
        let grid = linspace(0.0, 1.0, grid_size.max(3));
        let h = grid[1] - grid[0];
        for w in grid.windows(3) {
            let second = (self.value(w[2]) - 2.0 * self.value(w[1]) + self.value(w[0])) / (h * h);
            if second < -1e-9 {
                return Err(Error::invalid(
                    "value function",
                    format!("not convex: sampled V'' = {second:.3e} at mu = {}", w[1]),
                ));
            }
        }
        if let ValueFunction::Smooth(_) = self {
            for &mu in &grid {
                let d2 = self.deriv2(mu).expect("smooth kind");
                if d2 < -1e-9 {
                    return Err(Error::invalid(
                        "value function",
                        format!("not convex: V''({mu}) = {d2:.3e}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Build the value function induced by an action table.
///
/// `V(mu) = max_a  mu*u(a,h) + (1-mu)*u(a,l)`, piecewise linear and convex.
pub fn value_from_actions(actions: Vec<ActionPayoff>) -> Result<ValueFunction, Error> {
    Ok(ValueFunction::from_table(ActionTable::new(actions)?))
}

/// Upper concave hull of a value function, as a piecewise-linear evaluator.
#[derive(Debug, Clone)]
pub struct ConcaveHull {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl ConcaveHull {
    pub fn evaluate(&self, mu: f64) -> f64 {
        let mu = mu.clamp(0.0, 1.0);
        match self.xs.binary_search_by(|x| x.partial_cmp(&mu).unwrap()) {
            Ok(i) => self.ys[i],
            Err(i) => {
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let w = (mu - x0) / (x1 - x0);
                self.ys[i - 1] * (1.0 - w) + self.ys[i] * w
            }
        }
    }

    /// Hull vertices, in increasing `mu`.
    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

/// Compute the upper concave hull of `V` over `[0, 1]` on a sampling grid.
///
/// For action tables, kink locations are inserted exactly (intersections of
/// the optimal lines), so the hull of a piecewise-linear value is exact.
pub fn concave_hull(v: &ValueFunction, grid_size: usize) -> Result<ConcaveHull, Error> {
    if grid_size < 3 {
        return Err(Error::invalid("grid size", "concave hull needs >= 3 points"));
    }
    let mut grid = linspace(0.0, 1.0, grid_size);
    if let ValueFunction::Table(t) = v {
        grid = crate::numeric::merge_grid(&grid, &table_kinks(t));
    }
    let pts: Vec<(f64, f64)> = grid.iter().map(|&mu| (mu, v.value(mu))).collect();
    let hull = upper_hull(&pts);
    Ok(ConcaveHull {
        xs: hull.iter().map(|p| p.0).collect(),
        ys: hull.iter().map(|p| p.1).collect(),
    })
}

/// Exact kink locations of a table value: points where the argmax switches.
fn table_kinks(t: &ActionTable) -> Vec<f64> {
    let mut kinks = Vec::new();
    let grid = linspace(0.0, 1.0, 4097);
    for w in grid.windows(2) {
        let (a, b) = (t.best_action(w[0]), t.best_action(w[1]));
        if a != b {
            // Intersection of the two optimal lines.
            let (pa, pb) = (t.actions()[a], t.actions()[b]);
            let denom = (pb.high - pb.low) - (pa.high - pa.low);
            if denom.abs() > 1e-15 {
                let x = (pa.low - pb.low) / denom;
                if (0.0..=1.0).contains(&x) {
                    kinks.push(x);
                }
            }
        }
    }
    kinks
}

/// Upper hull of points sorted by x (monotone chain, keeping concave turns).
fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            // b must lie on or above chord a-p for a concave majorant
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}
