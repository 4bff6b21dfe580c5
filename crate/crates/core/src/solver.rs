//! The optimal menu of simple experiments.
//!
//! For a multiplier `lambda` the belief space splits at `mu0 = F^{-1}(1 -
//! lambda)` and at the roots of
//!
//! ```text
//! f(mu-) mu-    + (lambda + F(mu-) - 1) = 0
//! f(mu+) (1-mu+) - (lambda + F(mu+) - 1) = 0
//! ```
//!
//! Buyers in `[mu-, mu+]` receive full revelation at a flat price. Outside,
//! the noisy-signal posterior `nu` of the assigned simple experiment solves a
//! first-order condition per type, here bisected on its bracket:
//!
//! ```text
//! reveal-l (mu > mu+), nu in (mu, 1):
//!   (1 - f(mu)(1-mu)/(lambda+F(mu)-1)) (V(nu) - V(0) - nu V'(nu))
//!     + V''(nu) nu^2 (1-nu) / mu = 0
//! reveal-h (mu < mu-), nu in (0, mu):
//!   (1 + f(mu)mu/(lambda+F(mu)-1)) (V(nu) - V(1) + (1-nu) V'(nu))
//!     + V''(nu) nu (1-nu)^2 / (1-mu) = 0
//! ```
//!
//! Types whose condition has no root on its side are excluded (sold the null
//! experiment at price zero). Prices integrate the local incentive constraint:
//! `p(mu) = ΔV(mu) - s(mu)` with `s(mu) = ∫_0^mu ∂ΔV/∂mu dt` accumulated by
//! composite trapezoid over a grid that contains every threshold exactly.

use crate::assumptions;
use crate::error::Error;
use crate::model::belief::Belief;
use crate::model::density::BeliefDensity;
use crate::model::experiment::{Orientation, SimpleExperiment};
use crate::model::surplus::{delta_v, delta_v_mu};
use crate::model::value::{concave_hull, ValueFunction};
use crate::numeric::{self, bisect, cumulative_trapezoid, golden_section_max, linspace};
use serde::{Deserialize, Serialize};

/// Band around `mu0` where `lambda + F(mu) - 1` is treated as vanishing.
pub const GUARD_BAND: f64 = 1e-6;

/// Which side of the full-revelation interval a type sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Beliefs below `mu-`: reveal-h experiments.
    Low,
    /// Beliefs above `mu+`: reveal-l experiments.
    High,
}

/// Multiplier and segmentation thresholds of the optimal menu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub lambda: f64,
    /// `F^{-1}(1 - lambda)`, where the orientation of sold experiments flips.
    pub mu0: f64,
    /// Lower edge of the full-revelation interval.
    pub mu_minus: f64,
    /// Upper edge of the full-revelation interval.
    pub mu_plus: f64,
    /// Low-side exclusion point; beliefs below it are not served.
    pub mu_excl_lo: f64,
    /// High-side exclusion point; beliefs above it are not served.
    pub mu_excl_hi: f64,
}

/// Thresholds for a given multiplier, before exclusion points are known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreThresholds {
    pub lambda: f64,
    pub mu0: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
}

/// One belief grid point of a solved menu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MenuPoint {
    pub mu: f64,
    pub orientation: Orientation,
    pub noise: f64,
    /// Belief induced by the non-conclusive signal (1 or 0 on the full
    /// region's high/low half; the prior itself on the null region).
    pub posterior: f64,
    pub price: f64,
    pub surplus: f64,
    /// Buyer's expected decision payoff gross of the price, `V(mu) + ΔV(mu)`.
    pub gross_utility: f64,
}

/// A solved menu on a belief grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalMenu {
    pub thresholds: ThresholdSet,
    pub points: Vec<MenuPoint>,
    pub revenue: f64,
}

/// Solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Number of uniform grid points (thresholds are inserted on top).
    pub grid_size: usize,
    /// Bracket width tolerance for threshold bisection.
    pub threshold_tol: f64,
    /// Bracket width tolerance for per-type posterior bisection.
    pub foc_tol: f64,
    /// Residual tolerance for the multiplier constraint.
    pub lambda_residual_tol: f64,
    /// Search bracket for the multiplier on asymmetric instances.
    pub lambda_bracket: (f64, f64),
    /// Solve even if the regularity checks fail.
    pub override_assumptions: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid_size: 1001,
            threshold_tol: 1e-12,
            foc_tol: 1e-14,
            lambda_residual_tol: 1e-8,
            lambda_bracket: (0.05, 0.95),
            override_assumptions: false,
        }
    }
}

/// The contract assigned to one belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignedContract {
    pub orientation: Orientation,
    pub noise: f64,
    pub posterior: f64,
}

impl AssignedContract {
    pub fn experiment(&self) -> SimpleExperiment {
        match self.orientation {
            Orientation::Null => SimpleExperiment::null(),
            Orientation::Full => SimpleExperiment::full(),
            Orientation::RevealL => SimpleExperiment {
                orientation: Orientation::RevealL,
                noise: self.noise,
            },
            Orientation::RevealH => SimpleExperiment {
                orientation: Orientation::RevealH,
                noise: self.noise,
            },
        }
    }
}

/// Left-hand side of the reveal-l first-order condition in `nu`.
pub fn foc_reveal_l(nu: f64, mu: f64, lambda: f64, v: &ValueFunction, f: &BeliefDensity) -> f64 {
    let denom = lambda + f.cdf(mu) - 1.0;
    let coeff = 1.0 - f.density(mu) * (1.0 - mu) / denom;
    let dv = v.deriv(nu).expect("smooth value");
    let d2v = v.deriv2(nu).expect("smooth value");
    coeff * (v.value(nu) - v.value(0.0) - nu * dv) + d2v * nu * nu * (1.0 - nu) / mu
}

/// Left-hand side of the reveal-h first-order condition in `nu`.
pub fn foc_reveal_h(nu: f64, mu: f64, lambda: f64, v: &ValueFunction, f: &BeliefDensity) -> f64 {
    let denom = lambda + f.cdf(mu) - 1.0;
    let coeff = 1.0 + f.density(mu) * mu / denom;
    let dv = v.deriv(nu).expect("smooth value");
    let d2v = v.deriv2(nu).expect("smooth value");
    coeff * (v.value(nu) - v.value(1.0) + (1.0 - nu) * dv)
        + d2v * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - mu)
}

/// Solve the threshold system for a given multiplier.
///
/// `mu-` is bisected on `(0, mu0)` and `mu+` on `(mu0, 1)`; under the
/// likelihood-ratio condition each equation single-crosses on its side.
pub fn solve_thresholds(
    f: &BeliefDensity,
    lambda: f64,
    tol: f64,
) -> Result<CoreThresholds, Error> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::invalid("lambda", format!("{lambda} not in (0, 1)")));
    }
    let mu0 = f.quantile(1.0 - lambda);
    let lo_eq = |mu: f64| f.density(mu) * mu + (lambda + f.cdf(mu) - 1.0);
    let hi_eq = |mu: f64| f.density(mu) * (1.0 - mu) - (lambda + f.cdf(mu) - 1.0);
    let mu_minus = bisect(lo_eq, 0.0, mu0, tol).map_err(|e| Error::ThresholdNotFound {
        equation: "f(mu)mu + (lambda + F(mu) - 1) = 0",
        lo: e.lo,
        hi: e.hi,
        flo: e.flo,
        fhi: e.fhi,
    })?;
    let mu_plus = bisect(hi_eq, mu0, 1.0, tol).map_err(|e| Error::ThresholdNotFound {
        equation: "f(mu)(1-mu) - (lambda + F(mu) - 1) = 0",
        lo: e.lo,
        hi: e.hi,
        flo: e.flo,
        fhi: e.fhi,
    })?;
    Ok(CoreThresholds {
        lambda,
        mu0,
        mu_minus,
        mu_plus,
    })
}

/// Root of the branch first-order condition for one belief, or `None` when
/// the bracket carries no root (the type is excluded).
///
/// High side brackets `nu` in `[mu, 1]`, low side in `[0, mu]`; the returned
/// posterior therefore already satisfies the min/max clamp of the optimal
/// contract.
pub fn solve_foc_posterior(
    mu: f64,
    lambda: f64,
    v: &ValueFunction,
    f: &BeliefDensity,
    side: Side,
    tol: f64,
) -> Option<f64> {
    match side {
        Side::High => bisect(|nu| foc_reveal_l(nu, mu, lambda, v, f), mu, 1.0, tol).ok(),
        Side::Low => bisect(|nu| foc_reveal_h(nu, mu, lambda, v, f), 0.0, mu, tol).ok(),
    }
}

/// Invert the posterior map to the experiment's noise parameter.
///
/// reveal-l: `q = 1 - mu (1-nu) / (nu (1-mu))`;
/// reveal-h: `p = 1 - nu (1-mu) / (mu (1-nu))`.
pub fn noise_from_posterior(mu: f64, nu: f64, orientation: Orientation) -> Result<f64, Error> {
    let outside = |nu: f64| Error::PosteriorOutsideBranch {
        nu,
        mu,
        orientation,
    };
    match orientation {
        Orientation::Full => Ok(1.0),
        Orientation::Null => Ok(0.0),
        Orientation::RevealL => {
            if !(mu..=1.0).contains(&nu) {
                return Err(outside(nu));
            }
            if nu >= 1.0 {
                return Ok(1.0);
            }
            if (nu - mu).abs() <= f64::EPSILON {
                return Ok(0.0);
            }
            Ok(1.0 - mu * (1.0 - nu) / (nu * (1.0 - mu)))
        }
        Orientation::RevealH => {
            if !(0.0..=mu).contains(&nu) {
                return Err(outside(nu));
            }
            if nu <= 0.0 {
                return Ok(1.0);
            }
            if (nu - mu).abs() <= f64::EPSILON {
                return Ok(0.0);
            }
            Ok(1.0 - nu * (1.0 - mu) / (mu * (1.0 - nu)))
        }
    }
}

/// Last belief on `side` that is still served, found by bisecting the branch
/// condition evaluated at `nu = mu` (positive exactly while the root stays on
/// the served side of the prior).
///
/// Returns the domain boundary (1 or 0) when every belief on the side is
/// served.
pub fn exclusion_point(
    lambda: f64,
    v: &ValueFunction,
    f: &BeliefDensity,
    core: &CoreThresholds,
    side: Side,
    tol: f64,
) -> f64 {
    const SCAN: usize = 513;
    match side {
        Side::High => {
            let r = |mu: f64| foc_reveal_l(mu, mu, lambda, v, f);
            let grid = linspace(core.mu_plus, 1.0, SCAN);
            for w in grid.windows(2) {
                if r(w[0]) > 0.0 && r(w[1]) <= 0.0 {
                    return bisect(r, w[0], w[1], tol).unwrap_or(w[1]);
                }
            }
            1.0
        }
        Side::Low => {
            let r = |mu: f64| foc_reveal_h(mu, mu, lambda, v, f);
            let grid = linspace(0.0, core.mu_minus, SCAN);
            for w in grid.windows(2).rev() {
                if r(w[1]) > 0.0 && r(w[0]) <= 0.0 {
                    return bisect(r, w[0], w[1], tol).unwrap_or(w[0]);
                }
            }
            0.0
        }
    }
}

/// Thresholds plus exclusion points for a given multiplier.
pub fn full_thresholds(
    v: &ValueFunction,
    f: &BeliefDensity,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<ThresholdSet, Error> {
    let core = solve_thresholds(f, lambda, opts.threshold_tol)?;
    let mu_excl_hi = exclusion_point(lambda, v, f, &core, Side::High, 1e-10);
    let mu_excl_lo = exclusion_point(lambda, v, f, &core, Side::Low, 1e-10);
    Ok(ThresholdSet {
        lambda,
        mu0: core.mu0,
        mu_minus: core.mu_minus,
        mu_plus: core.mu_plus,
        mu_excl_lo,
        mu_excl_hi,
    })
}

/// The contract the menu assigns to belief `mu`, solved exactly at `mu`.
pub fn contract_at(
    v: &ValueFunction,
    f: &BeliefDensity,
    t: &ThresholdSet,
    mu: f64,
    foc_tol: f64,
) -> Result<AssignedContract, Error> {
    let null = AssignedContract {
        orientation: Orientation::Null,
        noise: 0.0,
        posterior: mu,
    };
    if mu <= t.mu_excl_lo || mu >= t.mu_excl_hi {
        // boundary types are the first excluded ones: their contract has
        // degenerated to zero informativeness
        if mu >= t.mu_minus && mu <= t.mu_plus {
            // full coverage instance: the exclusion point sits on the
            // full-revelation interval's boundary only in degenerate cases
        } else {
            return Ok(null);
        }
    }
    if mu >= t.mu_minus && mu <= t.mu_plus {
        return Ok(AssignedContract {
            orientation: Orientation::Full,
            noise: 1.0,
            posterior: if mu >= t.mu0 { 1.0 } else { 0.0 },
        });
    }
    let side = if mu > t.mu_plus { Side::High } else { Side::Low };
    let orientation = match side {
        Side::High => Orientation::RevealL,
        Side::Low => Orientation::RevealH,
    };
    match solve_foc_posterior(mu, t.lambda, v, f, side, foc_tol) {
        Some(nu) => {
            let noise = noise_from_posterior(mu, nu, orientation)?;
            Ok(AssignedContract {
                orientation,
                noise,
                posterior: nu,
            })
        }
        None => Ok(null),
    }
}

/// Belief grid for menu construction: uniform plus every threshold, exactly.
fn menu_grid(t: &ThresholdSet, grid_size: usize) -> Vec<f64> {
    let base = linspace(0.0, 1.0, grid_size.max(2));
    numeric::merge_grid(
        &base,
        &[t.mu_excl_lo, t.mu_minus, t.mu0, t.mu_plus, t.mu_excl_hi],
    )
}

/// Surplus integrand `∂ΔV/∂mu` along the assigned contract curve.
fn surplus_integrand(
    v: &ValueFunction,
    f: &BeliefDensity,
    t: &ThresholdSet,
    grid: &[f64],
    foc_tol: f64,
) -> Result<(Vec<AssignedContract>, Vec<f64>), Error> {
    let mut contracts = Vec::with_capacity(grid.len());
    let mut integrand = Vec::with_capacity(grid.len());
    for &mu in grid {
        let c = contract_at(v, f, t, mu, foc_tol)?;
        let g = match c.orientation {
            Orientation::Null => 0.0,
            _ => delta_v_mu(Belief::clamped(mu), c.experiment(), v)?,
        };
        contracts.push(c);
        integrand.push(g);
    }
    Ok((contracts, integrand))
}

/// Residual of the multiplier constraint: the surplus integrand must
/// integrate to zero over `[0, 1]` so that prices vanish at both ends.
fn lambda_residual(
    v: &ValueFunction,
    f: &BeliefDensity,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<f64, Error> {
    let t = full_thresholds(v, f, lambda, opts)?;
    let grid = menu_grid(&t, opts.grid_size);
    let (_, integrand) = surplus_integrand(v, f, &t, &grid, opts.foc_tol)?;
    Ok(numeric::trapezoid(&grid, &integrand))
}

/// The multiplier pinning the price constants.
///
/// Symmetric instances (both `V` and `f` symmetric about 1/2) yield 1/2
/// exactly. Otherwise the constraint residual is bisected over the bracket.
pub fn solve_lambda(
    v: &ValueFunction,
    f: &BeliefDensity,
    opts: &SolveOptions,
) -> Result<f64, Error> {
    if v.is_symmetric() && f.is_symmetric() {
        return Ok(0.5);
    }
    let (lo, hi) = opts.lambda_bracket;
    let res_lo = lambda_residual(v, f, lo, opts)?;
    let res_hi = lambda_residual(v, f, hi, opts)?;
    if res_lo == 0.0 {
        return Ok(lo);
    }
    if res_hi == 0.0 {
        return Ok(hi);
    }
    if res_lo * res_hi > 0.0 {
        return Err(Error::MultiplierNotSolved {
            trace: format!(
                "constraint residual has no sign change on [{lo}, {hi}]: R({lo}) = {res_lo:.6e}, R({hi}) = {res_hi:.6e}"
            ),
        });
    }
    let lambda = bisect(
        |l| lambda_residual(v, f, l, opts).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-12,
    )
    .map_err(|e| Error::MultiplierNotSolved {
        trace: format!("bisection lost its bracket: f({}) = {:.6e}", e.lo, e.flo),
    })?;
    let residual = lambda_residual(v, f, lambda, opts)?;
    if residual.abs() > opts.lambda_residual_tol {
        return Err(Error::MultiplierNotSolved {
            trace: format!(
                "lambda = {lambda} leaves constraint residual {residual:.6e} above {:.1e}",
                opts.lambda_residual_tol
            ),
        });
    }
    Ok(lambda)
}

/// Per-type prices and surpluses along a contract curve.
///
/// `s(mu)` accumulates the surplus integrand from 0 by composite trapezoid;
/// `p(mu) = ΔV(mu) - s(mu)` on served beliefs and exactly 0 on the null
/// region.
pub fn price_schedule(
    v: &ValueFunction,
    grid: &[f64],
    contracts: &[AssignedContract],
    integrand: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let surplus = cumulative_trapezoid(grid, integrand);
    let prices: Vec<f64> = grid
        .iter()
        .zip(contracts.iter().zip(surplus.iter()))
        .map(|(&mu, (c, &s))| match c.orientation {
            Orientation::Null => 0.0,
            _ => delta_v(Belief::clamped(mu), c.experiment(), v) - s,
        })
        .collect();
    (prices, surplus)
}

/// Expected revenue of a menu: `∫ p(mu) f(mu) dmu` over the stored grid.
pub fn revenue(menu: &OptimalMenu, f: &BeliefDensity) -> f64 {
    let xs: Vec<f64> = menu.points.iter().map(|p| p.mu).collect();
    let ys: Vec<f64> = menu
        .points
        .iter()
        .map(|p| p.price * f.density(p.mu))
        .collect();
    numeric::trapezoid(&xs, &ys)
}

/// Flat-price benchmark: the best single price for full revelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatPriceOptimum {
    pub price: f64,
    pub revenue: f64,
    /// Served belief interval, when nonempty.
    pub served: Option<(f64, f64)>,
}

/// Maximize `p * Prob(coV(mu) - V(mu) >= p)`.
///
/// The hull gain is concave, so the served set is an interval whose edges are
/// bisected exactly; the price is located by a 1024-point scan refined by
/// golden-section search.
pub fn flat_price_optimum(v: &ValueFunction, f: &BeliefDensity) -> Result<FlatPriceOptimum, Error> {
    let hull = concave_hull(v, 2049)?;
    let gain = |mu: f64| hull.evaluate(mu) - v.value(mu);
    let probe = linspace(0.0, 1.0, 2049);
    let (mu_peak, max_gain) = probe
        .iter()
        .map(|&mu| (mu, gain(mu)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("nonempty grid");
    if max_gain <= 1e-14 {
        return Ok(FlatPriceOptimum {
            price: 0.0,
            revenue: 0.0,
            served: None,
        });
    }
    let served_mass = |p: f64| -> f64 {
        if p > max_gain {
            return 0.0;
        }
        let a = bisect(|mu| gain(mu) - p, 0.0, mu_peak, 1e-13).unwrap_or(mu_peak);
        let b = bisect(|mu| p - gain(mu), mu_peak, 1.0, 1e-13).unwrap_or(mu_peak);
        f.cdf(b) - f.cdf(a)
    };
    let objective = |p: f64| p * served_mass(p);
    let scan = linspace(0.0, max_gain, 1024);
    let (i_best, _) = scan
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, objective(p)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("nonempty scan");
    let lo = scan[i_best.saturating_sub(1)];
    let hi = scan[(i_best + 1).min(scan.len() - 1)];
    let (price, rev) = golden_section_max(objective, lo, hi, 1e-12);
    let a = bisect(|mu| gain(mu) - price, 0.0, mu_peak, 1e-13).unwrap_or(mu_peak);
    let b = bisect(|mu| price - gain(mu), mu_peak, 1.0, 1e-13).unwrap_or(mu_peak);
    Ok(FlatPriceOptimum {
        price,
        revenue: rev,
        served: Some((a, b)),
    })
}

/// Solve the full menu: multiplier, thresholds, contract curve, prices,
/// surpluses, and revenue.
///
/// Refuses kinked (action-table) value functions and, unless overridden,
/// instances that fail the regularity checks.
pub fn build_menu(
    v: &ValueFunction,
    f: &BeliefDensity,
    opts: &SolveOptions,
) -> Result<OptimalMenu, Error> {
    if !v.is_smooth() {
        return Err(Error::UnsupportedValueKind {
            operation: "build_menu",
        });
    }
    v.validate_convex(512)?;
    if !opts.override_assumptions {
        let gate = assumptions::gate_report(v, f, opts.lambda_bracket)?;
        if !gate.all_pass() {
            return Err(Error::AssumptionsFailed {
                summary: gate.summary(),
            });
        }
    }
    let lambda = solve_lambda(v, f, opts)?;
    let thresholds = full_thresholds(v, f, lambda, opts)?;
    let grid = menu_grid(&thresholds, opts.grid_size);
    let (contracts, integrand) = surplus_integrand(v, f, &thresholds, &grid, opts.foc_tol)?;
    let (prices, surpluses) = price_schedule(v, &grid, &contracts, &integrand);
    let points: Vec<MenuPoint> = grid
        .iter()
        .zip(contracts.iter())
        .zip(prices.iter().zip(surpluses.iter()))
        .map(|((&mu, c), (&price, &surplus))| {
            let dv = match c.orientation {
                Orientation::Null => 0.0,
                _ => delta_v(Belief::clamped(mu), c.experiment(), v),
            };
            MenuPoint {
                mu,
                orientation: c.orientation,
                noise: c.noise,
                posterior: c.posterior,
                price,
                surplus,
                gross_utility: v.value(mu) + dv,
            }
        })
        .collect();
    let mut menu = OptimalMenu {
        thresholds,
        points,
        revenue: 0.0,
    };
    menu.revenue = revenue(&menu, f);
    Ok(menu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_uniform() -> (ValueFunction, BeliefDensity) {
        (ValueFunction::quadratic(), BeliefDensity::uniform())
    }

    /// Example-instance posterior curve: nu(mu) on the high side.
    fn nu_high(mu: f64) -> f64 {
        (3.5 * mu - 2.0 * mu * mu - 1.0) / (2.0 * mu - 1.0)
    }

    #[test]
    fn thresholds_quadratic_uniform() {
        let (_, f) = quadratic_uniform();
        let t = solve_thresholds(&f, 0.5, 1e-12).unwrap();
        assert!((t.mu_minus - 0.25).abs() < 1e-10);
        assert!((t.mu_plus - 0.75).abs() < 1e-10);
        assert!((t.mu0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thresholds_triangular_closed_form() {
        let f = BeliefDensity::triangular();
        let t = solve_thresholds(&f, 0.5, 1e-12).unwrap();
        // 4(1-mu)^2 + 2(1-mu)^2 = 0.5  =>  mu+ = 1 - 1/(2 sqrt(3))
        let expected = 1.0 - 1.0 / (2.0 * 3.0_f64.sqrt());
        assert!((t.mu_plus - expected).abs() < 1e-10, "got {}", t.mu_plus);
        assert!((t.mu0 - 0.5).abs() < 1e-12);
        assert!((t.mu_minus - (1.0 - expected)).abs() < 1e-10);
    }

    #[test]
    fn foc_posterior_matches_printed_curve() {
        let (v, f) = quadratic_uniform();
        let nu = solve_foc_posterior(0.8, 0.5, &v, &f, Side::High, 1e-14).unwrap();
        assert!((nu - nu_high(0.8)).abs() < 1e-10);
        assert!((nu - 0.86667).abs() < 1e-5);
        let residual = foc_reveal_l(nu, 0.8, 0.5, &v, &f);
        assert!(residual.abs() < 1e-10);
    }

    #[test]
    fn foc_posterior_at_mu_plus_is_full_revelation() {
        let (v, f) = quadratic_uniform();
        let nu = solve_foc_posterior(0.75, 0.5, &v, &f, Side::High, 1e-14).unwrap();
        assert!((nu - 1.0).abs() < 1e-9);
    }

    #[test]
    fn foc_posterior_low_side_mirrors_high_side() {
        let (v, f) = quadratic_uniform();
        let nu = solve_foc_posterior(0.2, 0.5, &v, &f, Side::Low, 1e-14).unwrap();
        assert!((nu - (1.0 - nu_high(0.8))).abs() < 1e-10);
    }

    #[test]
    fn noise_inversion_round_trips() {
        let q = noise_from_posterior(0.8, nu_high(0.8), Orientation::RevealL).unwrap();
        assert!((q - 0.38462).abs() < 1e-5);
        // posterior of the noisy signal at that q recovers nu
        let e = SimpleExperiment::reveal_l(q).unwrap();
        let post = crate::model::experiment::posterior(
            &e.into(),
            1,
            Belief::new(0.8).unwrap(),
        )
        .unwrap();
        assert!((post.value() - nu_high(0.8)).abs() < 1e-12);
    }

    #[test]
    fn noise_inversion_boundaries() {
        assert_eq!(
            noise_from_posterior(0.8, 0.8, Orientation::RevealL).unwrap(),
            0.0
        );
        assert_eq!(
            noise_from_posterior(0.8, 1.0, Orientation::RevealL).unwrap(),
            1.0
        );
        assert!(noise_from_posterior(0.8, 0.5, Orientation::RevealL).is_err());
        assert!(noise_from_posterior(0.2, 0.5, Orientation::RevealH).is_err());
    }

    #[test]
    fn exclusion_points_solve_the_printed_quadratic() {
        let (v, f) = quadratic_uniform();
        let core = solve_thresholds(&f, 0.5, 1e-12).unwrap();
        let hi = exclusion_point(0.5, &v, &f, &core, Side::High, 1e-12);
        let expected = (4.5 + 4.25_f64.sqrt()) / 8.0;
        assert!((hi - expected).abs() < 1e-9, "got {hi}");
        let lo = exclusion_point(0.5, &v, &f, &core, Side::Low, 1e-12);
        assert!((lo - (1.0 - expected)).abs() < 1e-9, "got {lo}");
    }

    #[test]
    fn lambda_is_half_for_symmetric_instances() {
        let (v, f) = quadratic_uniform();
        assert_eq!(solve_lambda(&v, &f, &SolveOptions::default()).unwrap(), 0.5);
        let tri = BeliefDensity::triangular();
        assert_eq!(solve_lambda(&v, &tri, &SolveOptions::default()).unwrap(), 0.5);
    }

    #[test]
    fn lambda_solves_mildly_tilted_density() {
        let v = ValueFunction::quadratic();
        // 1 + 0.1 (mu - 0.5)
        let f = BeliefDensity::tabulated(vec![0.0, 1.0], vec![0.95, 1.05]).unwrap();
        let opts = SolveOptions {
            grid_size: 2001,
            ..SolveOptions::default()
        };
        let lambda = solve_lambda(&v, &f, &opts).unwrap();
        assert!(lambda != 0.5);
        assert!((0.05..=0.95).contains(&lambda));
        let residual = lambda_residual(&v, &f, lambda, &opts).unwrap();
        assert!(residual.abs() < 1e-8, "residual {residual}");
    }

    #[test]
    fn flat_price_quadratic_uniform_closed_form() {
        let (v, f) = quadratic_uniform();
        let flat = flat_price_optimum(&v, &f).unwrap();
        assert!((flat.price - 1.0 / 6.0).abs() < 1e-6, "p* = {}", flat.price);
        assert!(
            (flat.revenue - 1.0 / (6.0 * 3.0_f64.sqrt())).abs() < 1e-6,
            "revenue = {}",
            flat.revenue
        );
        let (a, b) = flat.served.unwrap();
        let mu_p = (1.0 - (1.0 - 4.0 * flat.price).sqrt()) / 2.0;
        assert!((a - mu_p).abs() < 1e-6);
        assert!((b - (1.0 - mu_p)).abs() < 1e-6);
    }

    #[test]
    fn flat_price_linear_value_is_zero() {
        let v = ValueFunction::polynomial(vec![0.3, 0.4]).unwrap();
        let f = BeliefDensity::uniform();
        let flat = flat_price_optimum(&v, &f).unwrap();
        assert_eq!(flat.revenue, 0.0);
        assert!(flat.served.is_none());
    }

    #[test]
    fn build_menu_refuses_action_tables() {
        let v = crate::model::value::value_from_actions(vec![
            crate::model::value::ActionPayoff { low: 1.0, high: 0.0 },
            crate::model::value::ActionPayoff { low: 0.0, high: 1.0 },
        ])
        .unwrap();
        let f = BeliefDensity::uniform();
        let err = build_menu(&v, &f, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedValueKind { .. }));
    }

    #[test]
    fn golden_menu_quadratic_uniform() {
        let (v, f) = quadratic_uniform();
        let menu = build_menu(&v, &f, &SolveOptions::default()).unwrap();
        let t = menu.thresholds;
        assert_eq!(t.lambda, 0.5);
        assert!((t.mu_minus - 0.25).abs() < 1e-9);
        assert!((t.mu_plus - 0.75).abs() < 1e-9);
        let expected_excl = (4.5 + 4.25_f64.sqrt()) / 8.0;
        assert!((t.mu_excl_hi - expected_excl).abs() < 1e-8);
        assert!((t.mu_excl_lo - (1.0 - expected_excl)).abs() < 1e-8);
        // revenue dominates the flat benchmark
        let flat = flat_price_optimum(&v, &f).unwrap();
        assert!(menu.revenue >= flat.revenue - 1e-9);
        // flat price is constant on the full-revelation interval
        let full_prices: Vec<f64> = menu
            .points
            .iter()
            .filter(|p| p.orientation == Orientation::Full)
            .map(|p| p.price)
            .collect();
        let p0 = full_prices[0];
        for p in &full_prices {
            assert!((p - p0).abs() < 1e-8);
        }
        // menu is symmetric: noise at mu matches noise at 1-mu
        for &mu in &[0.19, 0.22, 0.78, 0.81] {
            let c = contract_at(&v, &f, &t, mu, 1e-14).unwrap();
            let m = contract_at(&v, &f, &t, 1.0 - mu, 1e-14).unwrap();
            assert!((c.noise - m.noise).abs() < 1e-9, "mu = {mu}");
        }
    }

    #[test]
    fn contracts_are_monotone_on_the_partial_arcs() {
        let (v, f) = quadratic_uniform();
        let menu = build_menu(&v, &f, &SolveOptions::default()).unwrap();
        let mut last_high: Option<(f64, f64)> = None;
        let mut last_low: Option<(f64, f64)> = None;
        for p in &menu.points {
            match p.orientation {
                Orientation::RevealL => {
                    assert!(p.posterior > p.mu && p.posterior < 1.0 + 1e-12);
                    if let Some((prev_mu, prev_noise)) = last_high {
                        assert!(p.mu > prev_mu);
                        assert!(
                            p.noise < prev_noise,
                            "reveal-l noise must fall strictly in mu"
                        );
                    }
                    last_high = Some((p.mu, p.noise));
                }
                Orientation::RevealH => {
                    assert!(p.posterior < p.mu && p.posterior > -1e-12);
                    if let Some((prev_mu, prev_noise)) = last_low {
                        assert!(p.mu > prev_mu);
                        assert!(
                            p.noise > prev_noise,
                            "reveal-h noise must rise strictly in mu"
                        );
                    }
                    last_low = Some((p.mu, p.noise));
                }
                _ => {}
            }
        }
        assert!(last_high.is_some() && last_low.is_some());
    }

    #[test]
    fn menu_prices_are_nonnegative_and_surplus_vanishes_at_ends() {
        let (v, f) = quadratic_uniform();
        let menu = build_menu(&v, &f, &SolveOptions::default()).unwrap();
        for p in &menu.points {
            assert!(p.price >= -1e-9, "price {} at mu {}", p.price, p.mu);
            assert!(p.surplus >= -1e-9, "surplus {} at mu {}", p.surplus, p.mu);
        }
        let last = menu.points.last().unwrap();
        assert!(last.surplus.abs() < 1e-9);
        assert!(menu.points[0].surplus.abs() < 1e-12);
    }

    #[test]
    fn revenue_of_null_only_menu_is_zero() {
        let (_, f) = quadratic_uniform();
        let points: Vec<MenuPoint> = linspace(0.0, 1.0, 501)
            .into_iter()
            .map(|mu| MenuPoint {
                mu,
                orientation: Orientation::Null,
                noise: 0.0,
                posterior: mu,
                price: 0.0,
                surplus: 0.0,
                gross_utility: 0.0,
            })
            .collect();
        let menu = OptimalMenu {
            thresholds: full_thresholds(
                &ValueFunction::quadratic(),
                &f,
                0.5,
                &SolveOptions::default(),
            )
            .unwrap(),
            points,
            revenue: 0.0,
        };
        assert_eq!(revenue(&menu, &f), 0.0);
    }

    #[test]
    fn revenue_of_flat_only_menu_matches_closed_form() {
        // full revelation at price 1/6 sold to gains >= 1/6: served set
        // [mu_p, 1-mu_p] with mu_p = (1 - sqrt(1/3))/2, revenue (1/6)sqrt(1/3)
        let (v, f) = quadratic_uniform();
        let price: f64 = 1.0 / 6.0;
        let mu_p = (1.0 - (1.0 - 4.0 * price).sqrt()) / 2.0;
        let grid = crate::numeric::merge_grid(&linspace(0.0, 1.0, 2001), &[mu_p, 1.0 - mu_p]);
        let points: Vec<MenuPoint> = grid
            .into_iter()
            .map(|mu| {
                let served = mu >= mu_p && mu <= 1.0 - mu_p;
                MenuPoint {
                    mu,
                    orientation: if served {
                        Orientation::Full
                    } else {
                        Orientation::Null
                    },
                    noise: if served { 1.0 } else { 0.0 },
                    posterior: if served { 1.0 } else { mu },
                    price: if served { price } else { 0.0 },
                    surplus: if served { -v.value(mu) - price } else { 0.0 },
                    gross_utility: if served { 0.0 } else { v.value(mu) },
                }
            })
            .collect();
        let menu = OptimalMenu {
            thresholds: full_thresholds(&v, &f, 0.5, &SolveOptions::default()).unwrap(),
            points,
            revenue: 0.0,
        };
        let expected = price * (1.0 / 3.0_f64).sqrt();
        let got = revenue(&menu, &f);
        // the quadrature straddles the price discontinuity in one cell
        assert!((got - expected).abs() < 1e-4, "got {got}, expected {expected}");
    }

    #[test]
    fn grid_refinement_is_stable() {
        let (v, f) = quadratic_uniform();
        let coarse = build_menu(&v, &f, &SolveOptions::default()).unwrap();
        let opts = SolveOptions {
            grid_size: 2001,
            ..SolveOptions::default()
        };
        let fine = build_menu(&v, &f, &opts).unwrap();
        let rel = (coarse.revenue - fine.revenue).abs() / fine.revenue;
        assert!(rel < 1e-6, "relative revenue drift {rel}");
    }
}
