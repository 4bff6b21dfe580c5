//! Property suites over the model: martingale updating, the value of
//! information, garbling monotonicity, branch agreement, and derivative
//! consistency.

use infomenu_core::model::belief::Belief;
use infomenu_core::model::experiment::{experiment_value, posterior, ExperimentKind};
use infomenu_core::model::surplus::{delta_v, delta_v_mu};
use infomenu_core::model::value::concave_hull;
use infomenu_core::numeric::linspace;
use infomenu_core::{BeliefDensity, GeneralExperiment, SimpleExperiment, ValueFunction};
use proptest::prelude::*;

fn b(x: f64) -> Belief {
    Belief::new(x).unwrap()
}

fn experiment_zoo() -> Vec<SimpleExperiment> {
    let mut zoo = vec![SimpleExperiment::null(), SimpleExperiment::full()];
    for noise in [0.1, 0.25, 0.38462, 0.5, 0.75, 0.9] {
        zoo.push(SimpleExperiment::reveal_l(noise).unwrap());
        zoo.push(SimpleExperiment::reveal_h(noise).unwrap());
    }
    zoo
}

fn value_zoo() -> Vec<ValueFunction> {
    vec![
        ValueFunction::quadratic(),
        ValueFunction::polynomial(vec![0.0, -1.5, 0.5, 1.0]).unwrap(),
    ]
}

/// Posterior expectations reproduce the prior on a 101-point grid.
#[test]
fn martingale_on_grid() {
    for e in experiment_zoo() {
        let kind = ExperimentKind::from(e);
        for &mu in linspace(0.0, 1.0, 101).iter() {
            let mut mean = 0.0;
            for (s, (gh, gl)) in e.signals().into_iter().enumerate() {
                let mass = gh * mu + gl * (1.0 - mu);
                if mass > 0.0 {
                    mean += mass * posterior(&kind, s, b(mu)).unwrap().value();
                }
            }
            assert!(
                (mean - mu).abs() < 1e-12,
                "martingale broke at mu={mu} for {:?}",
                e.orientation
            );
        }
    }
}

/// Information is valuable: `U(e, mu) >= V(mu)` up to rounding.
#[test]
fn experiments_never_hurt() {
    for v in value_zoo() {
        for e in experiment_zoo() {
            let kind = ExperimentKind::from(e);
            for &mu in linspace(0.0, 1.0, 101).iter() {
                let gain = experiment_value(&kind, b(mu), &v) - v.value(mu);
                assert!(gain >= -1e-12, "negative gain {gain} at mu={mu}");
            }
        }
    }
}

/// Value is nondecreasing in the noise parameter for both orientations.
#[test]
fn garbling_monotonicity() {
    let v = ValueFunction::quadratic();
    let noises = linspace(0.0, 1.0, 41);
    for &mu in linspace(0.01, 0.99, 50).iter() {
        let mut prev_l = f64::NEG_INFINITY;
        let mut prev_h = f64::NEG_INFINITY;
        for &x in noises.iter() {
            let ul = experiment_value(
                &SimpleExperiment::reveal_l(x).unwrap().into(),
                b(mu),
                &v,
            );
            let uh = experiment_value(
                &SimpleExperiment::reveal_h(x).unwrap().into(),
                b(mu),
                &v,
            );
            assert!(ul >= prev_l - 1e-12, "reveal-l value fell at mu={mu}, q={x}");
            assert!(uh >= prev_h - 1e-12, "reveal-h value fell at mu={mu}, p={x}");
            prev_l = ul;
            prev_h = uh;
        }
    }
}

/// The two-branch surplus formula agrees with the signal sum on a product grid.
#[test]
fn branch_formula_agrees_with_signal_sum() {
    for v in value_zoo() {
        for &mu in linspace(0.0, 1.0, 51).iter() {
            for &noise in linspace(0.0, 1.0, 21).iter() {
                for e in [
                    SimpleExperiment::reveal_l(noise).unwrap(),
                    SimpleExperiment::reveal_h(noise).unwrap(),
                ] {
                    let lhs = delta_v(b(mu), e, &v);
                    let rhs = experiment_value(&e.into(), b(mu), &v) - v.value(mu);
                    assert!((lhs - rhs).abs() < 1e-12, "mu={mu} noise={noise}");
                }
            }
        }
    }
}

/// Analytic belief derivative matches centered finite differences.
#[test]
fn belief_derivative_matches_finite_differences() {
    let h = 1e-5;
    for v in value_zoo() {
        for e in experiment_zoo() {
            for &mu in linspace(0.02, 0.98, 33).iter() {
                let an = delta_v_mu(b(mu), e, &v).unwrap();
                let fd = (delta_v(b(mu + h), e, &v) - delta_v(b(mu - h), e, &v)) / (2.0 * h);
                assert!(
                    (an - fd).abs() <= 1e-6 * (1.0 + an.abs()),
                    "mu={mu} {:?} noise={}: analytic {an} vs fd {fd}",
                    e.orientation,
                    e.noise
                );
            }
        }
    }
}

proptest! {
    /// Martingale property for arbitrary two-signal experiments and priors.
    #[test]
    fn martingale_randomized(gh in 0.0f64..=1.0, gl in 0.0f64..=1.0, mu in 0.0f64..=1.0) {
        let e = GeneralExperiment::new(vec![(gh, gl), (1.0 - gh, 1.0 - gl)]).unwrap();
        let kind = ExperimentKind::General(e.clone());
        let mut mean = 0.0;
        let mut covered = 0.0;
        for (s, &(sh, sl)) in e.signals().iter().enumerate() {
            let mass = sh * mu + sl * (1.0 - mu);
            if mass > 0.0 {
                mean += mass * posterior(&kind, s, b(mu)).unwrap().value();
                covered += mass;
            }
        }
        prop_assert!((covered - 1.0).abs() < 1e-12);
        prop_assert!((mean - mu).abs() < 1e-12);
    }

    /// The noise parameter round-trips through the induced posterior.
    #[test]
    fn noise_round_trips_through_posterior(mu in 0.01f64..=0.99, noise in 0.001f64..=0.999) {
        use infomenu_core::solver::noise_from_posterior;
        use infomenu_core::Orientation;
        let e = SimpleExperiment::reveal_l(noise).unwrap();
        let nu = posterior(&e.into(), 1, b(mu)).unwrap().value();
        let back = noise_from_posterior(mu, nu, Orientation::RevealL).unwrap();
        prop_assert!((back - noise).abs() < 1e-12);
    }

    /// The concave hull majorizes the value and is concave along triples.
    #[test]
    fn hull_majorizes_and_is_concave(c2 in 0.0f64..=2.0, c3 in -0.5f64..=0.5) {
        let v = ValueFunction::polynomial(vec![0.0, -1.0 - c3, c2.max(0.1), c3]).unwrap();
        if v.validate_convex(128).is_err() {
            return Ok(());
        }
        let hull = concave_hull(&v, 257).unwrap();
        let grid = linspace(0.0, 1.0, 101);
        for &mu in grid.iter() {
            prop_assert!(hull.evaluate(mu) >= v.value(mu) - 1e-12);
        }
        for w in grid.windows(3) {
            let mid = 0.5 * (hull.evaluate(w[0]) + hull.evaluate(w[2]));
            prop_assert!(hull.evaluate(w[1]) >= mid - 1e-12);
        }
        prop_assert!((hull.evaluate(0.0) - v.value(0.0)).abs() < 1e-12);
        prop_assert!((hull.evaluate(1.0) - v.value(1.0)).abs() < 1e-12);
    }

    /// Belief density quantiles invert the CDF.
    #[test]
    fn quantile_inverts_cdf(a in 0.1f64..=3.0, c in 0.1f64..=3.0, u in 0.0f64..=1.0) {
        let f = BeliefDensity::tabulated(vec![0.0, 0.5, 1.0], vec![a, c, a]).unwrap();
        prop_assert!((f.cdf(f.quantile(u)) - u).abs() < 1e-9);
    }
}
