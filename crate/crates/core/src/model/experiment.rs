//! Experiments: garblings of the seller's binary signal.
//!
//! A general experiment is a list of signals with conditional probabilities
//! `(g(s|h), g(s|l))`. A simple experiment has two signals, one of which
//! conclusively reveals a state:
//!
//! ```text
//! reveal-l, noise q:  signal 0 ("conclusive"): g(.|h) = 0,     g(.|l) = q
//!                     signal 1 ("noisy"):      g(.|h) = 1,     g(.|l) = 1 - q
//! reveal-h, noise p:  signal 0 ("conclusive"): g(.|h) = p,     g(.|l) = 0
//!                     signal 1 ("noisy"):      g(.|h) = 1 - p, g(.|l) = 1
//! ```
//!
//! `q = 1` (or `p = 1`) is full revelation, `q = 0` (or `p = 0`) is the null
//! experiment.

use crate::error::Error;
use crate::model::belief::Belief;
use crate::model::value::ValueFunction;
use serde::{Deserialize, Serialize};

/// Which state, if any, an experiment's conclusive signal reveals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    RevealH,
    RevealL,
    Full,
    Null,
}

impl Orientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::RevealH => "reveal-h",
            Orientation::RevealL => "reveal-l",
            Orientation::Full => "full",
            Orientation::Null => "null",
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "reveal-h" => Ok(Orientation::RevealH),
            "reveal-l" => Ok(Orientation::RevealL),
            "full" => Ok(Orientation::Full),
            "null" => Ok(Orientation::Null),
            other => Err(Error::invalid("orientation", other.to_owned())),
        }
    }
}

/// A two-signal experiment with one conclusive signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleExperiment {
    pub orientation: Orientation,
    /// For reveal-h: probability state `h` emits the conclusive signal.
    /// For reveal-l: probability state `l` emits the conclusive signal.
    /// Fixed at 1 for full revelation and 0 for the null experiment.
    pub noise: f64,
}

impl SimpleExperiment {
    pub fn reveal_l(q: f64) -> Result<Self, Error> {
        Self::bounded(Orientation::RevealL, q)
    }

    pub fn reveal_h(p: f64) -> Result<Self, Error> {
        Self::bounded(Orientation::RevealH, p)
    }

    pub fn full() -> Self {
        SimpleExperiment {
            orientation: Orientation::Full,
            noise: 1.0,
        }
    }

    pub fn null() -> Self {
        SimpleExperiment {
            orientation: Orientation::Null,
            noise: 0.0,
        }
    }

    fn bounded(orientation: Orientation, noise: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&noise) || !noise.is_finite() {
            return Err(Error::invalid(
                "experiment noise",
                format!("{noise} is not in [0, 1]"),
            ));
        }
        Ok(SimpleExperiment { orientation, noise })
    }

    /// Collapse boundary noise levels onto the full / null experiments.
    pub fn canonical(self) -> SimpleExperiment {
        match self.orientation {
            Orientation::RevealH | Orientation::RevealL => {
                if self.noise >= 1.0 {
                    SimpleExperiment::full()
                } else if self.noise <= 0.0 {
                    SimpleExperiment::null()
                } else {
                    self
                }
            }
            _ => self,
        }
    }

    /// Signals as `(g(s|h), g(s|l))` pairs; conclusive signal first.
    pub fn signals(&self) -> Vec<(f64, f64)> {
        match self.orientation {
            Orientation::Null => vec![(1.0, 1.0)],
            Orientation::Full => vec![(1.0, 0.0), (0.0, 1.0)],
            Orientation::RevealL => vec![(0.0, self.noise), (1.0, 1.0 - self.noise)],
            Orientation::RevealH => vec![(self.noise, 0.0), (1.0 - self.noise, 1.0)],
        }
    }

    pub fn to_general(&self) -> GeneralExperiment {
        GeneralExperiment::new(self.signals()).expect("simple experiments are always consistent")
    }
}

/// An experiment with any finite number of signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralExperiment {
    /// Per-signal conditional probabilities `(g(s|h), g(s|l))`.
    signals: Vec<(f64, f64)>,
}

impl GeneralExperiment {
    /// Build from `(g(s|h), g(s|l))` pairs; each column must sum to 1.
    pub fn new(signals: Vec<(f64, f64)>) -> Result<Self, Error> {
        if signals.is_empty() {
            return Err(Error::invalid("experiment", "needs at least one signal"));
        }
        for &(gh, gl) in &signals {
            if !(0.0..=1.0).contains(&gh) || !(0.0..=1.0).contains(&gl) {
                return Err(Error::invalid(
                    "experiment",
                    format!("likelihood ({gh}, {gl}) outside [0, 1]"),
                ));
            }
        }
        let (sum_h, sum_l) = signals
            .iter()
            .fold((0.0, 0.0), |(a, b), &(gh, gl)| (a + gh, b + gl));
        if (sum_h - 1.0).abs() > 1e-12 || (sum_l - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "experiment",
                format!("likelihoods must sum to 1 per state (got {sum_h}, {sum_l})"),
            ));
        }
        Ok(GeneralExperiment { signals })
    }

    pub fn signals(&self) -> &[(f64, f64)] {
        &self.signals
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    /// Recognize a simple experiment (after dropping zero-mass signals).
    pub fn as_simple(&self) -> Option<SimpleExperiment> {
        let live: Vec<(f64, f64)> = self
            .signals
            .iter()
            .copied()
            .filter(|&(gh, gl)| gh > 1e-12 || gl > 1e-12)
            .collect();
        match live.len() {
            1 => Some(SimpleExperiment::null()),
            2 => {
                let eps = 1e-12;
                let conclusive_l = |s: (f64, f64)| s.0 <= eps && s.1 > eps;
                let conclusive_h = |s: (f64, f64)| s.1 <= eps && s.0 > eps;
                if conclusive_h(live[0]) && conclusive_l(live[1]) {
                    return Some(SimpleExperiment::full());
                }
                if conclusive_l(live[0]) && conclusive_h(live[1]) {
                    return Some(SimpleExperiment::full());
                }
                for (i, j) in [(0usize, 1usize), (1, 0)] {
                    if conclusive_l(live[i]) && live[j].0 > eps && live[j].1 > eps {
                        return SimpleExperiment::reveal_l(live[i].1).ok();
                    }
                    if conclusive_h(live[i]) && live[j].0 > eps && live[j].1 > eps {
                        return SimpleExperiment::reveal_h(live[i].0).ok();
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// Canonical key for deduplication up to signal relabeling: zero-mass
    /// signals dropped, remaining signals sorted.
    pub fn canonical_key(&self) -> Vec<(u64, u64)> {
        let mut live: Vec<(f64, f64)> = self
            .signals
            .iter()
            .copied()
            .filter(|&(gh, gl)| gh > 1e-12 || gl > 1e-12)
            .collect();
        live.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
        });
        live.iter()
            .map(|&(gh, gl)| (quantize(gh), quantize(gl)))
            .collect()
    }
}

fn quantize(x: f64) -> u64 {
    (x * 1e12).round() as u64
}

/// Either kind of experiment, as offered in a contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExperimentKind {
    Simple(SimpleExperiment),
    General(GeneralExperiment),
}

impl ExperimentKind {
    fn for_each_signal(&self, mut visit: impl FnMut(usize, f64, f64)) {
        match self {
            ExperimentKind::Simple(e) => {
                for (i, (gh, gl)) in e.signals().into_iter().enumerate() {
                    visit(i, gh, gl);
                }
            }
            ExperimentKind::General(e) => {
                for (i, &(gh, gl)) in e.signals().iter().enumerate() {
                    visit(i, gh, gl);
                }
            }
        }
    }
}

impl From<SimpleExperiment> for ExperimentKind {
    fn from(e: SimpleExperiment) -> Self {
        ExperimentKind::Simple(e)
    }
}

impl From<GeneralExperiment> for ExperimentKind {
    fn from(e: GeneralExperiment) -> Self {
        ExperimentKind::General(e)
    }
}

/// Bayesian update after observing signal `s` of experiment `e` at `prior`.
///
/// `post = g(s|h) mu / (g(s|h) mu + g(s|l) (1 - mu))`. Conditioning on a
/// zero-probability signal is a domain error naming the signal.
pub fn posterior(
    e: &ExperimentKind,
    signal: usize,
    prior: Belief,
) -> Result<Belief, Error> {
    let mut found: Option<(f64, f64)> = None;
    e.for_each_signal(|i, gh, gl| {
        if i == signal {
            found = Some((gh, gl));
        }
    });
    let (gh, gl) = found.ok_or_else(|| {
        Error::invalid("signal index", format!("experiment has no signal {signal}"))
    })?;
    let mu = prior.value();
    let mass = gh * mu + gl * (1.0 - mu);
    if mass <= 0.0 {
        return Err(Error::ZeroProbabilitySignal { signal, prior: mu });
    }
    Ok(Belief::clamped(gh * mu / mass))
}

/// Expected value of an experiment to a buyer with belief `mu`:
/// `U(e, mu) = sum_s P(s | mu) V(posterior(s))`.
///
/// This is the generic signal-by-signal route; see [`crate::model::surplus::delta_v`]
/// for the branch-formula route the two are cross-checked against.
pub fn experiment_value(e: &ExperimentKind, mu: Belief, v: &ValueFunction) -> f64 {
    let mu = mu.value();
    let mut total = 0.0;
    e.for_each_signal(|_, gh, gl| {
        let mass = gh * mu + gl * (1.0 - mu);
        if mass > 0.0 {
            total += mass * v.value(gh * mu / mass);
        }
    });
    total
}
