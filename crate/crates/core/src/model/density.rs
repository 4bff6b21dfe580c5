//! Distributions of the buyer's private belief.
//!
//! Every built-in family is a piecewise-linear density on `[0, 1]`, which
//! keeps the density, CDF, and quantile all analytic: the CDF is piecewise
//! quadratic and is inverted per segment in closed form. No numerical
//! differentiation ever feeds the solver's first-order conditions.

use crate::error::Error;
use serde::{Deserialize, Serialize};

/// A normalized piecewise-linear density on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearDensity {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// CDF at each node (cumulative, ends at 1).
    cdf_at_nodes: Vec<f64>,
}

impl PiecewiseLinearDensity {
    /// Build from node positions and density values, normalizing total mass.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self, Error> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::invalid(
                "density table",
                "need >= 2 nodes and matching value count",
            ));
        }
        if (nodes[0] - 0.0).abs() > 1e-12 || (nodes[nodes.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("density table", "nodes must span [0, 1]"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("density table", "nodes must be increasing"));
        }
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::invalid(
                "density table",
                "density values must be finite and nonnegative",
            ));
        }
        let mut nodes = nodes;
        nodes[0] = 0.0;
        let last = nodes.len() - 1;
        nodes[last] = 1.0;
        let mass: f64 = nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
            .sum();
        if mass <= 0.0 {
            return Err(Error::invalid("density table", "total mass must be positive"));
        }
        let values: Vec<f64> = values.iter().map(|v| v / mass).collect();
        let mut cdf_at_nodes = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cdf_at_nodes.push(0.0);
        for i in 1..nodes.len() {
            acc += 0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
            cdf_at_nodes.push(acc);
        }
        // trapezoid over the exact segments is exact for a PWL density;
        // pin the endpoint against accumulated rounding
        *cdf_at_nodes.last_mut().unwrap() = 1.0;
        Ok(PiecewiseLinearDensity {
            nodes,
            values,
            cdf_at_nodes,
        })
    }

    fn segment_of(&self, mu: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|x| x.partial_cmp(&mu).unwrap())
        {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }

    pub fn density(&self, mu: f64) -> f64 {
        let mu = mu.clamp(0.0, 1.0);
        let i = self.segment_of(mu);
        let w = (mu - self.nodes[i]) / (self.nodes[i + 1] - self.nodes[i]);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    pub fn cdf(&self, mu: f64) -> f64 {
        if mu <= 0.0 {
            return 0.0;
        }
        if mu >= 1.0 {
            return 1.0;
        }
        let i = self.segment_of(mu);
        let d = mu - self.nodes[i];
        let slope = (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i]);
        self.cdf_at_nodes[i] + self.values[i] * d + 0.5 * slope * d * d
    }

    /// Inverse CDF by closed-form inversion of the segment quadratic.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let i = match self
            .cdf_at_nodes
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => return self.nodes[i.min(self.nodes.len() - 1)],
            Err(i) => i - 1,
        };
        let width = self.nodes[i + 1] - self.nodes[i];
        let f0 = self.values[i];
        let slope = (self.values[i + 1] - self.values[i]) / width;
        let c = u - self.cdf_at_nodes[i];
        // solve (slope/2) d^2 + f0 d = c for d in [0, width]
        let d = if slope.abs() < 1e-14 {
            c / f0
        } else {
            let disc = (f0 * f0 + 2.0 * slope * c).max(0.0);
            let denom = f0 + disc.sqrt();
            if denom.abs() > 1e-300 {
                2.0 * c / denom
            } else {
                // density starts at zero and falls: degenerate, walk the root
                (2.0 * c / slope).abs().sqrt()
            }
        };
        (self.nodes[i] + d.clamp(0.0, width)).clamp(0.0, 1.0)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The distribution of the buyer's private belief: density `f`, CDF `F`,
/// quantile `F^{-1}`, and an exactness flag for symmetry about 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefDensity {
    label: String,
    pwl: PiecewiseLinearDensity,
    symmetric: bool,
}

impl BeliefDensity {
    /// Uniform density on `[0, 1]`.
    pub fn uniform() -> Self {
        BeliefDensity {
            label: "uniform".to_owned(),
            pwl: PiecewiseLinearDensity::new(vec![0.0, 1.0], vec![1.0, 1.0])
                .expect("static table"),
            symmetric: true,
        }
    }

    /// Symmetric triangular density peaking at 1/2.
    pub fn triangular() -> Self {
        BeliefDensity {
            label: "triangular".to_owned(),
            pwl: PiecewiseLinearDensity::new(vec![0.0, 0.5, 1.0], vec![0.0, 2.0, 0.0])
                .expect("static table"),
            symmetric: true,
        }
    }

    /// Arbitrary piecewise-linear density from a table; normalized, with the
    /// symmetry flag set when the table is exactly mirror-symmetric.
    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self, Error> {
        let pwl = PiecewiseLinearDensity::new(nodes, values)?;
        let symmetric = table_is_symmetric(&pwl);
        Ok(BeliefDensity {
            label: "tabulated".to_owned(),
            pwl,
            symmetric,
        })
    }

    /// Tabulated density with an explicit label (used by derived families).
    pub(crate) fn labeled(
        label: String,
        pwl: PiecewiseLinearDensity,
        symmetric: bool,
    ) -> Self {
        BeliefDensity {
            label,
            pwl,
            symmetric,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn density(&self, mu: f64) -> f64 {
        self.pwl.density(mu)
    }

    pub fn cdf(&self, mu: f64) -> f64 {
        self.pwl.cdf(mu)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.pwl.quantile(u)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn piecewise(&self) -> &PiecewiseLinearDensity {
        &self.pwl
    }
}

fn table_is_symmetric(pwl: &PiecewiseLinearDensity) -> bool {
    pwl.nodes()
        .iter()
        .all(|&x| (pwl.density(x) - pwl.density(1.0 - x)).abs() <= 1e-12)
        && crate::numeric::linspace(0.0, 1.0, 129)
            .iter()
            .all(|&x| (pwl.density(x) - pwl.density(1.0 - x)).abs() <= 1e-12)
}
