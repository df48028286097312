//! Gauss-Legendre quadrature on the box `[-l, l]`.

use serde::{Deserialize, Serialize};

use crate::config::MIN_GRID_POINTS;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    GaussLegendre,
}

/// Quadrature nodes in `(-l, l)`, strictly increasing and mirror-symmetric:
/// `nodes[i] == -nodes[len - 1 - i]` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    length_l: f64,
    rule: QuadratureRule,
}

impl PositionGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length_l(&self) -> f64 {
        self.length_l
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    /// Index of the node at `-nodes[i]`.
    pub fn mirror(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&q, &w)| w * f(q))
            .sum()
    }
}

/// Builds the `points`-node Gauss-Legendre rule mapped to `[-l, l]`.
pub fn build_grid(points: usize, length_l: f64) -> Result<PositionGrid> {
    if points < MIN_GRID_POINTS {
        return Err(Error::GridTooSmall {
            min: MIN_GRID_POINTS,
            got: points,
        });
    }
    if !(length_l.is_finite() && length_l > 0.0) {
        return Err(Error::Config(format!(
            "length_l must be positive, got {length_l}"
        )));
    }
    let (x, w) = gauss_legendre(points);
    Ok(PositionGrid {
        nodes: x.iter().map(|&x| x * length_l).collect(),
        weights: w.iter().map(|&w| w * length_l).collect(),
        length_l,
        rule: QuadratureRule::GaussLegendre,
    })
}

/// Nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on `P_n` from the Tricomi initial guess; only the
/// positive half is computed and the rest mirrored.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n / 2;
    for k in 0..half {
        // k-th largest root
        let theta = std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - k] = x;
        nodes[k] = -x;
        weights[n - 1 - k] = w;
        weights[k] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
