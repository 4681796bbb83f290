use std::f64::consts::PI;

use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// A quadrature rule with unit weight function on `interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_q w_q f(x_q)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// The `n`-point Gauss-Legendre rule on `[-1, 1]`, exact for polynomials of
/// degree `2n - 1`. Nodes are Newton-refined roots of `P_n` started from the
/// usual cosine guesses.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one node".into(),
        ));
    }
    if n == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
            interval: (-1.0, 1.0),
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // guesses run from the right end towards the middle
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        interval: (-1.0, 1.0),
    })
}

/// Affinely maps `rule` onto `[lo, hi]`.
pub fn map_rule(rule: &QuadratureRule, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "interval [{lo}, {hi}] is empty"
        )));
    }
    let (a, b) = rule.interval;
    let scale = (hi - lo) / (b - a);
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|&x| lo + (x - a) * scale).collect(),
        weights: rule.weights.iter().map(|&w| w * scale).collect(),
        interval: (lo, hi),
    })
}

/// `<values> = sum_m w_m values_m` over a velocity rule on `(0, 1)`.
pub fn velocity_average(values: &[f64], rule: &QuadratureRule) -> Result<f64> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    Ok(values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum())
}
