use std::str::FromStr;

use crate::numerics::{gauss_legendre, QuadratureRule};
use crate::{Error, Result};

/// Probability density of the random variable `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// `z ~ U[-1, 1]`, density 1/2; the orthonormal family is scaled Legendre.
    Uniform,
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(Density::Uniform),
            other => Err(Error::UnsupportedDensity(other.to_string())),
        }
    }
}

/// Orthonormal basis `Phi_1..Phi_K` of degree `N` in a single random variable,
/// together with the quadrature rule used for every Galerkin integral.
#[derive(Debug, Clone, PartialEq)]
pub struct GpcBasis {
    degree: usize,
    density: Density,
    zrule: QuadratureRule,
    /// `w_q * pi(z_q)`.
    prob_weights: Vec<f64>,
    /// `Phi_k(z_q)` stored row-major as `[k][q]`.
    table: Vec<f64>,
}

/// Quadrature size that integrates the quartic emission term and the cubic
/// Jacobian exactly: `max(2(N + 1), ceil((5N + 2) / 2))`.
pub fn default_quadrature_size(degree: usize) -> usize {
    (2 * (degree + 1)).max((5 * degree + 3) / 2)
}

/// Builds the degree-`degree` basis for `density` with a `q`-point rule.
pub fn build_basis(degree: usize, density: Density, q: usize) -> Result<GpcBasis> {
    if q < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "z-quadrature with {q} nodes cannot resolve degree {degree}"
        )));
    }
    let zrule = match density {
        Density::Uniform => gauss_legendre(q)?,
    };
    let prob_weights = zrule.weights.iter().map(|w| 0.5 * w).collect();
    let k = degree + 1;
    let mut table = vec![0.0; k * q];
    for (iq, &z) in zrule.nodes.iter().enumerate() {
        let vals = normalized_legendre(degree, z);
        for (ik, v) in vals.into_iter().enumerate() {
            table[ik * q + iq] = v;
        }
    }
    Ok(GpcBasis {
        degree,
        density,
        zrule,
        prob_weights,
        table,
    })
}

/// `sqrt(2k + 1) P_k(z)` for `k = 0..=degree`.
fn normalized_legendre(degree: usize, z: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(degree + 1);
    p.push(1.0);
    if degree >= 1 {
        p.push(z);
    }
    for k in 1..degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * z * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p.iter()
        .enumerate()
        .map(|(k, v)| v * (2.0 * k as f64 + 1.0).sqrt())
        .collect()
}

impl GpcBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `K = N + 1`.
    pub fn size(&self) -> usize {
        self.degree + 1
    }

    /// Random dimension; always 1.
    pub fn dimension(&self) -> usize {
        1
    }

    pub fn density(&self) -> Density {
        self.density
    }

    pub fn zrule(&self) -> &QuadratureRule {
        &self.zrule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.zrule.nodes
    }

    pub fn prob_weights(&self) -> &[f64] {
        &self.prob_weights
    }

    pub fn n_nodes(&self) -> usize {
        self.zrule.len()
    }

    /// `Phi_k(z_q)` with 0-based `k`.
    #[inline]
    pub fn phi(&self, k: usize, q: usize) -> f64 {
        self.table[k * self.n_nodes() + q]
    }

    /// All basis functions at an arbitrary `z`.
    pub fn eval_all(&self, z: f64) -> Vec<f64> {
        normalized_legendre(self.degree, z)
    }

    /// Reconstructs `u(z) = sum_k c_k Phi_k(z)`.
    pub fn evaluate(&self, coeffs: &[f64], z: f64) -> f64 {
        coeffs.iter().zip(self.eval_all(z)).map(|(c, p)| c * p).sum()
    }

    /// Values of `sum_k c_k Phi_k` at every quadrature node.
    pub fn values_at_nodes(&self, coeffs: &[f64], out: &mut [f64]) {
        let nq = self.n_nodes();
        out[..nq].fill(0.0);
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &self.table[k * nq..(k + 1) * nq];
            for (o, p) in out.iter_mut().zip(row) {
                *o += c * p;
            }
        }
    }

    /// Galerkin projection of nodal values: `c_k = sum_q w_q pi(z_q) g_q Phi_k(z_q)`.
    pub fn project_values(&self, values: &[f64], out: &mut [f64]) {
        let nq = self.n_nodes();
        for (k, o) in out.iter_mut().enumerate().take(self.size()) {
            let row = &self.table[k * nq..(k + 1) * nq];
            *o = row
                .iter()
                .zip(values)
                .zip(&self.prob_weights)
                .map(|((p, g), w)| w * g * p)
                .sum();
        }
    }

    /// Galerkin projection of a function of `z`.
    pub fn project(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let vals: Vec<f64> = self.nodes().iter().map(|&z| f(z)).collect();
        let mut out = vec![0.0; self.size()];
        self.project_values(&vals, &mut out);
        out
    }

    /// `sum_q w_q pi(z_q) Phi_i(z_q) Phi_j(z_q)`; the identity up to round-off.
    pub fn gram(&self) -> nalgebra::DMatrix<f64> {
        super::galerkin::weighted_matrix(self, &vec![1.0; self.n_nodes()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_error(b: &GpcBasis) -> f64 {
        let g = b.gram();
        let id = nalgebra::DMatrix::<f64>::identity(b.size(), b.size());
        (g - id).amax()
    }

    #[test]
    fn degree_zero() {
        let b = build_basis(0, Density::Uniform, 1).unwrap();
        assert_eq!(b.size(), 1);
        assert_eq!(b.phi(0, 0), 1.0);
        assert!(gram_error(&b) < 1e-15);
    }

    #[test]
    fn degree_one_is_scaled_z() {
        let b = build_basis(1, Density::Uniform, 2).unwrap();
        for q in 0..2 {
            let z = b.nodes()[q];
            assert!((b.phi(1, q) - 3f64.sqrt() * z).abs() < 1e-15);
        }
        assert!(gram_error(&b) < 1e-13);
    }

    #[test]
    fn degree_four_ten_nodes() {
        let b = build_basis(4, Density::Uniform, 10).unwrap();
        assert!(gram_error(&b) < 1e-12);
    }

    #[test]
    fn orthonormal_up_to_degree_eight() {
        for n in 0..=8 {
            let b = build_basis(n, Density::Uniform, 2 * (n + 1)).unwrap();
            assert!(gram_error(&b) < 1e-12, "N = {n}");
            for q in 0..b.n_nodes() {
                assert_eq!(b.phi(0, q), 1.0);
            }
        }
    }

    #[test]
    fn too_few_nodes() {
        assert!(build_basis(3, Density::Uniform, 3).is_err());
    }

    #[test]
    fn density_parsing() {
        assert_eq!("Uniform".parse::<Density>().unwrap(), Density::Uniform);
        assert!(matches!(
            "beta".parse::<Density>(),
            Err(Error::UnsupportedDensity(_))
        ));
    }

    #[test]
    fn default_sizes() {
        assert_eq!(default_quadrature_size(0), 2);
        assert_eq!(default_quadrature_size(1), 4);
        assert_eq!(default_quadrature_size(4), 11);
        assert_eq!(default_quadrature_size(8), 21);
    }

    #[test]
    fn project_then_evaluate_roundtrip() {
        let b = build_basis(3, Density::Uniform, 8).unwrap();
        let f = |z: f64| 2.0 - z + 0.25 * z * z * z;
        let c = b.project(f);
        for z in [-0.9, -0.1, 0.3, 0.77] {
            assert!((b.evaluate(&c, z) - f(z)).abs() < 1e-13);
        }
    }
}
