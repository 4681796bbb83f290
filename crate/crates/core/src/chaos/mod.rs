//! Orthonormal polynomial chaos in one random variable and Galerkin assembly of
//! the operator matrices `S`, `S~`, `C` and the emission vector `B`.

mod basis;
mod field;
mod galerkin;

pub use basis::{build_basis, default_quadrature_size, Density, GpcBasis};
pub use field::RandomField;
pub use galerkin::{
    assemble_b, assemble_c, assemble_s, assemble_s_tilde, b_from_nodes, c_from_nodes,
};

/// Mean and standard deviation of a random quantity from its gPC coefficients:
/// the first coefficient, and the Euclidean norm of the rest.
pub fn mean_and_std(coeffs: &[f64]) -> (f64, f64) {
    let mean = coeffs.first().copied().unwrap_or(0.0);
    let var = coeffs.iter().skip(1).fold(0.0, |acc, c| acc + c * c);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_and_std(&[3.0, 0.0, 0.0]), (3.0, 0.0));
        assert_eq!(mean_and_std(&[0.0, 3.0, 4.0]), (0.0, 5.0));
        let b = build_basis(1, Density::Uniform, 4).unwrap();
        let c = b.project(|z| 1.0 + 0.5 * z);
        let (m, s) = mean_and_std(&c);
        assert!((m - 1.0).abs() < 1e-14);
        // Var(0.5 z) = 0.25 / 3 for z uniform on [-1, 1]
        assert!((s - 0.5 / 3f64.sqrt()).abs() < 1e-14);
    }
}
