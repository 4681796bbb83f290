use nalgebra::DMatrix;

use super::{GpcBasis, RandomField};
use crate::Result;

/// `sum_q w_q pi(z_q) g_q Phi_i(z_q) Phi_j(z_q)` for nodal weights `g`.
pub(crate) fn weighted_matrix(basis: &GpcBasis, g: &[f64]) -> DMatrix<f64> {
    let (k, nq) = (basis.size(), basis.n_nodes());
    let w: Vec<f64> = basis
        .prob_weights()
        .iter()
        .zip(g)
        .map(|(w, g)| w * g)
        .collect();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let v: f64 = (0..nq).map(|q| w[q] * basis.phi(i, q) * basis.phi(j, q)).sum();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Scattering matrix `s_ij = E[sigma Phi_i Phi_j]` at position `x`.
pub fn assemble_s(field: &RandomField, basis: &GpcBasis, x: f64) -> Result<DMatrix<f64>> {
    Ok(weighted_matrix(basis, &field.nodal(basis, x)?))
}

/// `s~_ij = E[Phi_i Phi_j / sigma]`. The integrand is not polynomial, so the
/// result carries quadrature error that vanishes spectrally in the rule size.
pub fn assemble_s_tilde(field: &RandomField, basis: &GpcBasis, x: f64) -> Result<DMatrix<f64>> {
    let inv: Vec<f64> = field.nodal(basis, x)?.iter().map(|s| 1.0 / s).collect();
    Ok(weighted_matrix(basis, &inv))
}

/// Emission vector `B_j = E[theta^4 sigma Phi_j]` from nodal `sigma`.
pub fn b_from_nodes(theta: &[f64], sigma: &[f64], basis: &GpcBasis, out: &mut [f64]) {
    let mut t = vec![0.0; basis.n_nodes()];
    basis.values_at_nodes(theta, &mut t);
    for (tq, s) in t.iter_mut().zip(sigma) {
        let sq = *tq * *tq;
        *tq = sq * sq * s;
    }
    basis.project_values(&t, out);
}

/// Jacobian factor `c_ij = E[theta^3 sigma Phi_i Phi_j]` from nodal `sigma`.
pub fn c_from_nodes(theta: &[f64], sigma: &[f64], basis: &GpcBasis) -> DMatrix<f64> {
    let mut t = vec![0.0; basis.n_nodes()];
    basis.values_at_nodes(theta, &mut t);
    for (tq, s) in t.iter_mut().zip(sigma) {
        *tq = *tq * *tq * *tq * s;
    }
    weighted_matrix(basis, &t)
}

pub fn assemble_b(theta: &[f64], field: &RandomField, basis: &GpcBasis, x: f64) -> Result<Vec<f64>> {
    let sigma = field.nodal(basis, x)?;
    let mut out = vec![0.0; basis.size()];
    b_from_nodes(theta, &sigma, basis, &mut out);
    Ok(out)
}

pub fn assemble_c(theta: &[f64], field: &RandomField, basis: &GpcBasis, x: f64) -> Result<DMatrix<f64>> {
    Ok(c_from_nodes(theta, &field.nodal(basis, x)?, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{build_basis, default_quadrature_size, Density};
    use crate::numerics::is_spd;
    use proptest::prelude::*;

    fn basis(n: usize) -> GpcBasis {
        build_basis(n, Density::Uniform, default_quadrature_size(n)).unwrap()
    }

    fn max_off(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn s_of_unit_field_is_identity() {
        for n in [0, 1, 3, 6] {
            let b = basis(n);
            let s = assemble_s(&RandomField::constant(1.0), &b, 0.3).unwrap();
            assert!(max_off(&s, &DMatrix::identity(n + 1, n + 1)) < 1e-13);
        }
    }

    #[test]
    fn s_of_constant_field_is_scaled_identity() {
        let b = basis(4);
        let s = assemble_s(&RandomField::constant(2.5), &b, 0.0).unwrap();
        assert!(max_off(&s, &(DMatrix::identity(5, 5) * 2.5)) < 1e-13);
    }

    #[test]
    fn s_affine_degree_one() {
        let s = assemble_s(&RandomField::affine_z(1.0, 0.5), &basis(1), 0.0).unwrap();
        // E[0.5 z * sqrt(3) z] = 0.5 sqrt(3) / 3
        let off = 3f64.sqrt() / 6.0;
        let want = DMatrix::from_row_slice(2, 2, &[1.0, off, off, 1.0]);
        assert!(max_off(&s, &want) < 1e-14);
        assert!(is_spd(&s, 1e-12).unwrap());
    }

    #[test]
    fn s_affine_is_tridiagonal_spd() {
        for n in 1..=8 {
            let s = assemble_s(&RandomField::affine_z(1.0, 0.5), &basis(n), 0.0).unwrap();
            for i in 0..=n {
                for j in 0..=n {
                    if i.abs_diff(j) >= 2 {
                        assert!(s[(i, j)].abs() < 1e-13, "N={n} ({i},{j}) = {}", s[(i, j)]);
                    }
                }
            }
            assert!(is_spd(&s, 1e-12).unwrap());
            assert!(max_off(&s, &s.transpose()) < 1e-14);
        }
    }

    #[test]
    fn s_tilde_examples() {
        let st = assemble_s_tilde(&RandomField::constant(2.0), &basis(3), 0.0).unwrap();
        assert!(max_off(&st, &(DMatrix::identity(4, 4) * 0.5)) < 1e-14);
        // E[1 / (1 + z/2)] = ln 3 under the uniform density; needs a fine rule.
        let fine = build_basis(1, Density::Uniform, 30).unwrap();
        let st = assemble_s_tilde(&RandomField::affine_z(1.0, 0.5), &fine, 0.0).unwrap();
        assert!((st[(0, 0)] - 3f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn s_tilde_approaches_s_inverse() {
        let field = RandomField::affine_z(1.0, 0.5);
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in 1..=8 {
            let b = basis(n);
            let s = assemble_s(&field, &b, 0.0).unwrap();
            let st = assemble_s_tilde(&field, &b, 0.0).unwrap();
            let d = st - s.try_inverse().unwrap();
            let (frob, mean) = (d.norm(), d[(0, 0)].abs());
            assert!(frob < prev.0, "N={n}: {frob} !< {}", prev.0);
            // the mean-mode entry converges geometrically, roughly 14x per degree
            assert!(mean < prev.1 / 10.0, "N={n}: {mean} vs {}", prev.1);
            prev = (frob, mean);
        }
        assert!(prev.1 < 1e-9);
    }

    #[test]
    fn b_and_c_examples() {
        let b1 = basis(1);
        let one = RandomField::constant(1.0);
        let bv = assemble_b(&[1.0, 0.0], &one, &b1, 0.0).unwrap();
        assert!((bv[0] - 1.0).abs() < 1e-14 && bv[1].abs() < 1e-14);
        assert_eq!(assemble_b(&[0.0, 0.0], &one, &b1, 0.0).unwrap(), vec![0.0, 0.0]);
        let aff = RandomField::affine_z(1.0, 0.5);
        let bv = assemble_b(&[1.0, 0.0], &aff, &b1, 0.0).unwrap();
        assert!((bv[0] - 1.0).abs() < 1e-14);
        assert!((bv[1] - 0.5 / 3f64.sqrt()).abs() < 1e-14);

        let c = assemble_c(&[1.0, 0.0], &one, &b1, 0.0).unwrap();
        assert!(max_off(&c, &DMatrix::identity(2, 2)) < 1e-14);
        assert_eq!(assemble_c(&[0.0, 0.0], &one, &b1, 0.0).unwrap(), DMatrix::zeros(2, 2));
        let c = assemble_c(&[1.0, 0.0], &aff, &b1, 0.0).unwrap();
        let off = 3f64.sqrt() / 6.0;
        assert!(max_off(&c, &DMatrix::from_row_slice(2, 2, &[1.0, off, off, 1.0])) < 1e-14);
    }

    /// Central differences of `B` against `4 C`, column by column.
    pub(crate) fn jacobian_error(theta: &[f64], field: &RandomField, b: &GpcBasis) -> f64 {
        let k = b.size();
        let c4 = assemble_c(theta, field, b, 0.2).unwrap() * 4.0;
        let h = 1e-6;
        let mut worst = 0.0f64;
        for j in 0..k {
            let mut p = theta.to_vec();
            let mut m = theta.to_vec();
            p[j] += h;
            m[j] -= h;
            let bp = assemble_b(&p, field, b, 0.2).unwrap();
            let bm = assemble_b(&m, field, b, 0.2).unwrap();
            for i in 0..k {
                let fd = (bp[i] - bm[i]) / (2.0 * h);
                worst = worst.max((fd - c4[(i, j)]).abs());
            }
        }
        worst / c4.amax().max(1e-300)
    }

    #[test]
    fn c_times_theta_is_b() {
        let b = basis(3);
        let f = RandomField::affine_z(1.0, 0.5);
        let th = [0.7, 0.1, -0.05, 0.02];
        let c = assemble_c(&th, &f, &b, 0.0).unwrap();
        let bv = assemble_b(&th, &f, &b, 0.0).unwrap();
        let ct = &c * nalgebra::DVector::from_column_slice(&th);
        for i in 0..4 {
            assert!((ct[i] - bv[i]).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn jacobian_of_b_is_four_c(
            n in 0usize..5,
            raw in proptest::collection::vec(-0.3f64..0.3, 5),
            mean in 0.3f64..1.5,
        ) {
            let b = basis(n);
            let mut th: Vec<f64> = raw[..=n].to_vec();
            th[0] = mean;
            let f = RandomField::affine_z(1.0, 0.5);
            prop_assert!(jacobian_error(&th, &f, &b) <= 1e-6);
        }
    }
}
