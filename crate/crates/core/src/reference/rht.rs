use nalgebra::DMatrix;

use crate::chaos::{b_from_nodes, c_from_nodes};
use crate::imex::DoubleTableau;
use crate::mesh::GHOSTS;
use crate::rht::linearized::{linearized_theta_solve, ThetaCoefficients};
use crate::rht::RhtOperators;
use crate::stencil::{dvec, face_laplacian, second_difference};
use crate::transport::pad_even;
use crate::{Error, Result};

/// One step of the implicit Runge-Kutta scheme for the limiting equation
/// `(theta + B(theta))_t = d_x[(I + 4/3 C) d_x theta]`, the `eps -> 0` limit
/// of the radiative solver. Each stage linearizes `B` at the previous stage
/// exactly as the kinetic scheme does; the new temperature is recovered from
/// `theta + B(theta)` by Newton's method in every cell.
pub fn implicit_rk_rht_diffusion_step(
    theta: &[f64],
    ops: &RhtOperators,
    tableau: &DoubleTableau,
    dt: f64,
) -> Result<Vec<f64>> {
    let (n, k) = (ops.n(), ops.k());
    let nk = n * k;
    if theta.len() != nk {
        return Err(Error::LengthMismatch { expected: nk, got: theta.len() });
    }
    let dx = ops.grid().dx();
    let b0 = ops.emission(theta);
    let u0: Vec<f64> = theta.iter().zip(&b0).map(|(t, b)| t + b).collect();
    let mut lin = theta.to_vec();
    let mut fluxes: Vec<Vec<f64>> = Vec::with_capacity(tableau.s);
    for stage in 0..tableau.s {
        let alpha = dt * tableau.a_im[stage][stage];
        let b_lin = ops.emission(&lin);
        let mut rhs: Vec<f64> = u0.iter().zip(&b_lin).map(|(u, b)| u + 3.0 * b).collect();
        for (l, kl) in fluxes.iter().enumerate() {
            let a = dt * tableau.a_im[stage][l];
            rhs.iter_mut().zip(kl).for_each(|(r, x)| *r += a * x);
        }
        let lin_pad = pad_even(ops.theta_boundary(), &lin, k, n);
        let co = ThetaCoefficients { d0: 1.0, d1: 1.0, d2: alpha, d3: alpha / 3.0 };
        let (big, faces) = linearized_theta_solve(ops, &lin_pad, co, &rhs)?;
        let tp = pad_even(ops.theta_boundary(), &big, k, n);
        let mut d = vec![0.0; nk];
        second_difference(&tp, k, n, dx, &mut d);
        let mut dc = vec![0.0; nk];
        face_laplacian(&faces, &tp, k, n, dx, &mut dc);
        fluxes.push(d.iter().zip(&dc).map(|(a, b)| a + b / 3.0).collect());
        lin = big;
    }
    let mut u = u0;
    for (idx, x) in u.iter_mut().enumerate() {
        let inc: f64 = (0..tableau.s).map(|l| tableau.b_im[l] * fluxes[l][idx]).sum();
        *x += dt * inc;
    }
    let mut out = lin;
    for i in 0..n {
        let s = i * k..(i + 1) * k;
        recover_temperature(ops, i, &u[s.clone()], &mut out[s])?;
    }
    Ok(out)
}

/// Solves `theta + B(theta) = u` in cell `i` by Newton's method, starting from
/// the value already in `theta`.
fn recover_temperature(ops: &RhtOperators, i: usize, u: &[f64], theta: &mut [f64]) -> Result<()> {
    let k = u.len();
    let sigma = ops.sigma_nodes(i + GHOSTS);
    let basis = ops.basis();
    let mut b = vec![0.0; k];
    for _ in 0..50 {
        b_from_nodes(theta, sigma, basis, &mut b);
        let res: Vec<f64> = (0..k).map(|a| theta[a] + b[a] - u[a]).collect();
        let jac = DMatrix::identity(k, k) + c_from_nodes(theta, sigma, basis) * 4.0;
        let step = jac.lu().solve(&dvec(&res)).ok_or(Error::Singular { block: i })?;
        let mut size = 0.0f64;
        for a in 0..k {
            theta[a] -= step[a];
            size = size.max(step[a].abs());
        }
        if !size.is_finite() {
            break;
        }
        if size <= 1e-15 * (1.0 + theta.iter().fold(0.0f64, |m, t| m.max(t.abs()))) {
            return Ok(());
        }
    }
    Err(Error::Divergence { stage: 0, t: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{build_basis, default_quadrature_size, Density, RandomField};
    use crate::imex::tableau;
    use crate::mesh::{Boundary, FluxClosure, Grid};
    use crate::numerics::{gauss_legendre, map_rule};

    fn ops(field: RandomField, n: usize, deg: usize, bc: Boundary) -> RhtOperators {
        let basis = build_basis(deg, Density::Uniform, default_quadrature_size(deg)).unwrap();
        let v = map_rule(&gauss_legendre(2).unwrap(), 0.0, 1.0).unwrap();
        RhtOperators::new(Grid::from_cells(n).unwrap(), basis, v, &field, bc.clone(), bc, FluxClosure::Constant)
            .unwrap()
    }

    #[test]
    fn uniform_temperature_is_fixed() {
        let o = ops(RandomField::affine_z(1.0, 0.5), 10, 2, Boundary::reflecting());
        let theta: Vec<f64> = (0..30).map(|i| [0.7, 0.1, 0.02][i % 3]).collect();
        let out = implicit_rk_rht_diffusion_step(&theta, &o, &tableau("SSP2-332").unwrap(), 0.01).unwrap();
        assert!(out.iter().zip(&theta).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn small_temperature_behaves_like_heat_equation() {
        // theta ~ 1e-2 makes B negligible: theta_t ~ theta_xx
        let n = 20;
        let bc = Boundary::dirichlet(vec![0.0], vec![0.0]);
        let o = ops(RandomField::constant(1.0), n, 0, bc);
        let tab = tableau("SSP2-332").unwrap();
        let dx = 1.0 / n as f64;
        let theta: Vec<f64> = (0..n).map(|i| 1e-2 * ((i as f64 + 0.5) * dx * std::f64::consts::PI).sin()).collect();
        let dt = 0.002;
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            lap[(i, i)] = -2.0 / (dx * dx);
            if i > 0 {
                lap[(i, i - 1)] = 1.0 / (dx * dx);
            }
            if i + 1 < n {
                lap[(i, i + 1)] = 1.0 / (dx * dx);
            }
        }
        let u0 = dvec(&theta);
        let mut ks: Vec<nalgebra::DVector<f64>> = Vec::new();
        for st in 0..tab.s {
            let mut rhs = u0.clone();
            for (l, kl) in ks.iter().enumerate() {
                rhs += kl * (dt * tab.a_im[st][l]);
            }
            let m = DMatrix::identity(n, n) - &lap * (dt * tab.a_im[st][st]);
            ks.push(&lap * m.lu().solve(&rhs).unwrap());
        }
        let mut want = u0.clone();
        for (l, kl) in ks.iter().enumerate() {
            want += kl * (dt * tab.b_im[l]);
        }
        let got = implicit_rk_rht_diffusion_step(&theta, &o, &tab, dt).unwrap();
        let rel = (0..n).fold(0.0f64, |a, i| a.max((got[i] - want[i]).abs())) / 1e-2;
        assert!(rel < 1e-3, "{rel}");
    }

    #[test]
    fn newton_recovers_known_temperature() {
        let o = ops(RandomField::affine_z(1.0, 0.5), 4, 3, Boundary::Periodic);
        let want = [0.8, 0.1, -0.03, 0.01];
        let mut b = vec![0.0; 4];
        b_from_nodes(&want, o.sigma_nodes(GHOSTS + 1), o.basis(), &mut b);
        let u: Vec<f64> = want.iter().zip(&b).map(|(t, b)| t + b).collect();
        let mut theta = vec![0.5, 0.0, 0.0, 0.0];
        recover_temperature(&o, 1, &u, &mut theta).unwrap();
        assert!(theta.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}
