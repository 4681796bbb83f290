use nalgebra::DMatrix;

use crate::chaos::{assemble_s_tilde, GpcBasis, RandomField};
use crate::imex::DoubleTableau;
use crate::mesh::{Boundary, Grid, GHOSTS};
use crate::stencil::{clean_diagonal, face_laplacian, solve_face_system};
use crate::transport::{padded_cell_matrices, TransportOperators};
use crate::{Error, Result};

/// Face diffusivity matrices for the limiting random diffusion equation
/// `rho_t = (1/3) d_x (D d_x rho)`.
#[derive(Debug, Clone)]
pub struct DiffusionOperators {
    grid: Grid,
    k: usize,
    boundary: Boundary,
    faces: Vec<DMatrix<f64>>,
}

impl DiffusionOperators {
    /// `D = S^{-1}` at faces, the limit of the kinetic scheme.
    pub fn from_transport(ops: &TransportOperators) -> Self {
        Self {
            grid: *ops.grid(),
            k: ops.k(),
            boundary: ops.boundary().clone(),
            faces: ops.s_face_inv().to_vec(),
        }
    }

    /// `D = S~` (the Galerkin matrix of `1 / sigma_s`), averaged to faces.
    pub fn tilde(grid: Grid, basis: &GpcBasis, sigma_s: &RandomField, boundary: Boundary) -> Result<Self> {
        let k = basis.size();
        crate::transport::check_boundary(&boundary, k)?;
        let cells = padded_cell_matrices(&grid, basis, sigma_s, &boundary, assemble_s_tilde)?;
        let faces = (0..=grid.n())
            .map(|f| {
                let mut m = (&cells[f + GHOSTS - 1] + &cells[f + GHOSTS]) * 0.5;
                clean_diagonal(&mut m);
                m
            })
            .collect();
        Ok(Self { grid, k, boundary, faces })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn faces(&self) -> &[DMatrix<f64>] {
        &self.faces
    }

    /// `(1/3) D_h[D D_h] u` at the interior cells, ghosts from the boundary.
    pub(crate) fn apply(&self, u: &[f64], out: &mut [f64]) {
        let (n, k) = (self.grid.n(), self.k);
        let pad = crate::transport::pad_even(&self.boundary, u, k, n);
        face_laplacian(&self.faces, &pad, k, n, self.grid.dx(), out);
        out.iter_mut().for_each(|x| *x /= 3.0);
    }

    /// Solves `(I - alpha (1/3) D_h[D D_h]) u = rhs`.
    pub(crate) fn solve(&self, rhs: &[f64], alpha: f64) -> Result<Vec<f64>> {
        let (n, k) = (self.grid.n(), self.k);
        let dx = self.grid.dx();
        let scale = alpha / (3.0 * dx * dx);
        let couplings: Vec<DMatrix<f64>> = self.faces.iter().map(|m| m * scale).collect();
        let eye = vec![DMatrix::identity(k, k); n];
        solve_face_system(&eye, &couplings, rhs, &self.boundary, k)
    }
}

/// One step of the diagonally implicit Runge-Kutta scheme (implicit weights of
/// `tableau`) for `rho_t = (1/3) d_x (D d_x rho)`: the limit of the kinetic
/// scheme as `eps -> 0`.
pub fn implicit_rk_diffusion_step(
    rho: &[f64],
    ops: &DiffusionOperators,
    tableau: &DoubleTableau,
    dt: f64,
) -> Result<Vec<f64>> {
    let nk = ops.grid.n() * ops.k;
    if rho.len() != nk {
        return Err(Error::LengthMismatch { expected: nk, got: rho.len() });
    }
    let s = tableau.s;
    let mut lp: Vec<Vec<f64>> = Vec::with_capacity(s);
    for stage in 0..s {
        let mut rhs = rho.to_vec();
        for (l, d) in lp.iter().enumerate() {
            let a = dt * tableau.a_im[stage][l];
            rhs.iter_mut().zip(d).for_each(|(r, x)| *r += a * x);
        }
        let p = ops.solve(&rhs, dt * tableau.a_im[stage][stage])?;
        let mut d = vec![0.0; nk];
        ops.apply(&p, &mut d);
        lp.push(d);
    }
    let mut out = rho.to_vec();
    for (idx, o) in out.iter_mut().enumerate() {
        let inc: f64 = (0..s).map(|l| tableau.b_im[l] * lp[l][idx]).sum();
        *o += dt * inc;
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Divergence { stage: s, t: f64::NAN });
    }
    Ok(out)
}

/// The same scheme with `S~` at the faces; identical to
/// [`implicit_rk_diffusion_step`] when handed [`DiffusionOperators::tilde`].
pub fn implicit_rk_diffusion_step_tilde(
    rho: &[f64],
    ops_tilde: &DiffusionOperators,
    tableau: &DoubleTableau,
    dt: f64,
) -> Result<Vec<f64>> {
    implicit_rk_diffusion_step(rho, ops_tilde, tableau, dt)
}
