use nalgebra::{DMatrix, SymmetricEigen};

use crate::chaos::{assemble_s, GpcBasis, RandomField};
use crate::mesh::{Boundary, FluxClosure, Grid, Side, GHOSTS};
use crate::numerics::QuadratureRule;
use crate::stencil::clean_diagonal;
use crate::{Error, Result};

/// Precomputed Galerkin scattering matrices on a grid: `S_i` per cell with its
/// eigendecomposition, and `S^{-1}` at every face from the averaged neighbours.
#[derive(Debug, Clone)]
pub struct TransportOperators {
    grid: Grid,
    basis: GpcBasis,
    vrule: QuadratureRule,
    boundary: Boundary,
    closure: FluxClosure,
    s_cell: Vec<DMatrix<f64>>,
    s_inv_cell: Vec<DMatrix<f64>>,
    eigen: Vec<(DMatrix<f64>, Vec<f64>)>,
    s_face_inv: Vec<DMatrix<f64>>,
    diagonal: bool,
}

pub(crate) fn check_boundary(bc: &Boundary, k: usize) -> Result<()> {
    if let Boundary::Walls { left, right } = bc {
        for s in [left, right] {
            if let Side::Dirichlet(d) = s {
                if d.len() != k {
                    return Err(Error::LengthMismatch { expected: k, got: d.len() });
                }
            }
        }
    }
    Ok(())
}

/// Galerkin matrices of `field` at every padded cell; periodic ghosts copy
/// the wrapped interior cells.
pub(crate) fn padded_cell_matrices(
    grid: &Grid,
    basis: &GpcBasis,
    field: &RandomField,
    boundary: &Boundary,
    assemble: impl Fn(&RandomField, &GpcBasis, f64) -> Result<DMatrix<f64>>,
) -> Result<Vec<DMatrix<f64>>> {
    let n = grid.n();
    let mut cells = grid
        .padded_centers()
        .into_iter()
        .map(|x| {
            let mut m = assemble(field, basis, x)?;
            clean_diagonal(&mut m);
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    if boundary.is_periodic() {
        for l in 0..GHOSTS {
            cells[l] = cells[n + l].clone();
            cells[n + GHOSTS + l] = cells[GHOSTS + l].clone();
        }
    }
    Ok(cells)
}

impl TransportOperators {
    pub fn new(
        grid: Grid,
        basis: GpcBasis,
        vrule: QuadratureRule,
        sigma_s: &RandomField,
        boundary: Boundary,
        closure: FluxClosure,
    ) -> Result<Self> {
        let k = basis.size();
        check_boundary(&boundary, k)?;
        let n = grid.n();
        let padded = padded_cell_matrices(&grid, &basis, sigma_s, &boundary, assemble_s)?;
        let s_face_inv = (0..=n)
            .map(|f| {
                let avg = (&padded[f + GHOSTS - 1] + &padded[f + GHOSTS]) * 0.5;
                let mut inv = avg.try_inverse().ok_or(Error::Singular { block: f })?;
                clean_diagonal(&mut inv);
                Ok(inv)
            })
            .collect::<Result<Vec<_>>>()?;
        let s_cell: Vec<DMatrix<f64>> = padded[GHOSTS..GHOSTS + n].to_vec();
        let mut s_inv_cell = Vec::with_capacity(n);
        let mut eigen = Vec::with_capacity(n);
        for (i, s) in s_cell.iter().enumerate() {
            let mut inv = s.clone().try_inverse().ok_or(Error::Singular { block: i })?;
            clean_diagonal(&mut inv);
            s_inv_cell.push(inv);
            let e = SymmetricEigen::new(s.clone());
            if e.eigenvalues.iter().any(|&l| l <= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "scattering matrix is not positive definite in cell {i}"
                )));
            }
            eigen.push((e.eigenvectors, e.eigenvalues.as_slice().to_vec()));
        }
        let diagonal = s_cell.iter().all(crate::stencil::is_diagonal);
        Ok(Self {
            grid,
            basis,
            vrule,
            boundary,
            closure,
            s_cell,
            s_inv_cell,
            eigen,
            s_face_inv,
            diagonal,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn basis(&self) -> &GpcBasis {
        &self.basis
    }

    pub fn vrule(&self) -> &QuadratureRule {
        &self.vrule
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn closure(&self) -> FluxClosure {
        self.closure
    }

    pub fn k(&self) -> usize {
        self.basis.size()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn nv(&self) -> usize {
        self.vrule.len()
    }

    pub fn s(&self, i: usize) -> &DMatrix<f64> {
        &self.s_cell[i]
    }

    pub fn s_inv(&self, i: usize) -> &DMatrix<f64> {
        &self.s_inv_cell[i]
    }

    /// `S^{-1}` at face `f` (between cells `f - 1` and `f`), `f = 0..=n`.
    pub fn s_face_inv(&self) -> &[DMatrix<f64>] {
        &self.s_face_inv
    }

    /// All cell matrices are diagonal (the scattering is deterministic).
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// `(I + c S_i)^{-1}` and `c (I + c S_i)^{-1}` for every cell.
    pub fn relaxation(&self, c: f64) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        self.eigen
            .iter()
            .map(|(q, lam)| {
                let k = lam.len();
                let mut m = DMatrix::zeros(k, k);
                let mut nm = DMatrix::zeros(k, k);
                for a in 0..k {
                    for b in 0..k {
                        let (mut sm, mut sn) = (0.0, 0.0);
                        for (l, &ev) in lam.iter().enumerate() {
                            let d = 1.0 / (1.0 + c * ev);
                            let qq = q[(a, l)] * q[(b, l)];
                            sm += qq * d;
                            sn += qq * c * d;
                        }
                        m[(a, b)] = sm;
                        nm[(a, b)] = sn;
                    }
                }
                if self.diagonal {
                    clean_diagonal(&mut m);
                    clean_diagonal(&mut nm);
                }
                (m, nm)
            })
            .unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{build_basis, Density};
    use crate::numerics::{gauss_legendre, map_rule};

    fn ops(field: RandomField, n: usize, deg: usize, bc: Boundary) -> TransportOperators {
        let basis = build_basis(deg, Density::Uniform, 2 * deg + 4).unwrap();
        let v = map_rule(&gauss_legendre(4).unwrap(), 0.0, 1.0).unwrap();
        TransportOperators::new(Grid::from_cells(n).unwrap(), basis, v, &field, bc, FluxClosure::Constant)
            .unwrap()
    }

    #[test]
    fn relaxation_matches_direct_inverse() {
        let o = ops(RandomField::affine_z(1.0, 0.5), 4, 3, Boundary::Periodic);
        for c in [0.0, 0.3, 1e4, 1e14] {
            let (m, nm) = o.relaxation(c);
            for i in 0..4 {
                let direct = (DMatrix::identity(4, 4) + o.s(i) * c).try_inverse().unwrap();
                assert!((&m[i] - &direct).amax() < 1e-12 * direct.amax().max(1e-300));
                let nd = &direct * c;
                assert!((&nm[i] - &nd).amax() <= 1e-10 * nd.amax().max(1e-300));
            }
        }
    }

    #[test]
    fn periodic_faces_wrap() {
        let f = RandomField::new("1 + x + z/4", |x, z| 1.0 + x + 0.25 * z);
        let o = ops(f, 5, 2, Boundary::Periodic);
        let faces = o.s_face_inv();
        assert_eq!(faces[0], faces[5]);
        let want = ((o.s(4) + o.s(0)) * 0.5).try_inverse().unwrap();
        assert!((&faces[0] - want).amax() < 1e-14);
    }

    #[test]
    fn deterministic_field_gives_exactly_diagonal_matrices() {
        let o = ops(RandomField::constant(2.0), 6, 3, Boundary::reflecting());
        assert!(o.is_diagonal());
        let (m, _) = o.relaxation(5.0);
        assert!(m.iter().all(crate::stencil::is_diagonal));
        assert!(!ops(RandomField::affine_z(1.0, 0.5), 6, 3, Boundary::reflecting()).is_diagonal());
    }

    #[test]
    fn dirichlet_length_checked() {
        let basis = build_basis(2, Density::Uniform, 6).unwrap();
        let v = map_rule(&gauss_legendre(4).unwrap(), 0.0, 1.0).unwrap();
        let r = TransportOperators::new(
            Grid::from_cells(4).unwrap(),
            basis,
            v,
            &RandomField::constant(1.0),
            Boundary::dirichlet(vec![1.0], vec![0.0]),
            FluxClosure::Constant,
        );
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }
}
