use nalgebra::DMatrix;

use crate::chaos::{b_from_nodes, c_from_nodes, GpcBasis, RandomField};
use crate::mesh::{Boundary, FluxClosure, Grid, GHOSTS};
use crate::numerics::QuadratureRule;
use crate::stencil::clean_diagonal;
use crate::transport::check_boundary;
use crate::{Error, Result};

/// Grid, bases and nodal cross-section for the radiative system. The
/// temperature and the radiation carry separate boundary data of the same kind.
#[derive(Debug, Clone)]
pub struct RhtOperators {
    grid: Grid,
    basis: GpcBasis,
    vrule: QuadratureRule,
    sigma: Vec<Vec<f64>>,
    theta_bc: Boundary,
    rad_bc: Boundary,
    closure: FluxClosure,
}

impl RhtOperators {
    pub fn new(
        grid: Grid,
        basis: GpcBasis,
        vrule: QuadratureRule,
        sigma: &RandomField,
        theta_bc: Boundary,
        rad_bc: Boundary,
        closure: FluxClosure,
    ) -> Result<Self> {
        let k = basis.size();
        check_boundary(&theta_bc, k)?;
        check_boundary(&rad_bc, k)?;
        let same_kind = match (&theta_bc, &rad_bc) {
            (Boundary::Periodic, Boundary::Periodic) => true,
            (Boundary::Walls { left: a, right: b }, Boundary::Walls { left: c, right: d }) => {
                std::mem::discriminant(a) == std::mem::discriminant(c)
                    && std::mem::discriminant(b) == std::mem::discriminant(d)
            }
            _ => false,
        };
        if !same_kind {
            return Err(Error::InvalidArgument(
                "temperature and radiation boundaries must be of the same kind".into(),
            ));
        }
        let n = grid.n();
        let mut nodal = grid
            .padded_centers()
            .into_iter()
            .map(|x| sigma.nodal(&basis, x))
            .collect::<Result<Vec<_>>>()?;
        if theta_bc.is_periodic() {
            for l in 0..GHOSTS {
                nodal[l] = nodal[n + l].clone();
                nodal[n + GHOSTS + l] = nodal[GHOSTS + l].clone();
            }
        }
        Ok(Self {
            grid,
            basis,
            vrule,
            sigma: nodal,
            theta_bc,
            rad_bc,
            closure,
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

    pub fn theta_boundary(&self) -> &Boundary {
        &self.theta_bc
    }

    pub fn radiation_boundary(&self) -> &Boundary {
        &self.rad_bc
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

    /// Nodal cross-section at padded cell `p`.
    pub fn sigma_nodes(&self, p: usize) -> &[f64] {
        &self.sigma[p]
    }

    /// `B(theta)` for every cell of a padded `[cell][mode]` temperature.
    pub fn emission_padded(&self, theta: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut out = vec![0.0; theta.len()];
        for (p, (t, o)) in theta.chunks(k).zip(out.chunks_mut(k)).enumerate() {
            b_from_nodes(t, &self.sigma[p], &self.basis, o);
        }
        out
    }

    /// `B(theta)` at the interior cells of an unpadded temperature.
    pub fn emission(&self, theta: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut out = vec![0.0; theta.len()];
        for (i, (t, o)) in theta.chunks(k).zip(out.chunks_mut(k)).enumerate() {
            b_from_nodes(t, &self.sigma[i + GHOSTS], &self.basis, o);
        }
        out
    }

    /// `C(theta)` for every cell of a padded temperature.
    pub fn jacobian_padded(&self, theta: &[f64]) -> Vec<DMatrix<f64>> {
        let k = self.k();
        theta
            .chunks(k)
            .enumerate()
            .map(|(p, t)| {
                let mut c = c_from_nodes(t, &self.sigma[p], &self.basis);
                clean_diagonal(&mut c);
                c
            })
            .collect()
    }

    /// Smallest nodal value of an unpadded `[cell][mode]` field.
    pub fn nodal_min(&self, u: &[f64]) -> f64 {
        let mut vals = vec![0.0; self.basis.n_nodes()];
        let mut lo = f64::INFINITY;
        for c in u.chunks(self.k()) {
            self.basis.values_at_nodes(c, &mut vals);
            lo = vals.iter().fold(lo, |a, &b| a.min(b));
        }
        lo
    }
}
