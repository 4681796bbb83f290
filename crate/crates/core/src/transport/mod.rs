//! Penalized IMEX Runge-Kutta solver for the gPC-projected even-odd linear
//! transport system. The time step obeys a hyperbolic CFL condition for every
//! Knudsen number; as `eps -> 0` each stage reduces to an implicit diffusion
//! solve for the velocity average.

pub(crate) mod kinetic;
mod ops;
mod slopes;
mod solver;
mod state;

pub use ops::TransportOperators;
pub(crate) use ops::{check_boundary, padded_cell_matrices};
pub(crate) use solver::pad_even;
pub use slopes::slopes;
pub use solver::{solve_p_stage, TransportSolver};
pub use state::TransportState;

use crate::{Error, Result};

/// Weight of the convective penalty, `min(1, 1/eps^2)`.
pub fn phi(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    Ok((1.0 / (eps * eps)).min(1.0))
}

/// Weight of the diffusive penalty, `exp(-eps^2 / dx)`: 1 in the diffusive
/// limit and negligible in the kinetic regime.
pub fn mu(eps: f64, dx: f64) -> Result<f64> {
    if !(eps > 0.0) || !(dx > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mu needs positive eps and dx, got eps = {eps}, dx = {dx}"
        )));
    }
    Ok((-eps * eps / dx).exp())
}

/// Knudsen number and the two penalty weights derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    pub eps: f64,
    pub mu: f64,
    pub phi: f64,
}

impl PenaltyParams {
    pub fn new(eps: f64, dx: f64) -> Result<Self> {
        Ok(Self {
            eps,
            mu: mu(eps, dx)?,
            phi: phi(eps)?,
        })
    }

    /// Overrides the diffusive penalty weight; must lie in `[0, 1]`.
    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!("mu must lie in [0, 1], got {mu}")));
        }
        self.mu = mu;
        Ok(self)
    }
}
