//! Penalized IMEX Runge-Kutta solver for the gPC-projected radiative heat
//! transfer system. Each stage first solves a linearized block-tridiagonal
//! system for the temperature, then recovers the radiative even and odd
//! parities in closed form.

pub(crate) mod linearized {
    pub(crate) use super::solver::{linearized_theta_solve, ThetaCoefficients};
}
mod ops;
mod solver;
mod state;

pub use ops::RhtOperators;
pub use solver::{RhtSolver, ThetaStage};
pub use state::RhtState;
