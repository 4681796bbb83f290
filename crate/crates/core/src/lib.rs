//! Stochastic-Galerkin, asymptotic-preserving IMEX Runge-Kutta solvers for the
//! one-dimensional linear transport equation and the radiative heat transfer
//! system with random inputs.
//!
//! Both kinetic models are written in even-odd parity form, projected onto an
//! orthonormal polynomial chaos basis in the random variable `z`, and advanced
//! with a penalized IMEX scheme whose time step obeys a hyperbolic CFL
//! condition uniformly in the Knudsen number `eps`. As `eps -> 0` the schemes
//! reduce to implicit Runge-Kutta schemes for the limiting random diffusion
//! equations, which live in [`reference`] together with a stochastic
//! collocation oracle.
//!
//! Module map:
//!
//! * [`numerics`]: Gauss-Legendre rules, minmod, (block) tridiagonal solvers.
//! * [`chaos`]: gPC basis and Galerkin operator assembly (`S`, `S~`, `B`, `C`).
//! * [`imex`]: double Butcher tableaux.
//! * [`transport`]: the linear transport solver.
//! * [`rht`]: the radiative heat transfer solver.
//! * [`reference`]: limiting diffusion schemes and the collocation oracle.
//! * [`harness`]: experiment configuration, presets, CSV output, comparisons.

// Negated comparisons reject NaN on purpose; indexed loops mirror the stencils.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chaos;
pub mod error;
pub mod exec;
pub mod harness;
pub mod imex;
pub mod march;
pub mod mesh;
pub mod numerics;
mod stencil;
pub mod reference;
pub mod rht;
pub mod transport;

pub use error::{Error, Result};
pub use exec::Execution;
