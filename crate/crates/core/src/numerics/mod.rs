//! Quadrature, slope limiting and structured linear solvers shared by the
//! kinetic and diffusion schemes.

mod block;
mod limiter;
mod quadrature;
mod spd;
mod tridiag;

pub use block::{solve_block_tridiagonal, BlockThomas, BlockTridiagonalMatrix, PeriodicBlockTridiagonal};
pub use limiter::minmod;
pub use quadrature::{gauss_legendre, map_rule, velocity_average, QuadratureRule};
pub use spd::{gershgorin_positive, is_spd};
pub use tridiag::{solve_tridiagonal, TridiagonalMatrix};
