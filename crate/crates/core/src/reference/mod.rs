//! Limiting-diffusion reference schemes and a stochastic collocation oracle
//! used to validate the kinetic solvers.

mod collocation;
mod diffusion;
mod rht;

pub use collocation::{collocation_oracle, CollocationStats};
pub use diffusion::{
    implicit_rk_diffusion_step, implicit_rk_diffusion_step_tilde, DiffusionOperators,
};
pub use rht::implicit_rk_rht_diffusion_step;
