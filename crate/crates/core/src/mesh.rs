//! Uniform cell-centred grid on `[0, 1]`, boundary descriptions and ghost-cell
//! filling for fields stored as `[cell][mode]` with two ghost layers per side.

use crate::{Error, Result};

/// Ghost layers on each side of a padded field.
pub const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    dx: f64,
}

impl Grid {
    pub fn from_cells(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 cells, got {n}")));
        }
        Ok(Self { n, dx: 1.0 / n as f64 })
    }

    /// `dx` must divide the unit interval into a whole number of cells.
    pub fn from_dx(dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx <= 0.5) {
            return Err(Error::InvalidArgument(format!("dx must lie in (0, 0.5], got {dx}")));
        }
        let n = (1.0 / dx).round();
        if ((n * dx) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "dx = {dx} does not divide [0, 1] into whole cells"
            )));
        }
        Self::from_cells(n as usize)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of cells including ghosts.
    pub fn padded(&self) -> usize {
        self.n + 2 * GHOSTS
    }

    /// Centre of cell `i`; negative and `>= n` indices address ghost cells.
    pub fn center(&self, i: isize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n as isize).map(|i| self.center(i)).collect()
    }

    /// Centres of all padded cells, ghosts first.
    pub fn padded_centers(&self) -> Vec<f64> {
        (0..self.padded())
            .map(|p| self.center(p as isize - GHOSTS as isize))
            .collect()
    }
}

/// Condition at one end of a non-periodic domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Side {
    /// Prescribed gPC coefficients of the even quantity (inflow data for the
    /// kinetic fields, Dirichlet data for the diffusion fields).
    Dirichlet(Vec<f64>),
    /// Specular reflection: even quantities are mirrored, odd ones flip sign.
    /// Diffusion solves see a zero-flux wall.
    Reflecting,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Periodic,
    Walls { left: Side, right: Side },
}

impl Boundary {
    pub fn dirichlet(left: Vec<f64>, right: Vec<f64>) -> Self {
        Boundary::Walls {
            left: Side::Dirichlet(left),
            right: Side::Dirichlet(right),
        }
    }

    pub fn reflecting() -> Self {
        Boundary::Walls {
            left: Side::Reflecting,
            right: Side::Reflecting,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Boundary::Periodic)
    }
}

/// Ghost closure for the odd flux variable `j` next to a Dirichlet side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxClosure {
    /// Copy the adjacent interior value.
    #[default]
    Constant,
    /// Linear extrapolation from the two nearest interior cells.
    Linear,
}

impl std::str::FromStr for FluxClosure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "constant" => Ok(FluxClosure::Constant),
            "linear" => Ok(FluxClosure::Linear),
            other => Err(Error::InvalidArgument(format!("unknown flux closure `{other}`"))),
        }
    }
}

#[inline]
fn cell(buf: &[f64], k: usize, p: usize) -> &[f64] {
    &buf[p * k..(p + 1) * k]
}

fn copy_cell(buf: &mut [f64], k: usize, from: usize, to: usize) {
    buf.copy_within(from * k..(from + 1) * k, to * k);
}

fn wrap(buf: &mut [f64], k: usize, n: usize) {
    let g = GHOSTS;
    for l in 0..g {
        copy_cell(buf, k, n + l, l);
        copy_cell(buf, k, g + l, n + g + l);
    }
}

/// Fills the ghosts of an even quantity (`r`, `rho`, `theta`) in a padded
/// `[cell][mode]` buffer with `k` modes.
pub fn fill_even(buf: &mut [f64], k: usize, n: usize, bc: &Boundary) {
    let g = GHOSTS;
    match bc {
        Boundary::Periodic => wrap(buf, k, n),
        Boundary::Walls { left, right } => {
            for l in 0..g {
                // ghost at distance l + 1 from the wall
                let (lg, li) = (g - 1 - l, g + l);
                let (rg, ri) = (n + g + l, n + g - 1 - l);
                match left {
                    Side::Dirichlet(d) => buf[lg * k..(lg + 1) * k].copy_from_slice(&d[..k]),
                    Side::Reflecting => copy_cell(buf, k, li, lg),
                }
                match right {
                    Side::Dirichlet(d) => buf[rg * k..(rg + 1) * k].copy_from_slice(&d[..k]),
                    Side::Reflecting => copy_cell(buf, k, ri, rg),
                }
            }
        }
    }
}

/// Fills the ghosts of the odd flux quantity `j`.
pub fn fill_odd(buf: &mut [f64], k: usize, n: usize, bc: &Boundary, closure: FluxClosure) {
    let g = GHOSTS;
    match bc {
        Boundary::Periodic => wrap(buf, k, n),
        Boundary::Walls { left, right } => {
            let ends = [
                (left, g, g + 1, [g - 1, g - 2], [g, g + 1]),
                (right, n + g - 1, n + g - 2, [n + g, n + g + 1], [n + g - 1, n + g - 2]),
            ];
            for (side, b0, b1, ghosts, mirrors) in ends {
                for (l, &gp) in ghosts.iter().enumerate() {
                    for m in 0..k {
                        buf[gp * k + m] = match side {
                            Side::Reflecting => -cell(buf, k, mirrors[l])[m],
                            Side::Dirichlet(_) => match closure {
                                FluxClosure::Constant => buf[b0 * k + m],
                                FluxClosure::Linear => {
                                    let s = (l + 1) as f64;
                                    (1.0 + s) * buf[b0 * k + m] - s * buf[b1 * k + m]
                                }
                            },
                        };
                    }
                }
            }
        }
    }
}
