use super::RhtOperators;
use crate::mesh::GHOSTS;
use crate::transport::pad_even;

/// Radiative parities `[velocity][cell][mode]` and temperature `[cell][mode]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhtState {
    pub(crate) nv: usize,
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub r: Vec<f64>,
    pub j: Vec<f64>,
    pub theta: Vec<f64>,
    pub t: f64,
}

impl RhtState {
    pub fn zeros(ops: &RhtOperators) -> Self {
        let (nv, n, k) = (ops.nv(), ops.n(), ops.k());
        Self {
            nv,
            n,
            k,
            r: vec![0.0; nv * n * k],
            j: vec![0.0; nv * n * k],
            theta: vec![0.0; n * k],
            t: 0.0,
        }
    }

    /// Local equilibrium for the temperature `theta`: `r = B(theta)` and
    /// `j = -v (r_{i+1} - r_{i-1}) / (2 dx)`, ghosts of `r` taken from the
    /// temperature boundary.
    pub fn well_prepared(ops: &RhtOperators, theta: &[f64]) -> Self {
        let (nv, n, k) = (ops.nv(), ops.n(), ops.k());
        let mut s = Self::zeros(ops);
        s.theta.copy_from_slice(&theta[..n * k]);
        let tp = pad_even(ops.theta_boundary(), theta, k, n);
        let b = ops.emission_padded(&tp);
        let dx = ops.grid().dx();
        for m in 0..nv {
            let v = ops.vrule().nodes[m];
            for i in 0..n {
                let p = i + GHOSTS;
                let o = (m * n + i) * k;
                for c in 0..k {
                    s.r[o + c] = b[p * k + c];
                    s.j[o + c] = -v * (b[(p + 1) * k + c] - b[(p - 1) * k + c]) / (2.0 * dx);
                }
            }
        }
        s
    }

    pub fn n_velocities(&self) -> usize {
        self.nv
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn n_modes(&self) -> usize {
        self.k
    }

    /// Velocity average of `r` as `[cell][mode]`.
    pub fn rho(&self, weights: &[f64]) -> Vec<f64> {
        let nk = self.n * self.k;
        let mut out = vec![0.0; nk];
        for (m, w) in weights.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(&self.r[m * nk..(m + 1) * nk]) {
                *o += w * r;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(&self.j).chain(&self.theta).all(|v| v.is_finite())
    }
}
