use super::TransportOperators;
use crate::mesh::{fill_even, GHOSTS};
use crate::numerics::QuadratureRule;
use crate::stencil::mat_vec;

/// gPC coefficients of the even and odd parities, stored `[velocity][cell][mode]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    pub(crate) nv: usize,
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub r: Vec<f64>,
    pub j: Vec<f64>,
    pub t: f64,
}

impl TransportState {
    pub fn zeros(ops: &TransportOperators) -> Self {
        let (nv, n, k) = (ops.nv(), ops.n(), ops.k());
        Self {
            nv,
            n,
            k,
            r: vec![0.0; nv * n * k],
            j: vec![0.0; nv * n * k],
            t: 0.0,
        }
    }

    /// Every velocity and cell set to the same coefficient vector, `j = 0`.
    pub fn uniform(ops: &TransportOperators, coeffs: &[f64]) -> Self {
        let mut s = Self::zeros(ops);
        for c in s.r.chunks_mut(s.k) {
            c.copy_from_slice(coeffs);
        }
        s
    }

    /// Local-equilibrium data: `r = rho` for every velocity and
    /// `j = -v S_i^{-1} (rho_{i+1} - rho_{i-1}) / (2 dx)` with boundary ghosts.
    pub fn well_prepared(ops: &TransportOperators, rho: &[f64]) -> Self {
        let (nv, n, k) = (ops.nv(), ops.n(), ops.k());
        let mut s = Self::zeros(ops);
        let mut pad = vec![0.0; (n + 2 * GHOSTS) * k];
        pad[GHOSTS * k..(GHOSTS + n) * k].copy_from_slice(&rho[..n * k]);
        fill_even(&mut pad, k, n, ops.boundary());
        let dx = ops.grid().dx();
        let mut grad = vec![0.0; k];
        let mut flux = vec![0.0; k];
        for m in 0..nv {
            let v = ops.vrule().nodes[m];
            for i in 0..n {
                let p = i + GHOSTS;
                for c in 0..k {
                    grad[c] = (pad[(p + 1) * k + c] - pad[(p - 1) * k + c]) / (2.0 * dx);
                }
                mat_vec(ops.s_inv(i), &grad, &mut flux);
                let o = (m * n + i) * k;
                s.r[o..o + k].copy_from_slice(&rho[i * k..(i + 1) * k]);
                for c in 0..k {
                    s.j[o + c] = -v * flux[c];
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

    /// Coefficient vector of `r` at velocity node `m`, cell `i`.
    pub fn r_at(&self, m: usize, i: usize) -> &[f64] {
        let o = (m * self.n + i) * self.k;
        &self.r[o..o + self.k]
    }

    pub fn j_at(&self, m: usize, i: usize) -> &[f64] {
        let o = (m * self.n + i) * self.k;
        &self.j[o..o + self.k]
    }

    /// Velocity average `rho = <r>` as `[cell][mode]`.
    pub fn rho(&self, vrule: &QuadratureRule) -> Vec<f64> {
        let nk = self.n * self.k;
        let mut out = vec![0.0; nk];
        for (m, w) in vrule.weights.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(&self.r[m * nk..(m + 1) * nk]) {
                *o += w * r;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(&self.j).all(|v| v.is_finite())
    }
}
