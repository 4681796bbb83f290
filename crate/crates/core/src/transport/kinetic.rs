//! Stage kernels shared by the transport and radiative solvers: the limited
//! upwind fluxes of the even-odd pair and per-velocity scratch storage.

use super::slopes;
use crate::mesh::GHOSTS;

/// Scratch for one velocity node. Stage values `rp`, `jp` and the slopes are
/// padded; stage derivatives are interior-only, one vector per stage.
#[derive(Debug, Clone)]
pub(crate) struct Lane {
    pub rbar: Vec<f64>,
    pub jbar: Vec<f64>,
    pub rp: Vec<f64>,
    pub jp: Vec<f64>,
    gamma: Vec<f64>,
    beta: Vec<f64>,
    flux_r: Vec<f64>,
    flux_j: Vec<f64>,
    pub f1: Vec<Vec<f64>>,
    pub f2: Vec<Vec<f64>>,
    pub g1: Vec<Vec<f64>>,
    pub g2: Vec<Vec<f64>>,
}

impl Lane {
    pub fn new(n: usize, k: usize, stages: usize) -> Self {
        let nk = n * k;
        let padded = (n + 2 * GHOSTS) * k;
        Self {
            rbar: vec![0.0; nk],
            jbar: vec![0.0; nk],
            rp: vec![0.0; padded],
            jp: vec![0.0; padded],
            gamma: vec![0.0; padded],
            beta: vec![0.0; padded],
            flux_r: vec![0.0; (n + 1) * k],
            flux_j: vec![0.0; (n + 1) * k],
            f1: vec![vec![0.0; nk]; stages],
            f2: vec![vec![0.0; nk]; stages],
            g1: vec![vec![0.0; nk]; stages],
            g2: vec![vec![0.0; nk]; stages],
        }
    }

    /// `rbar = r + dt sum_l (a_ex[l] f1_l + a_im[l] f2_l)` over the stages
    /// before `stage`, and the same for `jbar`.
    pub fn accumulate(&mut self, r: &[f64], j: &[f64], dt: f64, a_ex: &[f64], a_im: &[f64], stage: usize) {
        for idx in 0..r.len() {
            let (mut sr, mut sj) = (0.0, 0.0);
            for l in 0..stage {
                sr += a_ex[l] * self.f1[l][idx] + a_im[l] * self.f2[l][idx];
                sj += a_ex[l] * self.g1[l][idx] + a_im[l] * self.g2[l][idx];
            }
            self.rbar[idx] = r[idx] + dt * sr;
            self.jbar[idx] = j[idx] + dt * sj;
        }
    }

    /// Implicit stage derivatives from the freshly solved `rp`, `jp`.
    pub fn implicit_terms(&mut self, stage: usize, alpha: f64, k: usize) {
        let nk = self.rbar.len();
        let off = GHOSTS * k;
        for idx in 0..nk {
            self.f2[stage][idx] = (self.rp[off + idx] - self.rbar[idx]) / alpha;
            self.g2[stage][idx] = (self.jp[off + idx] - self.jbar[idx]) / alpha;
        }
    }

    /// Explicit transport terms of stage `stage`: `f1 = -dFr/dx`, `g1 = -dFj/dx`
    /// from the MUSCL upwind fluxes of the characteristic variables
    /// `r +- j / sqrt(phi)`. Ghosts of `rp` and `jp` must be filled.
    pub fn explicit_terms(&mut self, stage: usize, v: f64, phi: f64, dx: f64, k: usize) {
        let n = self.rbar.len() / k;
        slopes(&self.rp, &self.jp, k, phi, dx, &mut self.gamma, &mut self.beta);
        let sp = phi.sqrt();
        let (a, b, c) = (0.5 * v, 0.5 * v * sp, 0.25 * v * dx);
        for f in 0..=n {
            let (l, r) = ((f + GHOSTS - 1) * k, (f + GHOSTS) * k);
            for m in 0..k {
                let (rl, rr) = (self.rp[l + m], self.rp[r + m]);
                let (jl, jr) = (self.jp[l + m], self.jp[r + m]);
                let (gl, br) = (self.gamma[l + m], self.beta[r + m]);
                self.flux_r[f * k + m] = a * (jl + jr) - b * (rr - rl) + c * sp * (gl + br);
                self.flux_j[f * k + m] = a * phi * (rl + rr) - b * (jr - jl) + c * phi * (gl - br);
            }
        }
        let inv = 1.0 / dx;
        for idx in 0..n * k {
            self.f1[stage][idx] = -(self.flux_r[idx + k] - self.flux_r[idx]) * inv;
            self.g1[stage][idx] = -(self.flux_j[idx + k] - self.flux_j[idx]) * inv;
        }
    }

    /// `r += dt sum_k (b_ex f1 + b_im f2)` and likewise for `j`.
    pub fn finish(&self, r: &mut [f64], j: &mut [f64], dt: f64, b_ex: &[f64], b_im: &[f64]) {
        for idx in 0..r.len() {
            let (mut sr, mut sj) = (0.0, 0.0);
            for l in 0..b_ex.len() {
                sr += b_ex[l] * self.f1[l][idx] + b_im[l] * self.f2[l][idx];
                sj += b_ex[l] * self.g1[l][idx] + b_im[l] * self.g2[l][idx];
            }
            r[idx] += dt * sr;
            j[idx] += dt * sj;
        }
    }

    pub fn stage_is_finite(&self) -> bool {
        self.rp.iter().chain(&self.jp).all(|x| x.is_finite())
    }
}

/// Velocity average `sum_m w_m x_m` of per-lane interior vectors, in lane order.
pub(crate) fn lane_average(lanes: &[Lane], weights: &[f64], pick: impl Fn(&Lane) -> &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; pick(&lanes[0]).len()];
    for (lane, w) in lanes.iter().zip(weights) {
        for (o, x) in out.iter_mut().zip(pick(lane)) {
            *o += w * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_has_zero_divergence() {
        let (n, k) = (6, 2);
        let mut lane = Lane::new(n, k, 1);
        lane.rp.fill(0.7);
        lane.jp.fill(-0.2);
        lane.explicit_terms(0, 0.4, 1.0, 0.1, k);
        assert!(lane.f1[0].iter().chain(&lane.g1[0]).all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn smooth_data_gives_second_order_derivatives() {
        // r = exp(x), j = 0, phi = 1: g1 ~ -v r_x; monotone convex data keeps
        // the limiter inactive so the error is O(dx^2)
        let n = 400;
        let dx = 1.0 / n as f64;
        let mut lane = Lane::new(n, 1, 1);
        for p in 0..n + 2 * GHOSTS {
            let x = (p as f64 - GHOSTS as f64 + 0.5) * dx;
            lane.rp[p] = x.exp();
        }
        lane.explicit_terms(0, 1.0, 1.0, dx, 1);
        let mut err = 0.0f64;
        for i in 0..n {
            let x = (i as f64 + 0.5) * dx;
            let want = -x.exp();
            err = err.max((lane.g1[0][i] - want).abs());
        }
        assert!(err < 1e-4, "err {err}");
    }

    #[test]
    fn accumulate_and_finish_weights() {
        let mut lane = Lane::new(2, 1, 2);
        lane.f1 = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        lane.f2 = vec![vec![0.5, 0.5], vec![1.0, 1.0]];
        lane.g1 = vec![vec![0.0; 2]; 2];
        lane.g2 = vec![vec![0.0; 2]; 2];
        lane.accumulate(&[1.0, 1.0], &[0.0, 0.0], 0.1, &[0.5, 0.0], &[0.25, 0.0], 1);
        assert!((lane.rbar[0] - (1.0 + 0.1 * (0.5 + 0.125))).abs() < 1e-15);
        let (mut r, mut j) = (vec![1.0, 1.0], vec![0.0, 0.0]);
        lane.finish(&mut r, &mut j, 0.1, &[0.5, 0.5], &[0.5, 0.5]);
        assert!((r[1] - (1.0 + 0.1 * (1.0 + 2.0 + 0.25 + 0.5))).abs() < 1e-15);
    }
}
