use nalgebra::DMatrix;

use super::{RhtOperators, RhtState};
use crate::exec::Execution;
use crate::imex::DoubleTableau;
use crate::march::march;
use crate::mesh::{fill_even, fill_odd, GHOSTS};
use crate::numerics::gershgorin_positive;
use crate::stencil::{face_laplacian, second_difference, solve_face_system_with};
use crate::transport::kinetic::{lane_average, Lane};
use crate::transport::{pad_even, PenaltyParams};
use crate::{Error, Result};

/// Coefficients of the linearized temperature system
/// `(d0 I + 4 d1 C_i) T - d2 D_h T - d3 D_h[4 C D_h] T = rhs`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaCoefficients {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Solves the linearized temperature system with `C` frozen at the padded
/// temperature `lin`. Returns the solution and the face matrices `4 C_{i+1/2}`.
pub(crate) fn linearized_theta_solve(
    ops: &RhtOperators,
    lin: &[f64],
    co: ThetaCoefficients,
    rhs: &[f64],
) -> Result<(Vec<f64>, Vec<DMatrix<f64>>)> {
    let (n, k) = (ops.n(), ops.k());
    let dx = ops.grid().dx();
    let c = ops.jacobian_padded(lin);
    let faces: Vec<DMatrix<f64>> = (0..=n)
        .map(|f| (&c[f + GHOSTS - 1] + &c[f + GHOSTS]) * 2.0)
        .collect();
    let eye = DMatrix::<f64>::identity(k, k);
    let diag: Vec<DMatrix<f64>> = (0..n)
        .map(|i| &eye * co.d0 + &c[i + GHOSTS] * (4.0 * co.d1))
        .collect();
    let dense = match diag.iter().position(|m| !gershgorin_positive(m)) {
        Some(i) => {
            log::warn!("temperature stage block {i} fails the Gershgorin test; using a dense solve");
            true
        }
        None => false,
    };
    let inv = 1.0 / (dx * dx);
    let couplings: Vec<DMatrix<f64>> = faces
        .iter()
        .map(|f| &eye * (co.d2 * inv) + f * (co.d3 * inv))
        .collect();
    let theta = solve_face_system_with(&diag, &couplings, rhs, ops.theta_boundary(), k, dense)?;
    Ok((theta, faces))
}

/// Result of one temperature stage: `Theta^k` and the velocity average of the
/// radiative stage value it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaStage {
    pub theta: Vec<f64>,
    pub r_avg: Vec<f64>,
}

/// Penalized IMEX Runge-Kutta stepper for the gPC radiative heat transfer system.
#[derive(Debug, Clone)]
pub struct RhtSolver {
    ops: RhtOperators,
    params: PenaltyParams,
    tableau: DoubleTableau,
    exec: Execution,
    floor: f64,
}

impl RhtSolver {
    pub fn new(ops: RhtOperators, params: PenaltyParams, tableau: DoubleTableau) -> Self {
        Self {
            ops,
            params,
            tableau,
            exec: Execution::default(),
            floor: -0.1,
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Lowest admissible nodal temperature; the run aborts below it.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn ops(&self) -> &RhtOperators {
        &self.ops
    }

    pub fn params(&self) -> &PenaltyParams {
        &self.params
    }

    pub fn tableau(&self) -> &DoubleTableau {
        &self.tableau
    }

    /// Solves for `Theta^k` given the accumulated temperature `theta_bar`, the
    /// velocity average of the accumulated radiation `rbar_avg`, the
    /// linearization point `lin` (unpadded) and `alpha = dt a_kk`.
    pub fn solve_theta_stage(
        &self,
        theta_bar: &[f64],
        rbar_avg: &[f64],
        lin: &[f64],
        alpha: f64,
    ) -> Result<ThetaStage> {
        let ops = &self.ops;
        let (n, k) = (ops.n(), ops.k());
        let nk = n * k;
        for x in [theta_bar, rbar_avg, lin] {
            if x.len() != nk {
                return Err(Error::LengthMismatch { expected: nk, got: x.len() });
            }
        }
        let PenaltyParams { eps, mu, .. } = self.params;
        let c = alpha / (eps * eps);
        let lin_pad = pad_even(ops.theta_boundary(), lin, k, n);
        let b_lin = ops.emission(lin);
        let rhs: Vec<f64> = (0..nk)
            .map(|i| (1.0 + c) * theta_bar[i] + c * (rbar_avg[i] + 3.0 * b_lin[i]))
            .collect();
        let co = ThetaCoefficients {
            d0: 1.0 + c,
            d1: c,
            d2: alpha * (1.0 + c),
            d3: c * alpha * mu / 3.0,
        };
        let (theta, faces) = linearized_theta_solve(ops, &lin_pad, co, &rhs)?;
        let tp = pad_even(ops.theta_boundary(), &theta, k, n);
        let dx = ops.grid().dx();
        let mut d = vec![0.0; nk];
        second_difference(&tp, k, n, dx, &mut d);
        let mut dc = vec![0.0; nk];
        face_laplacian(&faces, &tp, k, n, dx, &mut dc);
        let r_avg = (0..nk)
            .map(|i| theta_bar[i] + rbar_avg[i] + alpha * (d[i] + mu / 3.0 * dc[i]) - theta[i])
            .collect();
        Ok(ThetaStage { theta, r_avg })
    }

    /// Advances `state` by one step of size `dt`.
    pub fn step(&self, state: &mut RhtState, dt: f64) -> Result<()> {
        let ops = &self.ops;
        let (n, k, nv) = (ops.n(), ops.k(), ops.nv());
        if state.n != n || state.k != k || state.nv != nv {
            return Err(Error::InvalidArgument("state shape does not match operators".into()));
        }
        let nk = n * k;
        let tab = &self.tableau;
        let PenaltyParams { eps, mu, phi } = self.params;
        let dx = ops.grid().dx();
        let rad_bc = ops.radiation_boundary();
        let closure = ops.closure();
        let weights = &ops.vrule().weights;
        let nodes = &ops.vrule().nodes;
        let mut lanes = vec![Lane::new(n, k, tab.s); nv];
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(tab.s);
        let mut lin = state.theta.clone();

        for stage in 0..tab.s {
            let alpha = dt * tab.a_im[stage][stage];
            let c = alpha / (eps * eps);
            let (a_ex, a_im) = (&tab.a_ex[stage], &tab.a_im[stage]);
            let (r0, j0) = (&state.r, &state.j);
            self.exec.for_each_mut(&mut lanes, |m, lane| {
                let s = m * nk..(m + 1) * nk;
                lane.accumulate(&r0[s.clone()], &j0[s], dt, a_ex, a_im, stage);
            });
            let mut theta_bar = state.theta.clone();
            for (l, hl) in h.iter().enumerate() {
                let a = dt * a_im[l];
                theta_bar.iter_mut().zip(hl).for_each(|(t, x)| *t += a * x);
            }
            let rbar_avg = lane_average(&lanes, weights, |l| &l.rbar);
            let st = self.solve_theta_stage(&theta_bar, &rbar_avg, &lin, alpha)?;
            h.push(
                st.theta
                    .iter()
                    .zip(&theta_bar)
                    .map(|(t, b)| (t - b) / alpha)
                    .collect(),
            );

            let tp = pad_even(ops.theta_boundary(), &st.theta, k, n);
            let b_pad = ops.emission_padded(&tp);
            let mut lb = vec![0.0; nk];
            second_difference(&b_pad, k, n, dx, &mut lb);
            let drift = 1.0 - eps * eps * phi;
            let r_avg = &st.r_avg;
            let (rbar_avg, lb) = (&rbar_avg, &lb);
            self.exec.for_each_mut(&mut lanes, |m, lane| {
                let v = nodes[m];
                let off = GHOSTS * k;
                for idx in 0..nk {
                    lane.rp[off + idx] = r_avg[idx] + (lane.rbar[idx] - rbar_avg[idx]) / (1.0 + c);
                }
                fill_even(&mut lane.rp, k, n, rad_bc);
                let coef = c * drift * v / (2.0 * dx);
                for idx in 0..nk {
                    let p = off + idx;
                    let grad = lane.rp[p + k] - lane.rp[p - k];
                    lane.jp[p] = (lane.jbar[idx] - coef * grad) / (1.0 + c);
                }
                fill_odd(&mut lane.jp, k, n, rad_bc, closure);
                lane.implicit_terms(stage, alpha, k);
                lane.explicit_terms(stage, v, phi, dx, k);
                for (f, l) in lane.f1[stage].iter_mut().zip(lb) {
                    *f -= mu / 3.0 * l;
                }
            });
            if !lanes.iter().all(Lane::stage_is_finite) || st.theta.iter().any(|x| !x.is_finite()) {
                return Err(Error::Divergence { stage: stage + 1, t: state.t });
            }
            lin = st.theta;
        }

        let lanes = &lanes;
        let (b_ex, b_im) = (&tab.b_ex, &tab.b_im);
        self.exec.for_each_chunk2(&mut state.r, &mut state.j, nk, |m, r, j| {
            lanes[m].finish(r, j, dt, b_ex, b_im);
        });
        for (idx, t) in state.theta.iter_mut().enumerate() {
            let inc: f64 = (0..tab.s).map(|l| b_im[l] * h[l][idx]).sum();
            *t += dt * inc;
        }
        state.t += dt;
        if !state.is_finite() {
            return Err(Error::Divergence { stage: tab.s, t: state.t });
        }
        let lo = ops.nodal_min(&state.theta);
        if lo < self.floor {
            return Err(Error::TemperatureFloor { floor: self.floor, min: lo, t: state.t });
        }
        Ok(())
    }

    /// Marches `init` on the grid `n dt` with exact landing on `times`.
    pub fn run(
        &self,
        init: RhtState,
        dt: f64,
        times: &[f64],
        record: impl FnMut(&RhtState, f64, usize) -> Result<()>,
    ) -> Result<RhtState> {
        march(init, dt, times, |s, h| self.step(s, h), record)
    }
}
