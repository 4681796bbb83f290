use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use super::kinetic::{lane_average, Lane};
use super::{PenaltyParams, TransportOperators, TransportState};
use crate::exec::Execution;
use crate::imex::DoubleTableau;
use crate::march::march;
use crate::mesh::{fill_even, fill_odd, GHOSTS};
use crate::stencil::{face_laplacian, mat_vec, solve_face_system};
use crate::{Error, Result};

type Relaxation = Arc<(Vec<DMatrix<f64>>, Vec<DMatrix<f64>>)>;

/// Solves `(I - alpha (mu/3) D_h[S^{-1} D_h]) P = rhs` for the velocity average
/// of a stage, with face matrices `S^{-1}_{i+1/2}` and the operators' boundary.
pub fn solve_p_stage(ops: &TransportOperators, rhs: &[f64], alpha: f64, mu: f64) -> Result<Vec<f64>> {
    let (n, k) = (ops.n(), ops.k());
    if rhs.len() != n * k {
        return Err(Error::LengthMismatch { expected: n * k, got: rhs.len() });
    }
    let dx = ops.grid().dx();
    let scale = alpha * mu / (3.0 * dx * dx);
    let couplings: Vec<DMatrix<f64>> = ops.s_face_inv().iter().map(|m| m * scale).collect();
    let eye = vec![DMatrix::identity(k, k); n];
    solve_face_system(&eye, &couplings, rhs, ops.boundary(), k)
}

/// Pads an interior `[cell][mode]` field and fills its even ghosts.
pub(crate) fn pad_even(ops_bc: &crate::mesh::Boundary, x: &[f64], k: usize, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; (n + 2 * GHOSTS) * k];
    p[GHOSTS * k..(GHOSTS + n) * k].copy_from_slice(x);
    fill_even(&mut p, k, n, ops_bc);
    p
}

/// Penalized IMEX Runge-Kutta stepper for the gPC transport system.
#[derive(Debug)]
pub struct TransportSolver {
    ops: TransportOperators,
    params: PenaltyParams,
    tableau: DoubleTableau,
    exec: Execution,
    cache: Mutex<Vec<(u64, Relaxation)>>,
}

impl TransportSolver {
    pub fn new(ops: TransportOperators, params: PenaltyParams, tableau: DoubleTableau) -> Self {
        Self {
            ops,
            params,
            tableau,
            exec: Execution::default(),
            cache: Mutex::new(Vec::new()),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn ops(&self) -> &TransportOperators {
        &self.ops
    }

    pub fn params(&self) -> &PenaltyParams {
        &self.params
    }

    pub fn tableau(&self) -> &DoubleTableau {
        &self.tableau
    }

    fn relaxation(&self, c: f64) -> Relaxation {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((_, r)) = cache.iter().find(|(key, _)| *key == c.to_bits()) {
            return r.clone();
        }
        let r = Arc::new(self.ops.relaxation(c));
        if cache.len() >= 8 {
            cache.remove(0);
        }
        cache.push((c.to_bits(), r.clone()));
        r
    }

    /// Advances `state` by one step of size `dt`.
    pub fn step(&self, state: &mut TransportState, dt: f64) -> Result<()> {
        let ops = &self.ops;
        let (n, k, nv) = (ops.n(), ops.k(), ops.nv());
        if state.n != n || state.k != k || state.nv != nv {
            return Err(Error::InvalidArgument("state shape does not match operators".into()));
        }
        let nk = n * k;
        let tab = &self.tableau;
        let PenaltyParams { eps, mu, phi } = self.params;
        let dx = ops.grid().dx();
        let bc = ops.boundary();
        let closure = ops.closure();
        let weights = &ops.vrule().weights;
        let nodes = &ops.vrule().nodes;
        let mut lanes = vec![Lane::new(n, k, tab.s); nv];

        for stage in 0..tab.s {
            let alpha = dt * tab.a_im[stage][stage];
            let (a_ex, a_im) = (&tab.a_ex[stage], &tab.a_im[stage]);
            let (r0, j0) = (&state.r, &state.j);
            self.exec.for_each_mut(&mut lanes, |m, lane| {
                let s = m * nk..(m + 1) * nk;
                lane.accumulate(&r0[s.clone()], &j0[s], dt, a_ex, a_im, stage);
            });

            let rbar_avg = lane_average(&lanes, weights, |l| &l.rbar);
            let p = solve_p_stage(ops, &rbar_avg, alpha, mu)?;
            let p_pad = pad_even(bc, &p, k, n);
            let mut lp = vec![0.0; nk];
            face_laplacian(ops.s_face_inv(), &p_pad, k, n, dx, &mut lp);

            let relax = self.relaxation(alpha / (eps * eps));
            let (mm, nn) = (&relax.0, &relax.1);
            let drift = 1.0 - eps * eps * phi;
            let q = alpha * mu / 3.0;
            self.exec.for_each_mut(&mut lanes, |m, lane| {
                let v = nodes[m];
                let mut tmp = vec![0.0; k];
                let mut out = vec![0.0; k];
                let off = GHOSTS * k;
                for i in 0..n {
                    let c = i * k;
                    for a in 0..k {
                        tmp[a] = lane.rbar[c + a] + q * lp[c + a] - p[c + a];
                    }
                    mat_vec(&mm[i], &tmp, &mut out);
                    for a in 0..k {
                        lane.rp[off + c + a] = p[c + a] + out[a];
                    }
                }
                fill_even(&mut lane.rp, k, n, bc);
                let coef = drift * v / (2.0 * dx);
                for i in 0..n {
                    let c = i * k;
                    let pc = off + c;
                    mat_vec(&mm[i], &lane.jbar[c..c + k], &mut out);
                    for a in 0..k {
                        tmp[a] = lane.rp[pc + k + a] - lane.rp[pc - k + a];
                    }
                    let mut grad = vec![0.0; k];
                    mat_vec(&nn[i], &tmp, &mut grad);
                    for a in 0..k {
                        lane.jp[pc + a] = out[a] - coef * grad[a];
                    }
                }
                fill_odd(&mut lane.jp, k, n, bc, closure);
                lane.implicit_terms(stage, alpha, k);
                lane.explicit_terms(stage, v, phi, dx, k);
                for (f, l) in lane.f1[stage].iter_mut().zip(&lp) {
                    *f -= mu / 3.0 * l;
                }
            });
            if !lanes.iter().all(Lane::stage_is_finite) {
                return Err(Error::Divergence { stage: stage + 1, t: state.t });
            }
        }

        let lanes = &lanes;
        let (b_ex, b_im) = (&tab.b_ex, &tab.b_im);
        self.exec.for_each_chunk2(&mut state.r, &mut state.j, nk, |m, r, j| {
            lanes[m].finish(r, j, dt, b_ex, b_im);
        });
        state.t += dt;
        if !state.is_finite() {
            return Err(Error::Divergence { stage: tab.s, t: state.t });
        }
        Ok(())
    }

    /// Marches `init` on the grid `n dt`, landing exactly on every time in
    /// `times` (ascending). `record` gets each landed state, its time and the
    /// number of whole steps taken.
    pub fn run(
        &self,
        init: TransportState,
        dt: f64,
        times: &[f64],
        record: impl FnMut(&TransportState, f64, usize) -> Result<()>,
    ) -> Result<TransportState> {
        march(init, dt, times, |s, h| self.step(s, h), record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{build_basis, default_quadrature_size, Density, RandomField};
    use crate::imex::tableau;
    use crate::mesh::{Boundary, FluxClosure, Grid};
    use crate::numerics::{gauss_legendre, map_rule};

    fn ops_with(field: RandomField, n: usize, deg: usize, bc: Boundary) -> TransportOperators {
        let basis = build_basis(deg, Density::Uniform, default_quadrature_size(deg)).unwrap();
        let v = map_rule(&gauss_legendre(8).unwrap(), 0.0, 1.0).unwrap();
        TransportOperators::new(Grid::from_cells(n).unwrap(), basis, v, &field, bc, FluxClosure::Constant)
            .unwrap()
    }

    fn solver(ops: TransportOperators, eps: f64) -> TransportSolver {
        let p = PenaltyParams::new(eps, ops.grid().dx()).unwrap();
        TransportSolver::new(ops, p, tableau("SSP2-332").unwrap())
    }

    fn bumpy(ops: &TransportOperators) -> TransportState {
        let (n, k) = (ops.n(), ops.k());
        let mut s = TransportState::zeros(ops);
        for m in 0..ops.nv() {
            for i in 0..n {
                for c in 0..k {
                    let x = (i as f64 + 0.5) / n as f64;
                    let o = (m * n + i) * k + c;
                    s.r[o] = 1.0 + 0.3 * (6.0 * x + m as f64).sin() / (1 + c) as f64;
                    s.j[o] = 0.1 * (3.0 * x * (m + 1) as f64).cos() / (1 + c) as f64;
                }
            }
        }
        s
    }

    #[test]
    fn uniform_state_is_fixed_point() {
        for eps in [1.0, 1e-3, 1e-8] {
            let ops = ops_with(RandomField::affine_z(1.0, 0.5), 10, 2, Boundary::Periodic);
            let sv = solver(ops, eps);
            let mut s = TransportState::uniform(sv.ops(), &[1.5, 0.2, -0.1]);
            let init = s.clone();
            for _ in 0..5 {
                sv.step(&mut s, 0.004).unwrap();
            }
            for (a, b) in s.r.iter().zip(&init.r) {
                assert!((a - b).abs() < 1e-13);
            }
            assert!(s.j.iter().all(|x| x.abs() < 1e-13));
        }
    }

    #[test]
    fn periodic_mass_is_conserved() {
        for eps in [1.0, 0.05, 1e-6] {
            let ops = ops_with(RandomField::affine_z(1.0, 0.5), 20, 2, Boundary::Periodic);
            let sv = solver(ops, eps);
            let mut s = bumpy(sv.ops());
            let mass = |s: &TransportState| -> f64 {
                s.rho(sv.ops().vrule()).chunks(3).map(|c| c[0]).sum()
            };
            let m0 = mass(&s);
            for _ in 0..50 {
                sv.step(&mut s, 0.002).unwrap();
            }
            assert!(((mass(&s) - m0) / m0).abs() < 1e-12, "eps {eps}");
        }
    }

    #[test]
    fn deterministic_data_keeps_higher_modes_zero() {
        let bc = Boundary::dirichlet(vec![1.0, 0.0, 0.0], vec![0.0; 3]);
        let ops = ops_with(RandomField::constant(1.0), 16, 2, bc);
        let sv = solver(ops, 1e-2);
        let mut s = TransportState::zeros(sv.ops());
        for _ in 0..30 {
            sv.step(&mut s, 0.002).unwrap();
        }
        let hi = s.r.chunks(3).chain(s.j.chunks(3)).flat_map(|c| &c[1..]).fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(hi <= 1e-13);
        assert!(s.r.chunks(3).any(|c| c[0] > 1e-3));
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let bc = Boundary::dirichlet(vec![1.0, 0.0], vec![0.0, 0.0]);
        let run = |exec| {
            let ops = ops_with(RandomField::affine_z(1.0, 0.5), 12, 1, bc.clone());
            let sv = solver(ops, 0.1).with_execution(exec);
            let mut s = TransportState::zeros(sv.ops());
            for _ in 0..10 {
                sv.step(&mut s, 0.003).unwrap();
            }
            s
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn p_stage_examples() {
        let ops = ops_with(RandomField::affine_z(1.0, 0.5), 8, 2, Boundary::reflecting());
        let rhs: Vec<f64> = (0..24).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(solve_p_stage(&ops, &rhs, 0.1, 0.0).unwrap(), rhs);
        let flat: Vec<f64> = (0..24).map(|i| [2.0, -0.5, 0.25][i % 3]).collect();
        let p = solve_p_stage(&ops, &flat, 0.1, 1.0).unwrap();
        assert!(p.iter().zip(&flat).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn p_stage_matches_dense_scalar_oracle() {
        let n = 8;
        let bc = Boundary::dirichlet(vec![1.0], vec![0.0]);
        let ops = ops_with(RandomField::constant(1.0), n, 0, bc);
        let dx = 1.0 / n as f64;
        let rhs: Vec<f64> = (0..n).map(|i| ((i as f64 + 0.5) * dx * 3.0).sin()).collect();
        let (alpha, mu) = (0.01, 1.0);
        let g = alpha * mu / (3.0 * dx * dx);
        let mut a = DMatrix::zeros(n, n);
        let mut b = nalgebra::DVector::from_column_slice(&rhs);
        for i in 0..n {
            a[(i, i)] = 1.0 + 2.0 * g;
            if i > 0 {
                a[(i, i - 1)] = -g;
            }
            if i + 1 < n {
                a[(i, i + 1)] = -g;
            }
        }
        b[0] += g * 1.0;
        let want = a.lu().solve(&b).unwrap();
        let got = solve_p_stage(&ops, &rhs, alpha, mu).unwrap();
        for i in 0..n {
            assert!((got[i] - want[i]).abs() < 1e-10);
        }
    }
}
