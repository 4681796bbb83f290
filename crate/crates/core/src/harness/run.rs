use std::time::Instant;

use super::config::{BoundaryKind, ExperimentConfig, Model, Problem};
use super::expr::Expr;
use crate::chaos::{build_basis, default_quadrature_size, mean_and_std, Density, GpcBasis, RandomField};
use crate::exec::Execution;
use crate::imex::{tableau, DoubleTableau};
use crate::march::march;
use crate::mesh::{Boundary, Grid};
use crate::numerics::{gauss_legendre, map_rule};
use crate::reference::{
    collocation_oracle, implicit_rk_diffusion_step, implicit_rk_rht_diffusion_step, DiffusionOperators,
};
use crate::rht::{RhtOperators, RhtSolver, RhtState};
use crate::transport::{PenaltyParams, TransportOperators, TransportSolver, TransportState};
use crate::{Error, Result};

/// The solution at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    /// Whole time steps taken before landing on `time`.
    pub nt: usize,
    /// Seconds since the run started; never compared.
    pub wall_seconds: f64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// gPC coefficients `[cell][mode]` of the primary field (absent for
    /// collocation runs).
    pub modes: Option<Vec<f64>>,
    /// Radiation density `<r>` coefficients of radiative runs.
    pub radiation: Option<Vec<f64>>,
}

/// Output of [`run_experiment`]. The primary field is the density `rho` for
/// transport problems and the temperature `theta` for radiative ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: String,
    pub scheme: String,
    pub x: Vec<f64>,
    pub k: usize,
    pub snapshots: Vec<Snapshot>,
}

impl RunReport {
    pub fn nt(&self) -> Vec<usize> {
        self.snapshots.iter().map(|s| s.nt).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

/// Runs the experiment with the default execution mode.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    run_experiment_with(cfg, Execution::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<RunReport> {
    run_inner(cfg, exec).map_err(|e| match e {
        e @ Error::Config(_) => e,
        e => Error::Annotated {
            context: format!("configuration of the failed run:\n{}", cfg.to_text().trim_end()),
            source: Box::new(e),
        },
    })
}

fn run_inner(cfg: &ExperimentConfig, exec: Execution) -> Result<RunReport> {
    let grid = cfg.grid()?;
    let tab = tableau(&cfg.tableau)?;
    let scheme = format!(
        "{} | {} | N = {} | Nv = {} | dt = {:e}",
        cfg.tableau,
        problem_name(cfg),
        cfg.degree,
        cfg.nv,
        cfg.march_dt()
    );
    let start = Instant::now();
    let times = if cfg.times.is_empty() { vec![0.0] } else { cfg.times.clone() };
    let snapshots = match cfg.problem {
        Problem::Collocation => run_collocation(cfg, &grid, &tab, &times, exec, start)?,
        _ => {
            let basis = basis_for(cfg, cfg.degree)?;
            let fields = Frozen { z: None };
            run_galerkin(cfg, cfg.problem, &grid, basis, &tab, &fields, &times, exec, start)?
        }
    };
    let k = if cfg.problem == Problem::Collocation { 1 } else { cfg.degree + 1 };
    Ok(RunReport {
        config: cfg.to_text(),
        scheme,
        x: grid.centers(),
        k,
        snapshots,
    })
}

fn problem_name(cfg: &ExperimentConfig) -> &'static str {
    match cfg.problem {
        Problem::Transport => "transport",
        Problem::Rht => "rht",
        Problem::DiffusionTransport => "diffusion-transport",
        Problem::DiffusionRht => "diffusion-rht",
        Problem::Collocation => match cfg.model {
            Model::Transport => "collocation/transport",
            Model::Rht => "collocation/rht",
        },
    }
}

fn basis_for(cfg: &ExperimentConfig, degree: usize) -> Result<GpcBasis> {
    let q = match cfg.zq {
        Some(q) if degree == cfg.degree => q,
        _ => default_quadrature_size(degree),
    };
    build_basis(degree, Density::Uniform, q)
}

/// Expression evaluation, optionally with `z` pinned to a collocation node.
struct Frozen {
    z: Option<f64>,
}

impl Frozen {
    fn eval(&self, e: &Expr, x: f64, z: f64) -> f64 {
        e.eval(x, self.z.unwrap_or(z))
    }

    fn field(&self, e: &Expr) -> RandomField {
        let e2 = e.clone();
        let pin = self.z;
        RandomField::new(e.text().to_string(), move |x, z| e2.eval(x, pin.unwrap_or(z)))
    }

    fn boundary(&self, kind: BoundaryKind, basis: &GpcBasis, left: &Expr, right: &Expr) -> Boundary {
        match kind {
            BoundaryKind::Periodic => Boundary::Periodic,
            BoundaryKind::Reflecting => Boundary::reflecting(),
            BoundaryKind::Inflow => Boundary::dirichlet(
                basis.project(|z| self.eval(left, 0.0, z)),
                basis.project(|z| self.eval(right, 1.0, z)),
            ),
        }
    }

    /// Cell-centre gPC coefficients of `e`, laid out `[cell][mode]`.
    fn project(&self, e: &Expr, grid: &Grid, basis: &GpcBasis) -> Vec<f64> {
        grid.centers()
            .into_iter()
            .flat_map(|x| basis.project(|z| self.eval(e, x, z)))
            .collect()
    }
}

fn stats(coeffs: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    coeffs.chunks(k).map(mean_and_std).unzip()
}

#[allow(clippy::too_many_arguments)]
fn run_galerkin(
    cfg: &ExperimentConfig,
    problem: Problem,
    grid: &Grid,
    basis: GpcBasis,
    tab: &DoubleTableau,
    fr: &Frozen,
    times: &[f64],
    exec: Execution,
    start: Instant,
) -> Result<Vec<Snapshot>> {
    let k = basis.size();
    let vrule = map_rule(&gauss_legendre(cfg.nv)?, 0.0, 1.0)?;
    let sigma = fr.field(&cfg.sigma);
    let rad_bc = fr.boundary(cfg.boundary, &basis, &cfg.inflow_left, &cfg.inflow_right);
    let dt = cfg.march_dt();
    let mut out = Vec::with_capacity(times.len());
    let snap = |t: f64, nt: usize, modes: Vec<f64>, radiation: Option<Vec<f64>>| {
        let (mean, std) = stats(&modes, k);
        Snapshot {
            time: t,
            nt,
            wall_seconds: start.elapsed().as_secs_f64(),
            mean,
            std,
            modes: Some(modes),
            radiation,
        }
    };

    match problem {
        Problem::Transport | Problem::DiffusionTransport => {
            let ops = TransportOperators::new(*grid, basis, vrule, &sigma, rad_bc, cfg.closure)?;
            let rho0 = fr.project(&cfg.initial, grid, ops.basis());
            if problem == Problem::Transport {
                let init = if cfg.well_prepared {
                    TransportState::well_prepared(&ops, &rho0)
                } else {
                    let mut s = TransportState::zeros(&ops);
                    for lane in s.r.chunks_mut(rho0.len()) {
                        lane.copy_from_slice(&rho0);
                    }
                    s
                };
                let params = PenaltyParams::new(cfg.eps, grid.dx())?;
                let solver = TransportSolver::new(ops, params, tab.clone()).with_execution(exec);
                let vrule = solver.ops().vrule().clone();
                solver.run(init, dt, times, |s, t, nt| {
                    out.push(snap(t, nt, s.rho(&vrule), None));
                    Ok(())
                })?;
            } else {
                let dops = DiffusionOperators::from_transport(&ops);
                march(
                    rho0,
                    dt,
                    times,
                    |u, h| {
                        *u = implicit_rk_diffusion_step(u, &dops, tab, h)?;
                        Ok(())
                    },
                    |u, t, nt| {
                        out.push(snap(t, nt, u.clone(), None));
                        Ok(())
                    },
                )?;
            }
        }
        Problem::Rht | Problem::DiffusionRht => {
            let theta_bc = fr.boundary(cfg.boundary, &basis, &cfg.theta_left, &cfg.theta_right);
            let ops = RhtOperators::new(*grid, basis, vrule, &sigma, theta_bc, rad_bc, cfg.closure)?;
            let theta0 = fr.project(&cfg.initial, grid, ops.basis());
            if problem == Problem::Rht {
                let init = if cfg.well_prepared {
                    RhtState::well_prepared(&ops, &theta0)
                } else {
                    let r0 = fr.project(&cfg.initial_radiation, grid, ops.basis());
                    let mut s = RhtState::zeros(&ops);
                    s.theta.copy_from_slice(&theta0);
                    for lane in s.r.chunks_mut(r0.len()) {
                        lane.copy_from_slice(&r0);
                    }
                    s
                };
                let params = PenaltyParams::new(cfg.eps, grid.dx())?;
                let solver = RhtSolver::new(ops, params, tab.clone())
                    .with_execution(exec)
                    .with_floor(cfg.floor);
                let weights = solver.ops().vrule().weights.clone();
                solver.run(init, dt, times, |s, t, nt| {
                    out.push(snap(t, nt, s.theta.clone(), Some(s.rho(&weights))));
                    Ok(())
                })?;
            } else {
                march(
                    theta0,
                    dt,
                    times,
                    |u, h| {
                        *u = implicit_rk_rht_diffusion_step(u, &ops, tab, h)?;
                        Ok(())
                    },
                    |u, t, nt| {
                        out.push(snap(t, nt, u.clone(), None));
                        Ok(())
                    },
                )?;
            }
        }
        Problem::Collocation => unreachable!("collocation runs are dispatched separately"),
    }
    Ok(out)
}

fn run_collocation(
    cfg: &ExperimentConfig,
    grid: &Grid,
    tab: &DoubleTableau,
    times: &[f64],
    exec: Execution,
    start: Instant,
) -> Result<Vec<Snapshot>> {
    let problem = match cfg.model {
        Model::Transport => Problem::Transport,
        Model::Rht => Problem::Rht,
    };
    let zrule = gauss_legendre(cfg.collocation_nodes)?;
    let mut nts = Vec::new();
    let nt_probe = std::sync::Mutex::new(&mut nts);
    // Nodes run in parallel; each node solve itself stays sequential.
    let stats = collocation_oracle(&zrule, exec, |z| {
        let basis = basis_for(cfg, 0)?;
        let fr = Frozen { z: Some(z) };
        let snaps = run_galerkin(cfg, problem, grid, basis, tab, &fr, times, Execution::Sequential, start)?;
        let mut guard = nt_probe.lock().expect("no panics while holding the lock");
        if guard.is_empty() {
            guard.extend(snaps.iter().map(|s| s.nt));
        }
        Ok(snaps.into_iter().map(|s| s.mean).collect())
    })?;
    let wall = start.elapsed().as_secs_f64();
    Ok(times
        .iter()
        .zip(stats.mean)
        .zip(stats.std)
        .enumerate()
        .map(|(i, ((&time, mean), std))| Snapshot {
            time,
            nt: nts[i],
            wall_seconds: wall,
            mean,
            std,
            modes: None,
            radiation: None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    #[test]
    fn zero_times_gives_initial_snapshot() {
        let cfg = parse_config("problem = rht\nnx = 10\ndegree = 1").unwrap();
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.snapshots.len(), 1);
        let s = &rep.snapshots[0];
        assert_eq!((s.time, s.nt), (0.0, 0));
        assert!(s.mean.iter().chain(&s.std).all(|v| *v == 0.0));
        assert!(s.radiation.as_ref().unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn collocation_of_deterministic_problem_matches_galerkin() {
        let text = "nx = 20\nlambda = 0.2\neps = 0.1\ntimes = 0.01, 0.02\n";
        let g = run_experiment(&parse_config(text).unwrap()).unwrap();
        let c = parse_config(&format!("{text}problem = collocation\ncollocation_nodes = 3\n")).unwrap();
        let c = run_experiment(&c).unwrap();
        assert_eq!(g.nt(), c.nt());
        for (a, b) in g.snapshots.iter().zip(&c.snapshots) {
            for (x, y) in a.mean.iter().zip(&b.mean) {
                assert!((x - y).abs() < 1e-13, "{x} vs {y}");
            }
            assert!(b.std.iter().all(|s| *s < 1e-7));
        }
    }

    #[test]
    fn solver_errors_carry_the_config() {
        let cfg = parse_config("problem = rht\nnx = 10\ninitial = 0.0 - 1\ntimes = 0.01\nfloor = -0.5").unwrap();
        let err = run_experiment(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("problem = rht"));
    }
}
