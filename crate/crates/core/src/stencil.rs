//! Three-point face stencils on padded `[cell][mode]` fields and the implicit
//! elliptic solves built from them.

use nalgebra::{DMatrix, DVector};

use crate::mesh::{Boundary, Side, GHOSTS};
use crate::numerics::{
    solve_tridiagonal, BlockTridiagonalMatrix, PeriodicBlockTridiagonal, TridiagonalMatrix,
};
use crate::Result;

/// `true` when every off-diagonal entry is exactly zero.
pub(crate) fn is_diagonal(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Zeroes off-diagonal entries that are round-off relative to the diagonal.
pub(crate) fn clean_diagonal(m: &mut DMatrix<f64>) {
    let scale = m.diagonal().amax();
    let k = m.nrows();
    let off = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |a, (i, j)| a.max(m[(i, j)].abs()));
    if off <= 1e-14 * scale {
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    m[(i, j)] = 0.0;
                }
            }
        }
    }
}

#[inline]
fn mat_vec_acc(m: &DMatrix<f64>, x: &[f64], scale: f64, out: &mut [f64]) {
    let k = x.len();
    for (r, o) in out.iter_mut().enumerate().take(k) {
        let mut acc = 0.0;
        for c in 0..k {
            acc += m[(r, c)] * x[c];
        }
        *o += scale * acc;
    }
}

/// `out_i = [F_{i+1/2}(u_{i+1} - u_i) - F_{i-1/2}(u_i - u_{i-1})] / dx^2` for the
/// `n` interior cells, where `faces[f]` sits between cells `f - 1` and `f`.
pub(crate) fn face_laplacian(
    faces: &[DMatrix<f64>],
    u: &[f64],
    k: usize,
    n: usize,
    dx: f64,
    out: &mut [f64],
) {
    let inv = 1.0 / (dx * dx);
    let mut diff = vec![0.0; k];
    let mut flux = vec![0.0; k];
    out[..n * k].fill(0.0);
    for f in 0..=n {
        let (l, r) = (f + GHOSTS - 1, f + GHOSTS);
        for m in 0..k {
            diff[m] = u[r * k + m] - u[l * k + m];
        }
        flux.fill(0.0);
        mat_vec_acc(&faces[f], &diff, inv, &mut flux);
        if f < n {
            for m in 0..k {
                out[f * k + m] -= flux[m];
            }
        }
        if f > 0 {
            for m in 0..k {
                out[(f - 1) * k + m] += flux[m];
            }
        }
    }
}

/// Compact second difference `(u_{i+1} - 2u_i + u_{i-1}) / dx^2` per mode.
pub(crate) fn second_difference(u: &[f64], k: usize, n: usize, dx: f64, out: &mut [f64]) {
    let inv = 1.0 / (dx * dx);
    for i in 0..n {
        let p = i + GHOSTS;
        for m in 0..k {
            out[i * k + m] = (u[(p + 1) * k + m] - 2.0 * u[p * k + m] + u[(p - 1) * k + m]) * inv;
        }
    }
}

/// Solves `D_i x_i - G_{i+1/2}(x_{i+1} - x_i) + G_{i-1/2}(x_i - x_{i-1}) = rhs_i`
/// for the interior cells. `couplings[f]` is the (already scaled) face block
/// between cells `f - 1` and `f`. Dirichlet sides move the known ghost value to
/// the right-hand side; reflecting sides drop the wall face; periodic domains
/// use `couplings[0]` for the wrap-around face.
pub(crate) fn solve_face_system(
    cell_diag: &[DMatrix<f64>],
    couplings: &[DMatrix<f64>],
    rhs: &[f64],
    bc: &Boundary,
    k: usize,
) -> Result<Vec<f64>> {
    solve_face_system_with(cell_diag, couplings, rhs, bc, k, false)
}

/// [`solve_face_system`] with the option of a dense pivoted LU solve of the
/// assembled matrix instead of block elimination.
pub(crate) fn solve_face_system_with(
    cell_diag: &[DMatrix<f64>],
    couplings: &[DMatrix<f64>],
    rhs: &[f64],
    bc: &Boundary,
    k: usize,
    dense: bool,
) -> Result<Vec<f64>> {
    let n = cell_diag.len();
    let mut rhs = rhs.to_vec();
    let zero = DMatrix::zeros(k, k);
    let mut left_face = &couplings[0];
    let mut right_face = &couplings[n];
    if let Boundary::Walls { left, right } = bc {
        match left {
            Side::Dirichlet(d) => mat_vec_acc(&couplings[0], &d[..k], 1.0, &mut rhs[..k]),
            Side::Reflecting => left_face = &zero,
        }
        match right {
            Side::Dirichlet(d) => {
                mat_vec_acc(&couplings[n], &d[..k], 1.0, &mut rhs[(n - 1) * k..])
            }
            Side::Reflecting => right_face = &zero,
        }
    }
    let face = |f: usize| -> &DMatrix<f64> {
        if f == 0 {
            left_face
        } else if f == n {
            right_face
        } else {
            &couplings[f]
        }
    };
    let diag: Vec<DMatrix<f64>> = (0..n)
        .map(|i| &cell_diag[i] + face(i) + face(i + 1))
        .collect();

    let all_diagonal = !dense
        && !bc.is_periodic()
        && diag.iter().all(is_diagonal)
        && couplings.iter().all(is_diagonal);
    if all_diagonal {
        let mut x = vec![0.0; n * k];
        for m in 0..k {
            let d: Vec<f64> = diag.iter().map(|b| b[(m, m)]).collect();
            let off: Vec<f64> = (1..n).map(|f| -face(f)[(m, m)]).collect();
            let t = TridiagonalMatrix::new(off.clone(), d, off)?;
            let b: Vec<f64> = (0..n).map(|i| rhs[i * k + m]).collect();
            for (i, v) in solve_tridiagonal(&t, &b)?.into_iter().enumerate() {
                x[i * k + m] = v;
            }
        }
        return Ok(x);
    }

    let off: Vec<DMatrix<f64>> = (1..n).map(|f| -face(f)).collect();
    let inner = BlockTridiagonalMatrix::new(off.clone(), diag, off)?;
    if dense {
        let mut a = inner.to_dense();
        if bc.is_periodic() && n > 1 {
            let wrap = -&couplings[0];
            let mut bl = a.view_mut(((n - 1) * k, 0), (k, k));
            bl += &wrap;
            let mut tr = a.view_mut((0, (n - 1) * k), (k, k));
            tr += &wrap;
        }
        return a
            .lu()
            .solve(&dvec(&rhs))
            .map(|x| x.as_slice().to_vec())
            .ok_or(crate::Error::Singular { block: 0 });
    }
    if bc.is_periodic() {
        let wrap = -&couplings[0];
        PeriodicBlockTridiagonal {
            inner,
            top_right: wrap.clone(),
            bottom_left: wrap,
        }
        .solve(&rhs)
    } else {
        inner.factor()?.solve(&rhs)
    }
}

/// `M v` for a `k x k` matrix and a slice.
pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    out[..v.len()].fill(0.0);
    mat_vec_acc(m, v, 1.0, out);
}

pub(crate) fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
