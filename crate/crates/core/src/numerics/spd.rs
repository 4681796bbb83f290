use nalgebra::DMatrix;

use crate::{Error, Result};

/// True iff `a` is symmetric to `tol` and its Cholesky pivots are all positive.
pub fn is_spd(a: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NonSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Ok(false);
            }
        }
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let pivot = a[(j, j)] - (0..j).map(|p| l[(j, p)] * l[(j, p)]).sum::<f64>();
        if !(pivot > 0.0) {
            return Ok(false);
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|p| l[(i, p)] * l[(j, p)]).sum::<f64>();
            l[(i, j)] = s / d;
        }
    }
    Ok(true)
}

/// Gershgorin test: every diagonal entry exceeds the absolute row sum of the
/// off-diagonal entries. Sufficient for positive definiteness of a symmetric
/// matrix.
pub fn gershgorin_positive(a: &DMatrix<f64>) -> bool {
    (0..a.nrows()).all(|r| {
        let off: f64 = (0..a.ncols())
            .filter(|&c| c != r)
            .map(|c| a[(r, c)].abs())
            .sum();
        a[(r, r)] > off
    })
}
