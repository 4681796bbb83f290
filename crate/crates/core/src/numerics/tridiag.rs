use crate::{Error, Result};

/// Relative pivot size below which a Thomas sweep reports a singular system.
pub(crate) const PIVOT_TOL: f64 = 1e-14;

/// A scalar tridiagonal matrix: `sub[i]` sits at `(i + 1, i)`, `sup[i]` at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        for off in [&sub, &sup] {
            if off.len() != n - 1 {
                return Err(Error::LengthMismatch {
                    expected: n - 1,
                    got: off.len(),
                });
            }
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![1.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Thomas algorithm without pivoting.
pub fn solve_tridiagonal(t: &TridiagonalMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = t.n();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let lower = if i > 0 { t.sub[i - 1] } else { 0.0 };
        let upper = if i + 1 < n { t.sup[i] } else { 0.0 };
        let row_norm = lower.abs() + t.diag[i].abs() + upper.abs();
        let (c_prev, d_prev) = if i > 0 { (c[i - 1], d[i - 1]) } else { (0.0, 0.0) };
        let pivot = t.diag[i] - lower * c_prev;
        if !(pivot.abs() > PIVOT_TOL * row_norm) {
            return Err(Error::Singular { block: i });
        }
        c[i] = upper / pivot;
        d[i] = (rhs[i] - lower * d_prev) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
