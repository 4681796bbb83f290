use nalgebra::{DMatrix, DVector, LU, Dyn};

use super::tridiag::PIVOT_TOL;
use crate::{Error, Result};

/// Block tridiagonal matrix with uniform `k x k` blocks. Row-block `i` holds
/// `lower[i - 1]` (coupling to `x_{i-1}`), `diag[i]`, and `upper[i]` (coupling
/// to `x_{i+1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonalMatrix {
    k: usize,
    lower: Vec<DMatrix<f64>>,
    diag: Vec<DMatrix<f64>>,
    upper: Vec<DMatrix<f64>>,
}

impl BlockTridiagonalMatrix {
    pub fn new(
        lower: Vec<DMatrix<f64>>,
        diag: Vec<DMatrix<f64>>,
        upper: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty block matrix".into()));
        }
        for off in [&lower, &upper] {
            if off.len() != n - 1 {
                return Err(Error::LengthMismatch {
                    expected: n - 1,
                    got: off.len(),
                });
            }
        }
        let k = diag[0].nrows();
        for b in lower.iter().chain(&diag).chain(&upper) {
            if b.nrows() != k || b.ncols() != k {
                return Err(Error::InvalidArgument(format!(
                    "block of shape {}x{} in a matrix with {k}x{k} blocks",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self {
            k,
            lower,
            diag,
            upper,
        })
    }

    pub fn block_identity(n: usize, k: usize) -> Self {
        Self {
            k,
            lower: vec![DMatrix::zeros(k, k); n.saturating_sub(1)],
            diag: vec![DMatrix::identity(k, k); n],
            upper: vec![DMatrix::zeros(k, k); n.saturating_sub(1)],
        }
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[DMatrix<f64>] {
        &self.lower
    }

    pub fn diag(&self) -> &[DMatrix<f64>] {
        &self.diag
    }

    pub fn upper(&self) -> &[DMatrix<f64>] {
        &self.upper
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let (n, k) = (self.n_blocks(), self.k);
        let mut m = DMatrix::zeros(n * k, n * k);
        for i in 0..n {
            m.view_mut((i * k, i * k), (k, k)).copy_from(&self.diag[i]);
            if i + 1 < n {
                m.view_mut((i * k, (i + 1) * k), (k, k)).copy_from(&self.upper[i]);
                m.view_mut(((i + 1) * k, i * k), (k, k)).copy_from(&self.lower[i]);
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let (n, k) = (self.n_blocks(), self.k);
        let mut y = vec![0.0; n * k];
        let xb = |i: usize| DVector::from_column_slice(&x[i * k..(i + 1) * k]);
        for i in 0..n {
            let mut acc = &self.diag[i] * xb(i);
            if i > 0 {
                acc += &self.lower[i - 1] * xb(i - 1);
            }
            if i + 1 < n {
                acc += &self.upper[i] * xb(i + 1);
            }
            y[i * k..(i + 1) * k].copy_from_slice(acc.as_slice());
        }
        y
    }

    /// Block Thomas forward elimination. The factors are only valid for this
    /// matrix; callers refactor whenever the blocks change.
    pub fn factor(&self) -> Result<BlockThomas<'_>> {
        let n = self.n_blocks();
        let mut pivots = Vec::with_capacity(n);
        let mut c_prime: Vec<DMatrix<f64>> = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let d = if i == 0 {
                self.diag[0].clone()
            } else {
                &self.diag[i] - &self.lower[i - 1] * &c_prime[i - 1]
            };
            let lu = checked_lu(d, i)?;
            if i + 1 < n {
                c_prime.push(lu.solve(&self.upper[i]).ok_or(Error::Singular { block: i })?);
            }
            pivots.push(lu);
        }
        Ok(BlockThomas {
            matrix: self,
            pivots,
            c_prime,
        })
    }
}

fn checked_lu(d: DMatrix<f64>, block: usize) -> Result<LU<f64, Dyn, Dyn>> {
    let norm = d
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let lu = d.lu();
    let u = lu.u();
    let smallest = (0..u.nrows()).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(smallest > PIVOT_TOL * norm) {
        return Err(Error::Singular { block });
    }
    Ok(lu)
}

/// Factored block tridiagonal system; solves any number of right-hand sides.
pub struct BlockThomas<'a> {
    matrix: &'a BlockTridiagonalMatrix,
    pivots: Vec<LU<f64, Dyn, Dyn>>,
    c_prime: Vec<DMatrix<f64>>,
}

impl BlockThomas<'_> {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.matrix;
        let (n, k) = (m.n_blocks(), m.k);
        if rhs.len() != n * k {
            return Err(Error::LengthMismatch {
                expected: n * k,
                got: rhs.len(),
            });
        }
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut b = DVector::from_column_slice(&rhs[i * k..(i + 1) * k]);
            if i > 0 {
                b -= &m.lower[i - 1] * &y[i - 1];
            }
            y.push(self.pivots[i].solve(&b).ok_or(Error::Singular { block: i })?);
        }
        for i in (0..n - 1).rev() {
            let next = y[i + 1].clone();
            y[i] -= &self.c_prime[i] * next;
        }
        Ok(y.iter().flat_map(|v| v.iter().copied()).collect())
    }

    /// Solves for a block of `k`-column right-hand sides given per row-block.
    fn solve_columns(&self, rhs: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
        let m = self.matrix;
        let n = m.n_blocks();
        let mut y: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut b = rhs[i].clone();
            if i > 0 {
                b -= &m.lower[i - 1] * &y[i - 1];
            }
            y.push(self.pivots[i].solve(&b).ok_or(Error::Singular { block: i })?);
        }
        for i in (0..n - 1).rev() {
            let next = y[i + 1].clone();
            y[i] -= &self.c_prime[i] * next;
        }
        Ok(y)
    }
}

/// Solves `M x = rhs` for a block tridiagonal `M` and a stacked right-hand side.
pub fn solve_block_tridiagonal(m: &BlockTridiagonalMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    m.factor()?.solve(rhs)
}

/// Block tridiagonal matrix with the two corner blocks of a periodic stencil:
/// `top_right` couples row-block 0 to the last unknown, `bottom_left` couples
/// the last row-block to the first unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicBlockTridiagonal {
    pub inner: BlockTridiagonalMatrix,
    pub top_right: DMatrix<f64>,
    pub bottom_left: DMatrix<f64>,
}

impl PeriodicBlockTridiagonal {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let (n, k) = (self.inner.n_blocks(), self.inner.k);
        let mut m = self.inner.to_dense();
        if n == 1 {
            let mut b = m.view_mut((0, 0), (k, k));
            b += &self.top_right + &self.bottom_left;
            return m;
        }
        let mut tr = m.view_mut((0, (n - 1) * k), (k, k));
        tr += &self.top_right;
        let mut bl = m.view_mut(((n - 1) * k, 0), (k, k));
        bl += &self.bottom_left;
        m
    }

    /// Bordered elimination: the leading `n - 1` row-blocks form a plain block
    /// tridiagonal system, the last unknown is recovered from a `k x k` Schur
    /// complement.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let (n, k) = (self.inner.n_blocks(), self.inner.k);
        if rhs.len() != n * k {
            return Err(Error::LengthMismatch {
                expected: n * k,
                got: rhs.len(),
            });
        }
        if n < 3 {
            let lu = self.to_dense().lu();
            return lu
                .solve(&DVector::from_column_slice(rhs))
                .map(|v| v.as_slice().to_vec())
                .ok_or(Error::Singular { block: 0 });
        }
        let head = BlockTridiagonalMatrix {
            k,
            lower: self.inner.lower[..n - 2].to_vec(),
            diag: self.inner.diag[..n - 1].to_vec(),
            upper: self.inner.upper[..n - 2].to_vec(),
        };
        let fac = head.factor()?;
        let y = fac.solve(&rhs[..(n - 1) * k])?;
        let mut cols = vec![DMatrix::zeros(k, k); n - 1];
        cols[0] += &self.top_right;
        cols[n - 2] += &self.inner.upper[n - 2];
        let z = fac.solve_columns(&cols)?;

        let last_lower = &self.inner.lower[n - 2];
        let schur = &self.inner.diag[n - 1] - last_lower * &z[n - 2] - &self.bottom_left * &z[0];
        let yb = |i: usize| DVector::from_column_slice(&y[i * k..(i + 1) * k]);
        let b_last = DVector::from_column_slice(&rhs[(n - 1) * k..])
            - last_lower * yb(n - 2)
            - &self.bottom_left * yb(0);
        let x_last = checked_lu(schur, n - 1)?
            .solve(&b_last)
            .ok_or(Error::Singular { block: n - 1 })?;

        let mut x = Vec::with_capacity(n * k);
        for i in 0..n - 1 {
            let xi = yb(i) - &z[i] * &x_last;
            x.extend(xi.iter());
        }
        x.extend(x_last.iter());
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{solve_tridiagonal, TridiagonalMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_block(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> DMatrix<f64> {
        DMatrix::from_fn(k, k, |_, _| rng.random_range(-scale..scale))
    }

    /// Diagonal blocks are made strictly dominant over everything else in their rows.
    fn random_system(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BlockTridiagonalMatrix {
        let lower: Vec<_> = (0..n - 1).map(|_| random_block(rng, k, 1.0)).collect();
        let upper: Vec<_> = (0..n - 1).map(|_| random_block(rng, k, 1.0)).collect();
        let diag = (0..n)
            .map(|_| {
                let mut d = random_block(rng, k, 1.0);
                for r in 0..k {
                    let off: f64 = (0..k).filter(|&c| c != r).map(|c| d[(r, c)].abs()).sum();
                    d[(r, r)] = off + 2.0 * k as f64 + rng.random_range(0.1..1.0);
                }
                d
            })
            .collect();
        BlockTridiagonalMatrix::new(lower, diag, upper).unwrap()
    }

    fn dense_solve(m: &DMatrix<f64>, rhs: &[f64]) -> Vec<f64> {
        m.clone().lu().solve(&DVector::from_column_slice(rhs)).unwrap().as_slice().to_vec()
    }

    fn max_rel(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
    }

    #[test]
    fn scalar_blocks_match_thomas() {
        let sub = vec![0.3, -0.2, 0.5];
        let diag = vec![2.0, 3.0, -2.5, 4.0];
        let sup = vec![1.0, 0.7, -0.4];
        let t = TridiagonalMatrix::new(sub.clone(), diag.clone(), sup.clone()).unwrap();
        let one = |v: f64| DMatrix::from_element(1, 1, v);
        let m = BlockTridiagonalMatrix::new(
            sub.iter().map(|&v| one(v)).collect(),
            diag.iter().map(|&v| one(v)).collect(),
            sup.iter().map(|&v| one(v)).collect(),
        )
        .unwrap();
        let rhs = [1.0, -2.0, 0.5, 3.0];
        assert_eq!(
            solve_tridiagonal(&t, &rhs).unwrap(),
            solve_block_tridiagonal(&m, &rhs).unwrap()
        );
    }

    #[test]
    fn block_identity_returns_rhs() {
        let m = BlockTridiagonalMatrix::block_identity(4, 3);
        let rhs: Vec<f64> = (0..12).map(|i| i as f64 - 3.5).collect();
        assert_eq!(solve_block_tridiagonal(&m, &rhs).unwrap(), rhs);
    }

    #[test]
    fn small_assembled_system_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_system(&mut rng, 4, 2);
        let rhs: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = solve_block_tridiagonal(&m, &rhs).unwrap();
        assert!(max_rel(&x, &dense_solve(&m.to_dense(), &rhs)) <= 1e-10);
    }

    #[test]
    fn random_systems_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..25);
            let k = rng.random_range(1..6);
            let m = random_system(&mut rng, n, k);
            let rhs: Vec<f64> = (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = solve_block_tridiagonal(&m, &rhs).unwrap();
            assert!(max_rel(&x, &dense_solve(&m.to_dense(), &rhs)) <= 1e-9);
            let res = m.mul_vec(&x);
            assert!(max_rel(&res, &rhs) <= 1e-9);
        }
    }

    #[test]
    fn periodic_systems_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(1..20);
            let k = rng.random_range(1..5);
            let inner = random_system(&mut rng, n, k);
            let p = PeriodicBlockTridiagonal {
                inner,
                top_right: random_block(&mut rng, k, 1.0),
                bottom_left: random_block(&mut rng, k, 1.0),
            };
            let rhs: Vec<f64> = (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = p.solve(&rhs).unwrap();
            assert!(max_rel(&x, &dense_solve(&p.to_dense(), &rhs)) <= 1e-9, "n={n} k={k}");
        }
    }

    #[test]
    fn singular_block_is_reported() {
        let z = DMatrix::zeros(2, 2);
        let m = BlockTridiagonalMatrix::new(
            vec![z.clone()],
            vec![DMatrix::identity(2, 2), z.clone()],
            vec![z],
        )
        .unwrap();
        assert!(matches!(
            solve_block_tridiagonal(&m, &[1.0; 4]),
            Err(Error::Singular { block: 1 })
        ));
    }

    #[test]
    fn rejects_ragged_blocks() {
        let r = BlockTridiagonalMatrix::new(
            vec![DMatrix::zeros(2, 2)],
            vec![DMatrix::identity(2, 2), DMatrix::identity(3, 3)],
            vec![DMatrix::zeros(2, 2)],
        );
        assert!(r.is_err());
    }
}
