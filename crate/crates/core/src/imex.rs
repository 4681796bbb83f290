//! Double Butcher tableaux for IMEX Runge-Kutta schemes of type A.

use crate::{Error, Result};

/// Paired explicit (`a_ex`, `b_ex`, `c_ex`) and implicit (`a_im`, `b_im`,
/// `c_im`) tableaux with `s` stages. Matrices are row-major `s x s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleTableau {
    pub name: String,
    pub s: usize,
    pub a_ex: Vec<Vec<f64>>,
    pub a_im: Vec<Vec<f64>>,
    pub b_ex: Vec<f64>,
    pub b_im: Vec<f64>,
    pub c_ex: Vec<f64>,
    pub c_im: Vec<f64>,
}

/// A broken tableau invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

type Q = (i64, i64);

struct Exact {
    a_ex: &'static [&'static [Q]],
    a_im: &'static [&'static [Q]],
    b_ex: &'static [Q],
    b_im: &'static [Q],
    c_ex: &'static [Q],
    c_im: &'static [Q],
}

const Z: Q = (0, 1);
const HALF: Q = (1, 2);
const THIRD: Q = (1, 3);
const QUARTER: Q = (1, 4);
const ONE: Q = (1, 1);

const SSP2_332: Exact = Exact {
    a_ex: &[&[Z, Z, Z], &[HALF, Z, Z], &[HALF, HALF, Z]],
    a_im: &[&[QUARTER, Z, Z], &[Z, QUARTER, Z], &[THIRD, THIRD, THIRD]],
    b_ex: &[THIRD, THIRD, THIRD],
    b_im: &[THIRD, THIRD, THIRD],
    c_ex: &[Z, HALF, ONE],
    c_im: &[QUARTER, QUARTER, ONE],
};

const BACKWARD_EULER_PAIR: Exact = Exact {
    a_ex: &[&[Z]],
    a_im: &[&[ONE]],
    b_ex: &[ONE],
    b_im: &[ONE],
    c_ex: &[Z],
    c_im: &[ONE],
};

const REGISTRY: &[(&str, Exact)] = &[
    ("SSP2-332", SSP2_332),
    ("backward-euler-pair", BACKWARD_EULER_PAIR),
];

fn render(q: &[Q]) -> Vec<f64> {
    q.iter().map(|&(n, d)| n as f64 / d as f64).collect()
}

/// Names accepted by [`tableau`].
pub fn registered() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

/// Looks up a registered tableau and validates it.
pub fn tableau(name: &str) -> Result<DoubleTableau> {
    let (_, e) = REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownTableau(name.to_string()))?;
    let t = DoubleTableau {
        name: name.to_string(),
        s: e.b_im.len(),
        a_ex: e.a_ex.iter().map(|r| render(r)).collect(),
        a_im: e.a_im.iter().map(|r| render(r)).collect(),
        b_ex: render(e.b_ex),
        b_im: render(e.b_im),
        c_ex: render(e.c_ex),
        c_im: render(e.c_im),
    };
    let v = validate(&t);
    if v.is_empty() {
        Ok(t)
    } else {
        Err(Error::InvalidTableau(v))
    }
}

const TOL: f64 = 1e-14;

fn violation(message: String) -> Violation {
    Violation { message }
}

/// Checks shapes, triangularity, type-A diagonals and abscissa consistency.
/// Stage indices in messages are 1-based.
pub fn validate(t: &DoubleTableau) -> Vec<Violation> {
    let mut out = Vec::new();
    let s = t.s;
    let square = |a: &Vec<Vec<f64>>| a.len() == s && a.iter().all(|r| r.len() == s);
    if !square(&t.a_ex) || !square(&t.a_im) {
        out.push(violation(format!("matrix shape is not {s}x{s}")));
        return out;
    }
    for (name, v) in [
        ("b_ex", &t.b_ex),
        ("b_im", &t.b_im),
        ("c_ex", &t.c_ex),
        ("c_im", &t.c_im),
    ] {
        if v.len() != s {
            out.push(violation(format!("{name} has length {} instead of {s}", v.len())));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..s {
        for j in i..s {
            if t.a_ex[i][j].abs() > TOL {
                out.push(violation(format!("explicit matrix not strictly lower triangular at ({}, {})", i + 1, j + 1)));
            }
        }
        for j in i + 1..s {
            if t.a_im[i][j].abs() > TOL {
                out.push(violation(format!("implicit matrix not lower triangular at ({}, {})", i + 1, j + 1)));
            }
        }
        if t.a_im[i][i].abs() <= TOL {
            out.push(violation(format!("type-A diagonal zero at stage {}", i + 1)));
        }
        let ce: f64 = t.a_ex[i][..i].iter().sum();
        if (ce - t.c_ex[i]).abs() > TOL {
            out.push(violation(format!("explicit abscissa mismatch at stage {}", i + 1)));
        }
        let ci: f64 = t.a_im[i][..=i].iter().sum();
        if (ci - t.c_im[i]).abs() > TOL {
            out.push(violation(format!("implicit abscissa mismatch at stage {}", i + 1)));
        }
    }
    out
}

impl DoubleTableau {
    /// `W = A_im^{-1}` by forward substitution; lower triangular.
    pub fn implicit_inverse(&self) -> Vec<Vec<f64>> {
        let s = self.s;
        let a = &self.a_im;
        let mut w = vec![vec![0.0; s]; s];
        for col in 0..s {
            for i in col..s {
                let rhs = if i == col { 1.0 } else { 0.0 };
                let acc: f64 = (col..i).map(|l| a[i][l] * w[l][col]).sum();
                w[i][col] = (rhs - acc) / a[i][i];
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ssp2_332_entries() {
        let t = tableau("SSP2-332").unwrap();
        assert_eq!(t.s, 3);
        assert_eq!(t.a_im[0][0], 0.25);
        let third = 1.0 / 3.0;
        assert_eq!(t.b_im, vec![third; 3]);
        assert_eq!(t.b_ex, t.b_im);
        assert_eq!(t.c_ex, vec![0.0, 0.5, 1.0]);
        assert_eq!(t.c_im, vec![0.25, 0.25, 1.0]);
        assert!((t.b_im.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn backward_euler_pair_is_valid() {
        let t = tableau("backward-euler-pair").unwrap();
        assert_eq!(t.s, 1);
        assert!(validate(&t).is_empty());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(tableau("rk4"), Err(Error::UnknownTableau(_))));
    }

    #[test]
    fn zero_diagonal_is_flagged() {
        let mut t = tableau("SSP2-332").unwrap();
        t.a_im[1][1] = 0.0;
        t.c_im[1] = 0.0;
        let v = validate(&t);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.starts_with("type-A diagonal zero at stage 2"));
    }

    #[test]
    fn abscissa_mismatch_is_flagged() {
        let mut t = tableau("SSP2-332").unwrap();
        t.c_ex[1] = 0.4;
        let v = validate(&t);
        assert!(v.iter().any(|v| v.message.starts_with("explicit abscissa mismatch")));
    }

    #[test]
    fn inverse_is_lower_triangular() {
        for name in registered() {
            let t = tableau(name).unwrap();
            let w = t.implicit_inverse();
            for i in 0..t.s {
                for j in 0..t.s {
                    if j > i {
                        assert_eq!(w[i][j], 0.0);
                    }
                    let prod: f64 = (0..t.s).map(|l| t.a_im[i][l] * w[l][j]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((prod - id).abs() < 1e-14);
                }
            }
        }
    }
}
