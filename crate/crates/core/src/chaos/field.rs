use std::fmt;
use std::sync::Arc;

use super::GpcBasis;
use crate::{Error, Result};

type Eval = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A coefficient `sigma(x, z)` that must stay above a positive floor.
#[derive(Clone)]
pub struct RandomField {
    eval: Arc<Eval>,
    label: String,
    floor: f64,
}

impl fmt::Debug for RandomField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RandomField")
            .field("label", &self.label)
            .field("floor", &self.floor)
            .finish()
    }
}

impl RandomField {
    pub fn new(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            label: label.into(),
            floor: 1e-12,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_, _| c)
    }

    /// `a + b z`.
    pub fn affine_z(a: f64, b: f64) -> Self {
        Self::new(format!("{a} + {b}*z"), move |_, z| a + b * z)
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    #[inline]
    pub fn at(&self, x: f64, z: f64) -> f64 {
        (self.eval)(x, z)
    }

    /// Values at every z-node of `basis` for a fixed `x`, checked against the floor.
    pub fn nodal(&self, basis: &GpcBasis, x: f64) -> Result<Vec<f64>> {
        basis
            .nodes()
            .iter()
            .map(|&z| {
                let v = self.at(x, z);
                if v >= self.floor && v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonPositiveField { x, z, value: v })
                }
            })
            .collect()
    }

    /// Checks positivity at every z-node for every position in `xs`.
    pub fn check_positive(&self, basis: &GpcBasis, xs: &[f64]) -> Result<()> {
        for &x in xs {
            self.nodal(basis, x)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{build_basis, Density};

    #[test]
    fn positivity_is_checked_at_nodes() {
        let b = build_basis(2, Density::Uniform, 6).unwrap();
        let ok = RandomField::affine_z(1.0, 0.5);
        assert!(ok.check_positive(&b, &[0.0, 0.5, 1.0]).is_ok());
        let bad = RandomField::new("x - 0.5", |x, _| x - 0.5);
        match bad.check_positive(&b, &[0.9, 0.25]) {
            Err(Error::NonPositiveField { x, .. }) => assert_eq!(x, 0.25),
            other => panic!("unexpected {other:?}"),
        }
    }
}
