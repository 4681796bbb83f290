/// The minmod limiter: the argument of smaller magnitude when both have the
/// same sign, zero otherwise.
#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(-3.0, -2.0), -2.0);
        assert_eq!(minmod(0.0, 5.0), 0.0);
    }

    proptest! {
        #[test]
        fn symmetric_bounded_homogeneous(a in -1e3..1e3f64, b in -1e3..1e3f64, lam in 1e-3..1e3f64) {
            let m = minmod(a, b);
            prop_assert_eq!(m, minmod(b, a));
            prop_assert!(m.abs() <= a.abs().min(b.abs()));
            let scaled = minmod(lam * a, lam * b);
            prop_assert!((scaled - lam * m).abs() <= 1e-12 * (1.0 + scaled.abs()));
        }
    }
}
