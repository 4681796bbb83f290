use crate::numerics::minmod;

/// Limited slopes of the characteristic variables `r + j / sqrt(phi)` (`gamma`)
/// and `r - j / sqrt(phi)` (`beta`) on a padded `[cell][mode]` lane, divided by
/// `dx`. Entries for the first and last padded cell are set to zero.
pub fn slopes(
    r: &[f64],
    j: &[f64],
    k: usize,
    phi: f64,
    dx: f64,
    gamma: &mut [f64],
    beta: &mut [f64],
) {
    let cells = r.len() / k;
    let s = 1.0 / phi.sqrt();
    let inv = 1.0 / dx;
    for p in [0, cells - 1] {
        gamma[p * k..(p + 1) * k].fill(0.0);
        beta[p * k..(p + 1) * k].fill(0.0);
    }
    let mut prev: Vec<(f64, f64)> = (0..k)
        .map(|m| {
            let d_r = r[k + m] - r[m];
            let d_j = j[k + m] - j[m];
            (d_r + s * d_j, d_r - s * d_j)
        })
        .collect();
    for p in 1..cells - 1 {
        for m in 0..k {
            let d_r = r[(p + 1) * k + m] - r[p * k + m];
            let d_j = j[(p + 1) * k + m] - j[p * k + m];
            let fwd = (d_r + s * d_j, d_r - s * d_j);
            let back = prev[m];
            gamma[p * k + m] = minmod(fwd.0, back.0) * inv;
            beta[p * k + m] = minmod(fwd.1, back.1) * inv;
            prev[m] = fwd;
        }
    }
}
