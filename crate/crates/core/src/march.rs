//! Fixed-step time marching with exact landing on output times.

use crate::Result;

/// Whole steps of size `dt` that fit in `[0, t]`.
pub fn whole_steps(t: f64, dt: f64) -> usize {
    (t / dt + 1e-9).floor() as usize
}

/// Advances `state` on the uniform grid `n * dt`. Each output time `t` is
/// reached by a shortened step taken from a copy, so the main march is never
/// perturbed. `record` receives the landed state, `t`, and the number of whole
/// steps taken before it.
pub(crate) fn march<S: Clone>(
    mut state: S,
    dt: f64,
    times: &[f64],
    mut step: impl FnMut(&mut S, f64) -> Result<()>,
    mut record: impl FnMut(&S, f64, usize) -> Result<()>,
) -> Result<S> {
    let mut taken = 0usize;
    for &t in times {
        let target = whole_steps(t, dt);
        while taken < target {
            step(&mut state, dt)?;
            taken += 1;
        }
        let rest = t - taken as f64 * dt;
        if rest > 1e-9 * dt {
            let mut branch = state.clone();
            step(&mut branch, rest)?;
            record(&branch, t, taken)?;
        } else {
            record(&state, t, taken)?;
        }
    }
    Ok(state)
}
