use crate::exec::Execution;
use crate::numerics::QuadratureRule;
use crate::Result;

/// Mean and standard deviation fields at each output time.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationStats {
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

/// Stochastic collocation: runs the deterministic problem `solve(z)` at every
/// node of `zrule` (a rule on `[-1, 1]` for the uniform density, weights summing
/// to 2) and forms mean and standard deviation with the probability weights.
/// `solve` returns one field per output time; node runs share nothing mutable.
pub fn collocation_oracle<F>(zrule: &QuadratureRule, exec: Execution, solve: F) -> Result<CollocationStats>
where
    F: Fn(f64) -> Result<Vec<Vec<f64>>> + Sync + Send,
{
    let total: f64 = zrule.weights.iter().sum();
    let runs = exec.map(zrule.len(), |q| solve(zrule.nodes[q]));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let times = runs.first().map_or(0, Vec::len);
    let mut mean = Vec::with_capacity(times);
    let mut std = Vec::with_capacity(times);
    for t in 0..times {
        let len = runs[0][t].len();
        let mut m1 = vec![0.0; len];
        let mut m2 = vec![0.0; len];
        for (run, w) in runs.iter().zip(&zrule.weights) {
            let p = w / total;
            for (i, u) in run[t].iter().enumerate() {
                m1[i] += p * u;
                m2[i] += p * u * u;
            }
        }
        std.push(m1.iter().zip(&m2).map(|(a, b)| (b - a * a).max(0.0).sqrt()).collect());
        mean.push(m1);
    }
    Ok(CollocationStats { mean, std })
}
