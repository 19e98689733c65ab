use crate::exec::{try_map_indexed, Execution};
use crate::pde::SolutionMap;
use crate::rng::stream;
use crate::Result;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRatio {
    pub param_distance: f64,
    pub solution_distance: f64,
    /// `solution_distance / param_distance^α`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub model: String,
    pub pairs: usize,
    /// Pairs with zero parameter distance.
    pub skipped: usize,
    pub max_ratio: f64,
    pub constant: f64,
    pub exponent: f64,
    /// `constant / max_ratio`
    pub margin: f64,
    pub tol: f64,
    pub violated: bool,
    pub ratios: Vec<PairRatio>,
}

/// Ratios on `count` pairs drawn independently from the model's sampler;
/// pair `k` uses stream `k` of `seed`.
pub fn empirical_lipschitz(model: &dyn SolutionMap, count: usize, seed: u64, exec: Execution, tol: f64) -> Result<LipschitzReport> {
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..count)
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            (model.sample(&mut rng), model.sample(&mut rng))
        })
        .collect();
    empirical_lipschitz_pairs(model, &pairs, exec, tol)
}

pub fn empirical_lipschitz_pairs(model: &dyn SolutionMap, pairs: &[(Vec<f64>, Vec<f64>)], exec: Execution, tol: f64) -> Result<LipschitzReport> {
    let alpha = model.holder_exponent();
    let raw = try_map_indexed(exec, pairs.len(), |k| -> Result<Option<PairRatio>> {
        let (x, y) = &pairs[k];
        let d = model.param_distance(x, y);
        if d <= 0.0 {
            return Ok(None);
        }
        let s = model.distance(&model.solve(x)?, &model.solve(y)?)?;
        Ok(Some(PairRatio { param_distance: d, solution_distance: s, ratio: s / d.powf(alpha) }))
    })?;
    let skipped = raw.iter().filter(|r| r.is_none()).count();
    let ratios: Vec<PairRatio> = raw.into_iter().flatten().collect();
    let max_ratio = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let constant = model.lipschitz();
    Ok(LipschitzReport {
        model: model.name().to_string(),
        pairs: pairs.len(),
        skipped,
        max_ratio,
        constant,
        exponent: alpha,
        margin: if max_ratio > 0.0 { constant / max_ratio } else { f64::INFINITY },
        tol,
        violated: max_ratio > constant * (1.0 + tol),
        ratios,
    })
}
