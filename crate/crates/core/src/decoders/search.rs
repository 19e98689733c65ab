use super::{Decoded, Decoder};
use crate::exec::{map_indexed, Execution};
use crate::params::ConvexSet;
use crate::rng::stream;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub const HEURISTIC_SEMANTICS: &str = "upper bound of inf, lower bound of sup: heuristic estimate";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub iterations: usize,
    /// Initial simplex edge, and forward-difference step scale.
    pub step: f64,
    /// Stop a sample once its objective falls below this.
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { starts: 8, iterations: 200, step: 0.1, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    LevenbergMarquardt,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleTrace {
    pub best: f64,
    pub argmin: Vec<f64>,
    pub method: SearchMethod,
    /// Best value after each iteration, all starts concatenated.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Budget used up before reaching `tol`.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthEstimate {
    pub value: f64,
    pub argmax: usize,
    pub samples: Vec<SampleTrace>,
    pub semantics: &'static str,
}

struct Objective<'a> {
    decoder: &'a Decoder,
    truth: &'a Decoded,
    truth_coords: Option<Vec<f64>>,
    evaluations: usize,
}

impl Objective<'_> {
    fn value(&mut self, z: &[f64]) -> f64 {
        self.evaluations += 1;
        self.decoder.decode(z).and_then(|d| self.decoder.distance(self.truth, &d)).unwrap_or(f64::INFINITY)
    }

    fn residual(&mut self, z: &[f64]) -> Option<DVector<f64>> {
        self.evaluations += 1;
        let t = self.truth_coords.as_ref()?;
        let c = self.decoder.decode(z).ok().and_then(|d| self.decoder.coordinates(&d)?.ok())?;
        (c.len() == t.len()).then(|| DVector::from_iterator(c.len(), c.iter().zip(t).map(|(a, b)| a - b)))
    }
}

fn project(ball: &ConvexSet, z: &[f64]) -> Vec<f64> {
    ball.project(z)
}

fn levenberg_marquardt(obj: &mut Objective, ball: &ConvexSet, z0: Vec<f64>, cfg: &SearchConfig, trace: &mut Vec<f64>) -> (f64, Vec<f64>) {
    let n = z0.len();
    let mut z = z0;
    let Some(mut r) = obj.residual(&z) else { return (f64::INFINITY, z) };
    let mut f = r.norm();
    let mut mu = 1e-3;
    let h = (cfg.step * 1e-5).max(1e-9);
    for _ in 0..cfg.iterations {
        if f <= cfg.tol {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for j in 0..n {
            let mut zp = z.clone();
            zp[j] += h;
            match obj.residual(&zp) {
                Some(rp) => jac.set_column(j, &((rp - &r) / h)),
                None => return (f, z),
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut accepted = false;
        while mu < 1e12 {
            let lhs = &jtj + DMatrix::identity(n, n) * mu * (1.0 + jtj.diagonal().max());
            let Some(delta) = lhs.cholesky().map(|c| c.solve(&(-&jtr))) else {
                mu *= 4.0;
                continue;
            };
            let trial = project(ball, &z.iter().zip(delta.iter()).map(|(a, b)| a + b).collect::<Vec<_>>());
            match obj.residual(&trial) {
                Some(rt) if rt.norm() < f => {
                    z = trial;
                    r = rt;
                    f = r.norm();
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => mu *= 4.0,
            }
        }
        trace.push(f);
        if !accepted {
            break;
        }
    }
    (f, z)
}

fn nelder_mead(obj: &mut Objective, ball: &ConvexSet, z0: Vec<f64>, cfg: &SearchConfig, trace: &mut Vec<f64>) -> (f64, Vec<f64>) {
    let n = z0.len();
    let mut simplex: Vec<Vec<f64>> = vec![project(ball, &z0)];
    for i in 0..n {
        let mut v = z0.clone();
        v[i] += cfg.step;
        simplex.push(project(ball, &v));
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| obj.value(v)).collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..cfg.iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|a, b| vals[*a].total_cmp(&vals[*b]).then(a.cmp(b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);
        if vals[0] <= cfg.tol || (vals[n] - vals[0]).abs() <= 1e-15 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let refl = project(ball, &lerp(&centroid, &simplex[n], -1.0));
        let fr = obj.value(&refl);
        if fr < vals[0] {
            let exp = project(ball, &lerp(&centroid, &simplex[n], -2.0));
            let fe = obj.value(&exp);
            if fe < fr {
                (simplex[n], vals[n]) = (exp, fe);
            } else {
                (simplex[n], vals[n]) = (refl, fr);
            }
        } else if fr < vals[n - 1] {
            (simplex[n], vals[n]) = (refl, fr);
        } else {
            let con = project(ball, &lerp(&centroid, &simplex[n], 0.5));
            let fc = obj.value(&con);
            if fc < vals[n] {
                (simplex[n], vals[n]) = (con, fc);
            } else {
                for i in 1..=n {
                    simplex[i] = project(ball, &lerp(&simplex[0], &simplex[i], 0.5));
                    vals[i] = obj.value(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|a, b| vals[*a].total_cmp(&vals[*b])).unwrap();
    (vals[best], simplex[best].clone())
}

/// For each target, a multi-start projected local search over the latent
/// unit ball for `min_z ‖u − D(z)‖`; the estimate is the max over targets.
/// Levenberg–Marquardt is used when the decoder exposes isometric
/// coordinates, Nelder–Mead otherwise.
pub fn estimate_decoder_width(decoder: &Decoder, targets: &[Decoded], cfg: &SearchConfig, seed: u64, exec: Execution) -> WidthEstimate {
    let n = decoder.latent_dim();
    let ball = ConvexSet::unit_ball(n);
    let samples = map_indexed(exec, targets.len(), |k| {
        let truth = &targets[k];
        let truth_coords = decoder.coordinates(truth).and_then(|c| c.ok());
        let method = if truth_coords.is_some() && n > 0 { SearchMethod::LevenbergMarquardt } else { SearchMethod::NelderMead };
        let mut obj = Objective { decoder, truth, truth_coords, evaluations: 0 };
        let mut best = (f64::INFINITY, vec![0.0; n]);
        let mut trace = Vec::new();
        if n == 0 {
            best = (obj.value(&[]), Vec::new());
        }
        for s in 0..cfg.starts.max(1) {
            if n == 0 || best.0 <= cfg.tol {
                break;
            }
            let z0 = if s == 0 { vec![0.0; n] } else { ball.sample_one(&mut stream(seed, (k * cfg.starts + s) as u64)) };
            let found = match method {
                SearchMethod::LevenbergMarquardt => levenberg_marquardt(&mut obj, &ball, z0, cfg, &mut trace),
                SearchMethod::NelderMead => nelder_mead(&mut obj, &ball, z0, cfg, &mut trace),
            };
            if found.0 < best.0 {
                best = found;
            }
        }
        SampleTrace { best: best.0, argmin: best.1, method, trace, evaluations: obj.evaluations, exhausted: best.0 > cfg.tol }
    });
    let (argmax, value) = samples.iter().enumerate().fold((0, 0.0), |b, (i, s)| if s.best > b.1 { (i, s.best) } else { b });
    WidthEstimate { value, argmax, samples, semantics: HEURISTIC_SEMANTICS }
}

#[cfg(test)]
mod tests {
    use super::super::{circle_decoder, compose, Stage, TargetSpace};
    use super::*;

    #[test]
    fn constant_decoder_distance() {
        let d = compose(1, vec![Stage::Constant(vec![0.0, 0.0])], TargetSpace::Param).unwrap();
        assert_eq!(d.lipschitz_bound(), 0.0);
        let targets = [Decoded::Point(vec![3.0, 4.0]), Decoded::Point(vec![1.0, 0.0])];
        let e = estimate_decoder_width(&d, &targets, &SearchConfig::default(), 1, Execution::Sequential);
        assert!((e.value - 5.0).abs() < 1e-15);
        assert_eq!(e.argmax, 0);
    }

    #[test]
    fn circle_points_are_found_and_repeat() {
        let d = circle_decoder();
        let targets: Vec<Decoded> = (0..5).map(|i| Decoded::Point(vec![(i as f64).cos(), (i as f64).sin()])).collect();
        let cfg = SearchConfig { tol: 1e-10, ..SearchConfig::default() };
        let a = estimate_decoder_width(&d, &targets, &cfg, 3, Execution::Parallel);
        let b = estimate_decoder_width(&d, &targets, &cfg, 3, Execution::Sequential);
        assert!(a.value < 1e-8, "{}", a.value);
        assert_eq!(a, b);
    }
}
