use crate::rng::Rng;
use crate::{Error, Result};
use rand::Rng as _;
use rand_distr::StandardNormal;

/// Closed convex parameter sets with a Euclidean metric projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// `Σ z_k² / w_k ≤ ρ²`
    WeightedEllipsoid { weights: Vec<f64>, radius: f64 },
    Product(Vec<ConvexSet>),
    /// Points of `inner` whose coordinates beyond `active` vanish.
    Truncation { inner: Box<ConvexSet>, active: usize },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

impl ConvexSet {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(invalid("box requires lo <= hi in every coordinate"));
        }
        Ok(ConvexSet::Box { lo, hi })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        ConvexSet::Ball { center: vec![0.0; dim], radius: 1.0 }
    }

    pub fn ellipsoid(weights: Vec<f64>, radius: f64) -> Result<Self> {
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("ellipsoid weights must be strictly positive"));
        }
        if weights.windows(2).any(|p| p[1] > p[0]) {
            return Err(invalid("ellipsoid weights must be non-increasing"));
        }
        if !(radius > 0.0) {
            return Err(invalid("ellipsoid radius must be positive"));
        }
        Ok(ConvexSet::WeightedEllipsoid { weights, radius })
    }

    pub fn product(factors: Vec<ConvexSet>) -> Self {
        ConvexSet::Product(factors)
    }

    pub fn truncation(inner: ConvexSet, active: usize) -> Result<Self> {
        if active > inner.dim() {
            return Err(invalid(format!("active dims {active} exceed set dimension {}", inner.dim())));
        }
        inner.restrict(active)?;
        Ok(ConvexSet::Truncation { inner: Box::new(inner), active })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::WeightedEllipsoid { weights, .. } => weights.len(),
            ConvexSet::Product(f) => f.iter().map(ConvexSet::dim).sum(),
            ConvexSet::Truncation { inner, .. } => inner.dim(),
        }
    }

    /// The slice `{z ∈ self : z_k = 0 for k ≥ active}` as a set in `ℝ^active`.
    fn restrict(&self, active: usize) -> Result<ConvexSet> {
        Ok(match self {
            ConvexSet::Box { lo, hi } => {
                if lo[active..].iter().zip(&hi[active..]).any(|(a, b)| *a > 0.0 || *b < 0.0) {
                    return Err(invalid("truncated box does not contain zero in the dropped coordinates"));
                }
                ConvexSet::Box { lo: lo[..active].to_vec(), hi: hi[..active].to_vec() }
            }
            ConvexSet::Ball { center, radius } => {
                let tail: f64 = center[active..].iter().map(|c| c * c).sum();
                if tail >= radius * radius {
                    return Err(invalid("truncated ball is empty"));
                }
                ConvexSet::Ball { center: center[..active].to_vec(), radius: (radius * radius - tail).sqrt() }
            }
            ConvexSet::WeightedEllipsoid { weights, radius } => {
                ConvexSet::WeightedEllipsoid { weights: weights[..active].to_vec(), radius: *radius }
            }
            ConvexSet::Product(factors) => {
                let mut left = active;
                let mut out = Vec::new();
                for f in factors {
                    let d = f.dim();
                    let take = left.min(d);
                    left -= take;
                    if take == d {
                        out.push(f.clone());
                    } else {
                        out.push(f.restrict(take)?);
                    }
                }
                ConvexSet::Product(out)
            }
            ConvexSet::Truncation { inner, active: a } => {
                let r = inner.restrict(*a.min(&active))?;
                if active > *a {
                    let keep = *a;
                    let pad = active - keep;
                    ConvexSet::Product(vec![r, ConvexSet::Box { lo: vec![0.0; pad], hi: vec![0.0; pad] }])
                } else {
                    r
                }
            }
        })
    }

    /// Nearest point in the Euclidean norm.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim(), "projection dimension mismatch");
        match self {
            ConvexSet::Box { lo, hi } => y.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| v.clamp(*a, *b)).collect(),
            ConvexSet::Ball { center, radius } => {
                let d: f64 = y.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                if d <= *radius {
                    y.to_vec()
                } else {
                    let s = radius / d;
                    y.iter().zip(center).map(|(a, c)| c + s * (a - c)).collect()
                }
            }
            ConvexSet::WeightedEllipsoid { weights, radius } => project_ellipsoid(weights, *radius, y),
            ConvexSet::Product(factors) => {
                let mut out = Vec::with_capacity(y.len());
                let mut at = 0;
                for f in factors {
                    let d = f.dim();
                    out.extend(f.project(&y[at..at + d]));
                    at += d;
                }
                out
            }
            ConvexSet::Truncation { inner, active } => {
                let slice = inner.restrict(*active).expect("validated at construction");
                let mut out = slice.project(&y[..*active]);
                out.resize(y.len(), 0.0);
                out
            }
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.dim() {
            return false;
        }
        match self {
            ConvexSet::Box { lo, hi } => y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= a - tol && *v <= b + tol),
            ConvexSet::Ball { center, radius } => {
                y.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt() <= radius + tol
            }
            ConvexSet::WeightedEllipsoid { weights, radius } => {
                y.iter().zip(weights).map(|(z, w)| z * z / w).sum::<f64>().sqrt() <= radius + tol
            }
            ConvexSet::Product(factors) => {
                let mut at = 0;
                factors.iter().all(|f| {
                    let d = f.dim();
                    let ok = f.contains(&y[at..at + d], tol);
                    at += d;
                    ok
                })
            }
            ConvexSet::Truncation { inner, active } => {
                y[*active..].iter().all(|v| v.abs() <= tol) && inner.contains(y, tol)
            }
        }
    }

    pub fn sample_one(&self, rng: &mut Rng) -> Vec<f64> {
        match self {
            ConvexSet::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(a, b)| if a == b { *a } else { rng.random_range(*a..=*b) }).collect()
            }
            ConvexSet::Ball { center, radius } => {
                let u = unit_ball_point(center.len(), rng);
                u.iter().zip(center).map(|(x, c)| c + radius * x).collect()
            }
            ConvexSet::WeightedEllipsoid { weights, radius } => {
                let u = unit_ball_point(weights.len(), rng);
                u.iter().zip(weights).map(|(x, w)| radius * w.sqrt() * x).collect()
            }
            ConvexSet::Product(factors) => factors.iter().flat_map(|f| f.sample_one(rng)).collect(),
            ConvexSet::Truncation { inner, active } => {
                let slice = inner.restrict(*active).expect("validated at construction");
                let mut out = slice.sample_one(rng);
                out.resize(inner.dim(), 0.0);
                out
            }
        }
    }

    /// `count` points; point `i` is drawn from stream `i` of `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..count).map(|i| self.sample_one(&mut crate::rng::stream(seed, i as u64))).collect()
    }

    /// Largest Euclidean norm of a point in the set (used for `Z_B` checks).
    pub fn max_norm(&self) -> f64 {
        match self {
            ConvexSet::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt(),
            ConvexSet::Ball { center, radius } => center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius,
            ConvexSet::WeightedEllipsoid { weights, radius } => radius * weights.iter().cloned().fold(0.0, f64::max).sqrt(),
            ConvexSet::Product(f) => f.iter().map(|s| s.max_norm().powi(2)).sum::<f64>().sqrt(),
            ConvexSet::Truncation { inner, active } => inner.restrict(*active).map(|s| s.max_norm()).unwrap_or(0.0),
        }
    }
}

fn unit_ball_point(dim: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            let r: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
            return g.into_iter().map(|x| r * x / n).collect();
        }
    }
}

/// `z_k = y_k / (1 + μ/w_k)` with the multiplier `μ ≥ 0` solving
/// `Σ z_k²/w_k = ρ²`, by Newton safeguarded with bisection.
fn project_ellipsoid(w: &[f64], rho: f64, y: &[f64]) -> Vec<f64> {
    let level = |mu: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut dg = 0.0;
        for (yk, wk) in y.iter().zip(w) {
            let d = wk + mu;
            g += wk * yk * yk / (d * d);
            dg -= 2.0 * wk * yk * yk / (d * d * d);
        }
        (g - rho * rho, dg)
    };
    if level(0.0).0 <= 0.0 {
        return y.to_vec();
    }
    let mut lo = 0.0;
    let mut hi = y.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt() / rho;
    let mut mu = 0.0;
    for _ in 0..200 {
        let (g, dg) = level(mu);
        if g > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let newton = mu - g / dg;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - mu).abs() <= 1e-15 * next.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
            mu = next;
            break;
        }
        mu = next;
    }
    y.iter().zip(w).map(|(yk, wk)| yk * wk / (wk + mu)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_radial_scaling() {
        let b = ConvexSet::unit_ball(2);
        let p = b.project(&[3.0, 4.0]);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn box_interior_is_fixed() {
        let b = ConvexSet::cube(9, -1.0 / 3.0, 1.0 / 3.0).unwrap();
        let y: Vec<f64> = (0..9).map(|i| (i as f64 - 4.0) / 20.0).collect();
        assert_eq!(b.project(&y), y);
    }

    #[test]
    fn ellipsoid_against_grid_search() {
        // weights (1, 1/4): z₁² + 4 z₂² = 1, parametrized (cos t, sin t / 2)
        let e = ConvexSet::ellipsoid(vec![1.0, 0.25], 1.0).unwrap();
        let y = [1.0, 1.0];
        let dist = |t: f64| ((t.cos() - y[0]).powi(2) + (0.5 * t.sin() - y[1]).powi(2)).sqrt();
        let n = 200_000;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            if dist(t) < best.1 {
                best = (t, dist(t));
            }
        }
        // refine by bisection on the derivative of the squared distance
        let deriv = |t: f64| -2.0 * (t.cos() - y[0]) * t.sin() + (0.5 * t.sin() - y[1]) * t.cos();
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let (mut a, mut b) = (best.0 - h, best.0 + h);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if deriv(a) * deriv(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let t = 0.5 * (a + b);
        let oracle = [t.cos(), 0.5 * t.sin()];
        let p = e.project(&y);
        assert!((p[0] - oracle[0]).abs() < 1e-9 && (p[1] - oracle[1]).abs() < 1e-9, "{p:?} vs {oracle:?}");
    }

    #[test]
    fn contains_edges() {
        let b = ConvexSet::unit_ball(3);
        assert!(b.contains(&[0.0, 0.0, 0.0], 0.0));
        let tol = 1e-9;
        assert!(b.contains(&[1.0 + tol / 2.0, 0.0, 0.0], tol));
        let bx = ConvexSet::cube(2, -1.0, 1.0).unwrap();
        assert!(!bx.contains(&[1.0 + 2.0 * tol, 1.0 + 2.0 * tol], tol));
    }

    #[test]
    fn sampling_is_reproducible_and_inside() {
        let sets = [
            ConvexSet::cube(3, -1.0, 2.0).unwrap(),
            ConvexSet::ball(vec![1.0, -1.0], 0.5).unwrap(),
            ConvexSet::ellipsoid(vec![1.0, 0.5, 0.1], 2.0).unwrap(),
            ConvexSet::product(vec![ConvexSet::unit_ball(2), ConvexSet::cube(1, 0.0, 1.0).unwrap()]),
            ConvexSet::truncation(ConvexSet::ellipsoid(vec![1.0, 0.5, 0.25, 0.125], 1.0).unwrap(), 2).unwrap(),
        ];
        for s in &sets {
            let a = s.sample(200, 5);
            assert_eq!(a, s.sample(200, 5));
            assert!(a.iter().all(|p| s.contains(p, 1e-12)));
        }
    }

    #[test]
    fn box_sample_mean_within_clt_bound() {
        let b = ConvexSet::cube(2, 0.0, 1.0).unwrap();
        let n = 100_000;
        let pts = b.sample(n, 42);
        let sigma = (1.0f64 / 12.0).sqrt() / (n as f64).sqrt();
        for k in 0..2 {
            let mean = pts.iter().map(|p| p[k]).sum::<f64>() / n as f64;
            assert!((mean - 0.5).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn truncation_zeroes_tail() {
        let t = ConvexSet::truncation(ConvexSet::unit_ball(4), 2).unwrap();
        let p = t.project(&[3.0, 4.0, 7.0, -1.0]);
        assert_eq!(&p[2..], &[0.0, 0.0]);
        assert!((p[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(ConvexSet::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(ConvexSet::ball(vec![0.0], 0.0).is_err());
        assert!(ConvexSet::ellipsoid(vec![0.5, 1.0], 1.0).is_err());
    }
}
