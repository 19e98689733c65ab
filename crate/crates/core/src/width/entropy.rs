use super::report::{Semantics, WidthMethod, WidthReport};
use crate::exec::{map_indexed, Execution};
use crate::{Error, Result};

/// Midpoint grid in the coefficient cube `[−1, 1]^K` of `Σ λ_k φ_k`, with
/// `m_k = ⌊μ_k/δ_n⌋` points along axis `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCover {
    pub n: usize,
    pub mus: Vec<f64>,
    pub delta: f64,
    pub counts: Vec<usize>,
    /// `Σ μ_k / m_k`
    pub bound: f64,
}

fn grid_delta(mus: &[f64], n: usize) -> f64 {
    let k = mus.len() as f64;
    let log_prod: f64 = mus.iter().map(|m| m.ln()).sum();
    (-(n as f64) / k + log_prod / k / std::f64::consts::LN_2).exp2()
}

fn admissible(mus: &[f64], n: usize) -> bool {
    let d = grid_delta(mus, n);
    mus.iter().all(|m| d < m / 2.0)
}

/// Smallest `n` with `δ_n < μ_k / 2` for every `k`.
pub fn min_admissible_n(mus: &[f64]) -> usize {
    (0..).find(|&n| admissible(mus, n)).expect("δ_n → 0")
}

pub fn entropy_grid_cover(mus: &[f64], n: usize) -> Result<GridCover> {
    if mus.is_empty() || mus.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput("basis norms must be positive and finite".into()));
    }
    if !admissible(mus, n) {
        return Err(Error::PreconditionFailed { n, min_n: min_admissible_n(mus) });
    }
    let delta = grid_delta(mus, n);
    // the 1e-9 guards exact ratios such as μ/δ = 16 against rounding down
    let counts: Vec<usize> = mus.iter().map(|m| (m / delta + 1e-9).floor() as usize).collect();
    let bound = mus.iter().zip(&counts).map(|(m, c)| m / *c as f64).sum();
    Ok(GridCover { n, mus: mus.to_vec(), delta, counts, bound })
}

impl GridCover {
    pub fn center_count(&self) -> u128 {
        self.counts.iter().map(|c| *c as u128).product()
    }

    /// Coefficients of center `index` in mixed radix, first axis fastest.
    pub fn center(&self, mut index: u128) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&m| {
                let i = (index % m as u128) as usize;
                index /= m as u128;
                (2 * i + 1) as f64 / m as f64 - 1.0
            })
            .collect()
    }

    /// Nearest center to coefficients `lambda ∈ [−1,1]^K`.
    pub fn nearest(&self, lambda: &[f64]) -> Vec<f64> {
        lambda
            .iter()
            .zip(&self.counts)
            .map(|(&l, &m)| {
                let i = (((l + 1.0) * m as f64 / 2.0).floor().max(0.0) as usize).min(m - 1);
                (2 * i + 1) as f64 / m as f64 - 1.0
            })
            .collect()
    }

    pub fn report(&self) -> WidthReport {
        let mut r = WidthReport::new(WidthMethod::EntropyGrid, self.n, None, self.bound, Semantics::UpperBound)
            .with_constant("delta_n", self.delta);
        for (k, m) in self.mus.iter().enumerate() {
            r = r.with_constant(&format!("mu_{}", k + 1), *m);
        }
        r
    }
}

/// Farthest-point traversal; `radii[k]` is the covering radius of the
/// sample by the first `2^k` centers.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCover {
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
}

impl GreedyCover {
    pub fn report(&self, n: usize) -> WidthReport {
        let v = self.radii.get(n).or(self.radii.last()).copied().unwrap_or(0.0);
        WidthReport::new(WidthMethod::EntropyGreedy, n, None, v, Semantics::LowerEstimate)
    }
}

pub fn entropy_greedy<T, D>(points: &[T], n_max: usize, dist: D, exec: Execution) -> GreedyCover
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    if points.is_empty() {
        return GreedyCover { centers: Vec::new(), radii: vec![0.0; n_max + 1] };
    }
    let budget = 1usize.checked_shl(n_max as u32).unwrap_or(usize::MAX).min(points.len());
    let mut centers = vec![0usize];
    let mut nearest = map_indexed(exec, points.len(), |i| dist(&points[i], &points[0]));
    let mut radii = Vec::with_capacity(n_max + 1);
    let argmax = |v: &[f64]| v.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, d)| if *d > b.1 { (i, *d) } else { b });
    for k in 0..=n_max {
        let target = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX).min(budget);
        while centers.len() < target {
            let (far, _) = argmax(&nearest);
            centers.push(far);
            let fresh = map_indexed(exec, points.len(), |i| dist(&points[i], &points[far]));
            nearest.iter_mut().zip(fresh).for_each(|(d, f)| *d = d.min(f));
        }
        radii.push(argmax(&nearest).1.max(0.0));
    }
    GreedyCover { centers, radii }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_axis_grid() {
        let g = entropy_grid_cover(&[2.0], 4).unwrap();
        assert_eq!(g.counts, vec![16]);
        assert_eq!(g.center_count(), 16);
        assert!((g.delta - 0.125).abs() < 1e-15 && (g.bound - 0.125).abs() < 1e-15);
        // sup over dense λ of the L¹ distance 2|λ − c| to the nearest center
        let worst = (0..=10_000)
            .map(|i| {
                let l = -1.0 + 2.0 * i as f64 / 10_000.0;
                2.0 * (l - g.nearest(&[l])[0]).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 0.125 + 1e-15);
    }

    #[test]
    fn precondition_names_minimal_n() {
        match entropy_grid_cover(&[2.0], 0) {
            Err(Error::PreconditionFailed { min_n, .. }) => {
                assert_eq!(min_n, min_admissible_n(&[2.0]));
                assert!(entropy_grid_cover(&[2.0], min_n).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_bounds_and_counts() {
        let mus = [0.25, 0.2];
        for n in min_admissible_n(&mus)..24 {
            let g = entropy_grid_cover(&mus, n).unwrap();
            assert!(g.center_count() <= 1u128 << n);
            assert!(g.bound <= 4.0 * 2.0 * g.delta);
        }
    }

    #[test]
    fn greedy_small_cases() {
        let anti = [[1.0, 0.0], [-1.0, 0.0]];
        let e = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let g = entropy_greedy(&anti, 1, e, Execution::Sequential);
        assert_eq!(g.radii, vec![2.0, 0.0]);
        let pts: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let g = entropy_greedy(&pts, 12, |a, b| (a - b).abs(), Execution::Parallel);
        assert!(g.radii[3] <= 0.125 + 0.01);
        assert!(g.radii.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(g.radii[10], 0.0);
    }
}
