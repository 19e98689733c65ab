use crate::params::PiecewiseLinear;
use crate::{Error, Result};

const GRID_INTERVALS: usize = 512;

fn simpson_rec(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&mut f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Breakthrough curve `T(x) = ∫₀ˣ ds / c(s)` on `[−1, 1]`, tabulated at grid
/// nodes and interpolated by cubic Hermite with slopes `1/c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvectionSolution {
    nodes: Vec<f64>,
    t: Vec<f64>,
    slope: Vec<f64>,
    /// `∫_{−1}^{x_j} T`
    prefix: Vec<f64>,
}

/// Method of characteristics for `u_t + c u_x = 0`, `u(0,x) = χ_{[−1,0]}`,
/// `u(t,−1) = 1`: the front reaches `x` at time `T(x)`.
///
/// `breakpoints` are points where `c` is not smooth; they are added to the
/// tabulation grid.
pub fn solve_advection_exact(c: impl Fn(f64) -> f64, breakpoints: &[f64], r: f64, tol: f64) -> Result<AdvectionSolution> {
    let mut nodes: Vec<f64> = (0..=GRID_INTERVALS).map(|i| -1.0 + 2.0 * i as f64 / GRID_INTERVALS as f64).collect();
    nodes.extend(breakpoints.iter().copied().filter(|x| *x > -1.0 && *x < 1.0));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let zero = nodes.iter().position(|x| *x == 0.0).expect("0 is a grid node");
    let mut bad: Option<(f64, f64)> = None;
    let mut inv_c = |x: f64| {
        let v = c(x);
        if !(v >= r) && bad.is_none() {
            bad = Some((x, v));
        }
        1.0 / v
    };
    let per = tol / nodes.len() as f64;
    let mut t = vec![0.0; nodes.len()];
    for j in zero + 1..nodes.len() {
        t[j] = t[j - 1] + adaptive_simpson(&mut inv_c, nodes[j - 1], nodes[j], per);
    }
    for j in (0..zero).rev() {
        t[j] = t[j + 1] - adaptive_simpson(&mut inv_c, nodes[j], nodes[j + 1], per);
    }
    let slope: Vec<f64> = nodes.iter().map(|&x| inv_c(x)).collect();
    if let Some((x, value)) = bad {
        return Err(Error::CoefficientBound { x, value, bound: r });
    }
    let mut prefix = vec![0.0; nodes.len()];
    for j in 1..nodes.len() {
        let h = nodes[j] - nodes[j - 1];
        prefix[j] = prefix[j - 1] + h * (0.5 * (t[j - 1] + t[j]) + h * (slope[j - 1] - slope[j]) / 12.0);
    }
    Ok(AdvectionSolution { nodes, t, slope, prefix })
}

pub fn solve_advection_pwl(c: &PiecewiseLinear, r: f64, tol: f64) -> Result<AdvectionSolution> {
    let (lo, hi) = c.domain();
    if lo > -1.0 || hi < 1.0 {
        return Err(Error::InvalidInput(format!("coefficient defined on [{lo}, {hi}], need [-1, 1]")));
    }
    solve_advection_exact(|x| c.eval(x), c.nodes(), r, tol)
}

impl AdvectionSolution {
    fn interval(&self, x: f64) -> usize {
        let j = self.nodes.partition_point(|n| *n <= x);
        j.clamp(1, self.nodes.len() - 1) - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn breakthrough(&self, x: f64) -> f64 {
        let j = self.interval(x);
        let h = self.nodes[j + 1] - self.nodes[j];
        let s = (x - self.nodes[j]) / h;
        let (s2, s3) = (s * s, s * s * s);
        self.t[j] * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * self.slope[j] * (s3 - 2.0 * s2 + s)
            + self.t[j + 1] * (-2.0 * s3 + 3.0 * s2)
            + h * self.slope[j + 1] * (s3 - s2)
    }

    /// `∫_{−1}^{x} T`
    fn antiderivative(&self, x: f64) -> f64 {
        let j = self.interval(x);
        let h = self.nodes[j + 1] - self.nodes[j];
        let s = (x - self.nodes[j]) / h;
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        self.prefix[j]
            + h * (self.t[j] * (0.5 * s4 - s3 + s)
                + h * self.slope[j] * (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2)
                + self.t[j + 1] * (-0.5 * s4 + s3)
                + h * self.slope[j + 1] * (0.25 * s4 - s3 / 3.0))
    }

    /// Position where the front arrives at time `t`, clamped to `[−1, 1]`.
    pub fn arrival_position(&self, t: f64) -> f64 {
        if t <= self.t[0] {
            return -1.0;
        }
        if t >= *self.t.last().unwrap() {
            return 1.0;
        }
        let j = self.t.partition_point(|v| *v <= t).clamp(1, self.t.len() - 1) - 1;
        let (mut lo, mut hi) = (self.nodes[j], self.nodes[j + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.breakthrough(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// `u(t, x)`
    pub fn value(&self, t: f64, x: f64) -> f64 {
        if t >= self.breakthrough(x) {
            1.0
        } else {
            0.0
        }
    }

    /// Cell averages of `u` on the tensor grid, row-major in time.
    pub fn cell_averages(&self, t_grid: &[f64], x_grid: &[f64]) -> Vec<f64> {
        let arrivals: Vec<f64> = t_grid.iter().map(|&t| self.arrival_position(t)).collect();
        let mut out = Vec::with_capacity((t_grid.len() - 1) * (x_grid.len() - 1));
        for i in 0..t_grid.len() - 1 {
            let (lo, hi) = (t_grid[i], t_grid[i + 1]);
            for j in 0..x_grid.len() - 1 {
                let (a, b) = (x_grid[j], x_grid[j + 1]);
                let xl = arrivals[i].clamp(a, b);
                let xh = arrivals[i + 1].clamp(a, b);
                let clamped = lo * (xl - a) + (self.antiderivative(xh) - self.antiderivative(xl)) + hi * (b - xh);
                out.push(((hi * (b - a) - clamped) / ((hi - lo) * (b - a))).clamp(0.0, 1.0));
            }
        }
        out
    }
}

/// Exact `L^p([0,1] × [−1,1])` distance: `(∫ |clamp T − clamp T̄| dx)^{1/p}`.
pub fn advection_distance(s1: &AdvectionSolution, s2: &AdvectionSolution, p: f64) -> f64 {
    let mut pts: Vec<f64> = s1.nodes.iter().chain(&s2.nodes).copied().filter(|x| *x >= 0.0).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |x: f64| (s1.breakthrough(x).clamp(0.0, 1.0) - s2.breakthrough(x).clamp(0.0, 1.0)).abs();
    let per = 1e-13 / pts.len() as f64;
    let mut l1 = 0.0;
    for w in pts.windows(2) {
        l1 += adaptive_simpson(f, w[0], w[1], per);
    }
    l1.max(0.0).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn constant(c: f64) -> AdvectionSolution {
        solve_advection_exact(|_| c, &[], 0.5, 1e-12).unwrap()
    }

    #[test]
    fn constant_speeds() {
        let (one, two) = (constant(1.0), constant(2.0));
        for i in 0..=40 {
            let x = -1.0 + i as f64 / 20.0;
            assert!((one.breakthrough(x) - x).abs() < 1e-14);
            assert!((two.breakthrough(x) - x / 2.0).abs() < 1e-14);
        }
        assert_eq!(one.breakthrough(0.0), 0.0);
    }

    #[test]
    fn linear_speed_closed_form() {
        let s = solve_advection_exact(|x| 1.5 + 0.5 * x, &[], 1.0, 1e-10).unwrap();
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            let want = 2.0 * ((1.5 + 0.5 * x) / 1.5).ln();
            assert!((s.breakthrough(x) - want).abs() < 1e-10, "{x}");
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let x = -1.0 + 2.0 * i as f64 / 999.0;
            let t = s.breakthrough(x);
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn speed_below_bound_is_rejected() {
        assert!(matches!(solve_advection_exact(|x| 1.0 + x, &[], 0.5, 1e-10), Err(Error::CoefficientBound { .. })));
    }

    #[test]
    fn constant_pair_against_dense_quadrature() {
        let (one, two) = (constant(1.0), constant(2.0));
        let n = 1000;
        let mut acc = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            for j in 0..2 * n {
                let x = -1.0 + (j as f64 + 0.5) / n as f64;
                acc += (one.value(t, x) - two.value(t, x)).abs();
            }
        }
        let oracle = acc / (n * n) as f64;
        assert!((oracle - 0.25).abs() < 2e-3);
        assert!((advection_distance(&one, &two, 1.0) - 0.25).abs() < 1e-12);
        assert!((advection_distance(&one, &two, 2.0) - 0.5).abs() < 1e-12);
        assert_eq!(advection_distance(&one, &one, 1.0), 0.0);
    }

    #[test]
    fn holder_bound_random_pwl() {
        let mut rng = stream(11, 0);
        for _ in 0..50 {
            let mk = |rng: &mut crate::rng::Rng| {
                let vals: Vec<f64> = (0..9).map(|_| rng.random_range(1.0..2.0)).collect();
                PiecewiseLinear::new((0..9).map(|i| -1.0 + 0.25 * i as f64).collect(), vals).unwrap()
            };
            let (c1, c2) = (mk(&mut rng), mk(&mut rng));
            let (s1, s2) = (solve_advection_pwl(&c1, 1.0, 1e-12).unwrap(), solve_advection_pwl(&c2, 1.0, 1e-12).unwrap());
            let l1 = c1.l1_distance(&c2);
            let d1 = advection_distance(&s1, &s2, 1.0);
            assert!(d1 <= l1 + 1e-10);
            assert!((advection_distance(&s1, &s2, 2.0) - d1.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_averages_match_dense_sampling() {
        let s = solve_advection_exact(|x| 1.5 + 0.4 * (3.0 * x).sin(), &[], 1.0, 1e-12).unwrap();
        let tg: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
        let xg: Vec<f64> = (0..=8).map(|i| -1.0 + i as f64 / 4.0).collect();
        let avg = s.cell_averages(&tg, &xg);
        let m = 400;
        for i in 0..4 {
            for j in 0..8 {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        let t = tg[i] + (tg[i + 1] - tg[i]) * (a as f64 + 0.5) / m as f64;
                        let x = xg[j] + (xg[j + 1] - xg[j]) * (b as f64 + 0.5) / m as f64;
                        acc += s.value(t, x);
                    }
                }
                assert!((acc / (m * m) as f64 - avg[i * 8 + j]).abs() < 5e-3);
            }
        }
    }
}
