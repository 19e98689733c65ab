use crate::{Error, Result};

/// Continuous piecewise-linear function on an interval, given by strictly
/// increasing nodes and nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

fn abs_integral(h: f64, a: f64, b: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * h * (a.abs() + b.abs())
    } else {
        0.5 * h * (a * a + b * b) / (a.abs() + b.abs())
    }
}

fn merge(a: &[f64], b: &[f64]) -> Vec<f64> {
    let lo = a[0].max(b[0]);
    let hi = a[a.len() - 1].min(b[b.len() - 1]);
    let mut all: Vec<f64> = a.iter().chain(b).cloned().filter(|&x| x >= lo && x <= hi).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidInput("piecewise-linear function needs >= 2 nodes and matching values".into()));
        }
        if nodes.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidInput("nodes must be strictly increasing".into()));
        }
        if values.iter().chain(&nodes).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite node or value".into()));
        }
        Ok(Self { nodes, values })
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Self { nodes: vec![lo, hi], values: vec![c, c] }
    }

    /// Uniform nodes on `[lo, hi]` with values `f(x_i)`.
    pub fn sampled(lo: f64, hi: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Self {
        let nodes: Vec<f64> = (0..=intervals).map(|i| lo + (hi - lo) * i as f64 / intervals as f64).collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self { nodes, values }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = &self.nodes;
        let i = match n.partition_point(|&t| t <= x) {
            0 => 0,
            k if k >= n.len() => n.len() - 2,
            k => k - 1,
        };
        let s = (x - n[i]) / (n[i + 1] - n[i]);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Union of both node sets, restricted to the common domain.
    pub fn merged_nodes(&self, other: &Self) -> Vec<f64> {
        merge(&self.nodes, &other.nodes)
    }

    /// `Σ c_k f_k` on the merged node set.
    pub fn combination(terms: &[(f64, &PiecewiseLinear)]) -> Self {
        let mut nodes = terms[0].1.nodes.clone();
        for (_, f) in &terms[1..] {
            nodes = merge(&nodes, &f.nodes);
        }
        let values = nodes.iter().map(|&x| terms.iter().map(|(c, f)| c * f.eval(x)).sum()).collect();
        Self { nodes, values }
    }

    /// Exact `∫|f|` (the function is linear between nodes).
    pub fn l1_norm(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| abs_integral(x[1] - x[0], v[0], v[1]))
            .sum()
    }

    /// Exact `∫|f − g|` over the common domain.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let nodes = self.merged_nodes(other);
        nodes
            .windows(2)
            .map(|x| {
                let d0 = self.eval(x[0]) - other.eval(x[0]);
                let d1 = self.eval(x[1]) - other.eval(x[1]);
                abs_integral(x[1] - x[0], d0, d1)
            })
            .sum()
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.merged_nodes(other).iter().map(|&x| (self.eval(x) - other.eval(x)).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_of_sign_change() {
        // f(x) = x on [-1, 1]: ∫|x| = 1
        let f = PiecewiseLinear::new(vec![-1.0, 1.0], vec![-1.0, 1.0]).unwrap();
        assert!((f.l1_norm() - 1.0).abs() < 1e-15);
        let g = PiecewiseLinear::constant(-1.0, 1.0, 0.0);
        assert!((f.l1_distance(&g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_matches_dense_quadrature() {
        let f = PiecewiseLinear::new(vec![-1.0, -0.3, 0.4, 1.0], vec![1.2, 1.9, 1.1, 1.5]).unwrap();
        let g = PiecewiseLinear::new(vec![-1.0, 0.0, 1.0], vec![1.8, 1.0, 1.6]).unwrap();
        let n = 400_000;
        let h = 2.0 / n as f64;
        let dense: f64 = (0..n).map(|i| (f.eval(-1.0 + (i as f64 + 0.5) * h) - g.eval(-1.0 + (i as f64 + 0.5) * h)).abs() * h).sum();
        assert!((f.l1_distance(&g) - dense).abs() < 1e-9);
        assert!((f.l1_distance(&g) - g.l1_distance(&f)).abs() < 1e-15);
    }

    #[test]
    fn combination_is_pointwise() {
        let f = PiecewiseLinear::new(vec![-1.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let g = PiecewiseLinear::new(vec![-1.0, -0.5, 1.0], vec![1.0, 2.0, 3.0]).unwrap();
        let h = PiecewiseLinear::combination(&[(2.0, &f), (-1.0, &g)]);
        for i in 0..=20 {
            let x = -1.0 + i as f64 / 10.0;
            assert!((h.eval(x) - (2.0 * f.eval(x) - g.eval(x))).abs() < 1e-14);
        }
    }
}
