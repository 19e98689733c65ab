use super::PiecewiseLinear;
use crate::linalg::spectral_norm2;

/// Metric on parameter vectors. Field-valued variants read the vector as the
/// degrees of freedom of a field and measure the field difference.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamMetric {
    Euclidean,
    Linf,
    /// Piecewise-constant field with the given cell measures, `L¹` norm.
    CellL1 { measures: Vec<f64> },
    /// Piecewise-constant field, `L²` norm.
    CellL2 { measures: Vec<f64> },
    /// Piecewise-constant symmetric 2×2 field packed as `(a11, a12, a22)` per
    /// cell; `L^∞(ℓ²)` norm, i.e. the largest cell spectral norm.
    CellMatrixLinf,
    /// Nodal values of a piecewise-linear function on `nodes`, exact `L¹` norm.
    PiecewiseLinearL1 { nodes: Vec<f64> },
    WeightedSum(Vec<MetricPart>),
}

/// `weight · metric(x[offset..offset+len], y[..])`
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPart {
    pub weight: f64,
    pub offset: usize,
    pub len: usize,
    pub metric: ParamMetric,
}

impl ParamMetric {
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len(), "metric arguments differ in length");
        match self {
            ParamMetric::Euclidean => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            ParamMetric::Linf => x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            ParamMetric::CellL1 { measures } => x.iter().zip(y).zip(measures).map(|((a, b), m)| m * (a - b).abs()).sum(),
            ParamMetric::CellL2 { measures } => {
                x.iter().zip(y).zip(measures).map(|((a, b), m)| m * (a - b) * (a - b)).sum::<f64>().sqrt()
            }
            ParamMetric::CellMatrixLinf => x
                .chunks_exact(3)
                .zip(y.chunks_exact(3))
                .map(|(p, q)| {
                    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
                    spectral_norm2(&[[d[0], d[1]], [d[1], d[2]]])
                })
                .fold(0.0, f64::max),
            ParamMetric::PiecewiseLinearL1 { nodes } => {
                let f = PiecewiseLinear::new(nodes.clone(), x.to_vec()).expect("metric nodes are valid");
                let g = PiecewiseLinear::new(nodes.clone(), y.to_vec()).expect("metric nodes are valid");
                f.l1_distance(&g)
            }
            ParamMetric::WeightedSum(parts) => parts
                .iter()
                .map(|p| p.weight * p.metric.distance(&x[p.offset..p.offset + p.len], &y[p.offset..p.offset + p.len]))
                .sum(),
        }
    }
}
