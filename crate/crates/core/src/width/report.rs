use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthMethod {
    /// Max projection residual over the sample onto the leading POD modes.
    KolmogorovSvd,
    /// `σ_{n+1}` of the same decomposition.
    KolmogorovSigma,
    EntropyGrid,
    EntropyGreedy,
    DecoderBoundChain,
    DecoderEmpirical,
}

impl WidthMethod {
    pub fn name(self) -> &'static str {
        match self {
            WidthMethod::KolmogorovSvd => "kolmogorov_svd",
            WidthMethod::KolmogorovSigma => "kolmogorov_svd_sigma",
            WidthMethod::EntropyGrid => "entropy_grid",
            WidthMethod::EntropyGreedy => "entropy_greedy",
            WidthMethod::DecoderBoundChain => "decoder_bound_chain",
            WidthMethod::DecoderEmpirical => "decoder_empirical",
        }
    }
}

/// What a reported number says about the true quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    UpperBound,
    LowerEstimate,
    Heuristic,
}

impl Semantics {
    pub fn name(self) -> &'static str {
        match self {
            Semantics::UpperBound => "upper_bound",
            Semantics::LowerEstimate => "lower_estimate",
            Semantics::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthReport {
    pub method: WidthMethod,
    pub n: usize,
    pub l: Option<f64>,
    pub value: f64,
    pub constants_used: BTreeMap<String, f64>,
    pub semantics: Semantics,
}

impl WidthReport {
    pub fn new(method: WidthMethod, n: usize, l: Option<f64>, value: f64, semantics: Semantics) -> Self {
        Self { method, n, l, value, constants_used: BTreeMap::new(), semantics }
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants_used.insert(name.to_string(), value);
        self
    }

    pub fn csv_row(&self) -> String {
        let l = self.l.map(fmt_f64).unwrap_or_default();
        format!("{},{},{},{},{}", self.method.name(), self.n, l, fmt_f64(self.value), self.semantics.name())
    }
}

pub const CSV_HEADER: &str = "method,n,l,value,semantics";

/// Shortest decimal that round-trips, so reruns are byte-identical.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub fn to_csv(reports: &[WidthReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Number of leading points dropped from decay fits.
pub const FIT_SKIP: usize = 2;

fn fit_points(ns: &[usize], values: &[f64]) -> Vec<(f64, f64)> {
    ns.iter().zip(values).skip(FIT_SKIP).filter(|(n, v)| **n > 0 && **v > 0.0).map(|(n, v)| (*n as f64, *v)).collect()
}

/// Slope of `log v` against `log n`; algebraic decay `n^s` gives `s`.
pub fn fit_decay_exponent(ns: &[usize], values: &[f64]) -> Option<f64> {
    let pts = fit_points(ns, values);
    let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().map(|(n, v)| (n.ln(), v.ln())).unzip();
    least_squares_slope(&x, &y)
}

/// Slope of `log₂ v` against `n`; `2^{−sn}` gives `−s`.
pub fn fit_log2_slope(ns: &[usize], values: &[f64]) -> Option<f64> {
    let pts = fit_points(ns, values);
    let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().map(|(n, v)| (*n, v.log2())).unzip();
    least_squares_slope(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_recover_rates() {
        let ns: Vec<usize> = (1..=20).collect();
        let alg: Vec<f64> = ns.iter().map(|n| 3.0 * (*n as f64).powf(-0.5)).collect();
        let exp: Vec<f64> = ns.iter().map(|n| 2f64.powf(-(*n as f64) / 3.0)).collect();
        assert!((fit_decay_exponent(&ns, &alg).unwrap() + 0.5).abs() < 1e-12);
        assert!((fit_log2_slope(&ns, &exp).unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let r = WidthReport::new(WidthMethod::EntropyGrid, 4, None, 0.125, Semantics::UpperBound);
        assert_eq!(to_csv(&[r]), "method,n,l,value,semantics\nentropy_grid,4,,1.25e-1,upper_bound\n");
    }
}
