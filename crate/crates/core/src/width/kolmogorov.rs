use super::report::{Semantics, WidthMethod, WidthReport};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// POD of a snapshot sample given in isometric coordinates (`Lᵀu` with
/// `G = LLᵀ` the Gram matrix of the norm).
#[derive(Debug, Clone)]
pub struct PodWidths {
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// `residual[n]`: max over snapshots of the projection error onto the
    /// first `n` modes.
    pub residual: Vec<f64>,
    /// Orthonormal modes, one column per singular value.
    pub modes: DMatrix<f64>,
}

impl PodWidths {
    /// `σ_{n+1}`, zero past the rank of the sample.
    pub fn sigma_after(&self, n: usize) -> f64 {
        self.sigma.get(n).copied().unwrap_or(0.0)
    }

    pub fn reports(&self, n_max: usize) -> Vec<WidthReport> {
        let mut out = Vec::with_capacity(2 * (n_max + 1));
        for n in 0..=n_max {
            let res = self.residual.get(n).copied().unwrap_or(0.0);
            out.push(WidthReport::new(WidthMethod::KolmogorovSvd, n, None, res, Semantics::LowerEstimate));
            out.push(WidthReport::new(WidthMethod::KolmogorovSigma, n, None, self.sigma_after(n), Semantics::LowerEstimate));
        }
        out
    }
}

pub fn kolmogorov_width_svd(coords: &[Vec<f64>]) -> Result<PodWidths> {
    if coords.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 snapshots, got {}", coords.len())));
    }
    let m = coords[0].len();
    if let Some(c) = coords.iter().find(|c| c.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: c.len() });
    }
    if coords.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite snapshot coordinate".into()));
    }
    let mat = DMatrix::from_fn(m, coords.len(), |i, j| coords[j][i]);
    let svd = mat.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::InvalidInput("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| svd.singular_values[*b].total_cmp(&svd.singular_values[*a]).then(a.cmp(b)));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let modes = DMatrix::from_fn(m, order.len(), |i, k| u[(i, order[k])]);
    // Residuals from running deflation of each snapshot, not from the
    // cancellation-prone ‖u‖² − Σ⟨u,φ⟩².
    let mut res = mat;
    let mut residual = Vec::with_capacity(order.len() + 1);
    let col_max = |r: &DMatrix<f64>| r.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    residual.push(col_max(&res));
    for k in 0..order.len() {
        let phi = modes.column(k);
        for mut col in res.column_iter_mut() {
            let p = phi.dot(&col);
            col.axpy(-p, &phi, 1.0);
        }
        residual.push(col_max(&res));
    }
    Ok(PodWidths { sigma, residual, modes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn exact_rank_three() {
        let mut rng = stream(1, 0);
        let basis: Vec<Vec<f64>> = (0..3).map(|_| (0..20).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let snaps: Vec<Vec<f64>> = (0..12)
            .map(|_| {
                let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..20).map(|i| (0..3).map(|k| c[k] * basis[k][i]).sum()).collect()
            })
            .collect();
        let w = kolmogorov_width_svd(&snaps).unwrap();
        for n in 3..8 {
            assert!(w.sigma_after(n) < 1e-10 && w.residual[n] < 1e-10);
        }
        assert!(w.sigma_after(2) > 1e-3);
        for n in 1..w.residual.len() {
            assert!(w.residual[n] <= w.residual[n - 1] + 1e-14);
        }
    }

    #[test]
    fn two_orthonormal_snapshots() {
        let w = kolmogorov_width_svd(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let phi = w.modes.column(0);
        let brute = [phi[0], phi[1]].iter().map(|p| (1.0 - p * p).max(0.0).sqrt()).fold(0.0, f64::max);
        assert!((w.residual[1] - brute).abs() < 1e-12);
        assert!(w.residual[1] >= 0.5f64.sqrt() - 1e-12);
        assert!((w.sigma_after(0) - 1.0).abs() < 1e-12 && (w.sigma_after(1) - 1.0).abs() < 1e-12);
    }
}
