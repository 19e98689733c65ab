use super::{ConvexSet, PiecewiseLinear};
use crate::fem::{CoefficientField, FieldKind};
use crate::{Error, Result};

/// Affine map `z ↦ λ`, `λ_ij = 3/2 + (K/2) z_{K i + j}` (0-based), taking
/// `[−1/K, 1/K]^{K²}` onto `[1, 2]^{K×K}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFieldEmbed {
    pub k: usize,
}

pub fn grid_field_embed(k: usize) -> GridFieldEmbed {
    GridFieldEmbed { k }
}

impl GridFieldEmbed {
    pub fn dim(&self) -> usize {
        self.k * self.k
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let half_k = 0.5 * self.k as f64;
        z.iter().map(|v| 1.5 + half_k * v).collect()
    }

    /// `(λ − 3/2)·2/K`, the witness of `λ`.
    pub fn encode(&self, lambda: &[f64]) -> Vec<f64> {
        let s = 2.0 / self.k as f64;
        lambda.iter().map(|l| (l - 1.5) * s).collect()
    }

    /// Frobenius-to-Euclidean bound.
    pub fn lipschitz(&self) -> f64 {
        0.5 * self.k as f64
    }

    pub fn domain(&self) -> ConvexSet {
        let h = 1.0 / self.k as f64;
        ConvexSet::Box { lo: vec![-h; self.dim()], hi: vec![h; self.dim()] }
    }
}

/// Vector-space elements that can be linearly combined.
pub trait Combine: Clone + Send + Sync {
    fn combine(terms: &[(f64, &Self)]) -> Self;
}

impl Combine for Vec<f64> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut out = vec![0.0; terms[0].1.len()];
        for (c, v) in terms {
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o += c * x;
            }
        }
        out
    }
}

impl Combine for PiecewiseLinear {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        PiecewiseLinear::combination(terms)
    }
}

impl Combine for CoefficientField {
    /// Scalar fields only.
    fn combine(terms: &[(f64, &Self)]) -> Self {
        assert!(terms.iter().all(|(_, f)| f.kind() == FieldKind::Scalar), "only scalar fields combine");
        let parts: Vec<(f64, CoefficientField)> =
            terms.iter().filter(|(c, f)| *c != 0.0 && !f.is_zero()).map(|(c, f)| (*c, (*f).clone())).collect();
        if parts.is_empty() {
            return CoefficientField::zero_scalar();
        }
        let td = parts.iter().any(|(_, f)| f.time_dependent());
        let eval = move |x: [f64; 2], t: f64| parts.iter().map(|(c, f)| c * f.scalar_at(x, t)).sum::<f64>();
        if td {
            CoefficientField::scalar_t(eval)
        } else {
            CoefficientField::scalar(move |x| eval(x, 0.0))
        }
    }
}

/// `z ↦ φ₀ + scale · Σ z_k φ_k` with `μ_k = ‖φ_k‖`.
#[derive(Debug, Clone)]
pub struct BasisExpansionEmbed<F> {
    pub phi0: F,
    pub phis: Vec<F>,
    pub norms: Vec<f64>,
    pub scale: f64,
}

pub fn basis_expansion_embed<F: Combine>(phi0: F, phis: Vec<F>, norms: Vec<f64>, scale: f64) -> Result<BasisExpansionEmbed<F>> {
    if phis.len() != norms.len() {
        return Err(Error::DimensionMismatch { expected: phis.len(), got: norms.len() });
    }
    if norms.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidInput("basis norms must be finite and nonnegative".into()));
    }
    Ok(BasisExpansionEmbed { phi0, phis, norms, scale })
}

impl<F: Combine> BasisExpansionEmbed<F> {
    pub fn dim(&self) -> usize {
        self.phis.len()
    }

    pub fn apply(&self, z: &[f64]) -> F {
        let mut terms: Vec<(f64, &F)> = vec![(1.0, &self.phi0)];
        terms.extend(z.iter().zip(&self.phis).map(|(zk, f)| (self.scale * zk, f)));
        F::combine(&terms)
    }

    /// `scale · √(Σ μ_k²)`
    pub fn lipschitz(&self) -> f64 {
        self.scale * self.norms.iter().map(|m| m * m).sum::<f64>().sqrt()
    }

    /// The constant `√(K Σ μ_k²)` of the covering construction; all `μ_k`
    /// must be positive.
    pub fn basis_lipschitz(&self) -> Result<f64> {
        if self.norms.iter().any(|m| *m == 0.0) {
            return Err(Error::InvalidInput("every basis function needs a positive norm".into()));
        }
        Ok((self.dim() as f64 * self.norms.iter().map(|m| m * m).sum::<f64>()).sqrt())
    }
}

/// Inclusion of `ℝ^{m·n}` into sequences of `total` blocks of width `m`,
/// zero beyond block `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceTruncateEmbed {
    pub block: usize,
    pub n: usize,
    pub total: usize,
}

pub fn sequence_truncate_embed(block: usize, n: usize, total: usize) -> Result<SequenceTruncateEmbed> {
    if n == 0 || block == 0 {
        return Err(Error::InvalidInput("sequence embedding needs n >= 1 and block >= 1".into()));
    }
    if n > total {
        return Err(Error::InvalidInput(format!("active blocks {n} exceed truncation length {total}")));
    }
    Ok(SequenceTruncateEmbed { block, n, total })
}

impl SequenceTruncateEmbed {
    pub fn dim(&self) -> usize {
        self.block * self.n
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z.to_vec();
        out.resize(self.block * self.total, 0.0);
        out
    }

    /// Leading blocks of a sequence.
    pub fn encode(&self, lambda: &[f64]) -> Vec<f64> {
        lambda[..self.dim()].to_vec()
    }

    pub fn lipschitz(&self) -> f64 {
        1.0
    }

    /// `‖λ − D₁(encode λ)‖ = √(Σ_{k>n} λ_k²)`
    pub fn tail_error(&self, lambda: &[f64]) -> f64 {
        lambda[self.dim()..].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamMetric;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn grid_embed_corners() {
        let e = grid_field_embed(3);
        assert!(e.apply(&[0.0; 9]).iter().all(|v| *v == 1.5));
        assert!(e.apply(&[1.0 / 3.0; 9]).iter().all(|v| (v - 2.0).abs() < 1e-15));
        let mut rng = stream(3, 0);
        for _ in 0..1000 {
            let z: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lhs = ParamMetric::Euclidean.distance(&e.apply(&z), &e.apply(&w));
            assert!(lhs <= e.lipschitz() * ParamMetric::Euclidean.distance(&z, &w) + 1e-12);
        }
        let lam = e.apply(&[0.1, -0.2, 0.3, 0.0, 0.05, -0.3, 0.2, 0.1, -0.1]);
        let back = e.apply(&e.encode(&lam));
        assert!(lam.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn basis_expansion_l1() {
        let phi0 = PiecewiseLinear::constant(-1.0, 1.0, 2.0);
        let phi1 = PiecewiseLinear::constant(-1.0, 1.0, 1.0);
        let e = basis_expansion_embed(phi0.clone(), vec![phi1.clone()], vec![2.0], 1.0).unwrap();
        assert_eq!(e.apply(&[0.0]).eval(0.3), 2.0);
        assert_eq!(e.apply(&[0.5]).eval(-0.7), 2.5);
        assert_eq!(e.basis_lipschitz().unwrap(), 2.0);

        let phis = vec![
            PiecewiseLinear::new(vec![-1.0, 0.0, 1.0], vec![0.0, 0.3, 0.0]).unwrap(),
            PiecewiseLinear::new(vec![-1.0, 1.0], vec![-0.2, 0.2]).unwrap(),
        ];
        let norms: Vec<f64> = phis.iter().map(|p| p.l1_norm()).collect();
        let e = basis_expansion_embed(phi0, phis, norms, 2f64.sqrt()).unwrap();
        let mut rng = stream(4, 0);
        for _ in 0..1000 {
            let z = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let w = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let d = e.apply(&z).l1_distance(&e.apply(&w));
            assert!(d <= e.lipschitz() * ParamMetric::Euclidean.distance(&z, &w) * (1.0 + 1e-10));
        }
        assert!((e.lipschitz() - e.basis_lipschitz().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn zero_norm_rejected_for_basis_constant() {
        let f = vec![0.0];
        let e = basis_expansion_embed(vec![1.0], vec![f], vec![0.0], 1.0).unwrap();
        assert!(e.basis_lipschitz().is_err());
    }

    #[test]
    fn truncation_isometry() {
        let e = sequence_truncate_embed(5, 2, 8).unwrap();
        assert!(e.apply(&[0.0; 10]).iter().all(|v| *v == 0.0));
        let z: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let s = e.apply(&z);
        assert_eq!(s.len(), 40);
        let nz: f64 = z.iter().map(|v| v * v).sum();
        let ns: f64 = s.iter().map(|v| v * v).sum();
        assert_eq!(nz, ns);
    }
}
