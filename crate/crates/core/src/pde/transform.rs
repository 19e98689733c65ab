use crate::linalg::{inv2, mat2_mul, Mat2};
use crate::params::ConvexSet;
use crate::{Error, Result};
use std::f64::consts::PI;

const SQRT6_OVER_PI: f64 = 2.449_489_742_783_178 / PI;

/// Planar domain map with closed-form Jacobian and a numerical inverse.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Identity,
    /// Rotation about the origin.
    Rotation { angle: f64 },
    /// `(x₁ + λ₁ sin x₁, x₂ + λ₂ sin x₂)`
    SineStretch { lambda: [f64; 2] },
    /// `(x₁, x₂ + ρ(x₁) sin x₂)`, `ρ(s) = Σ √6/(k²π)(a_k cos ks + b_k sin ks)`.
    CurveStretch { modes: Vec<[f64; 2]> },
    /// `outer ∘ inner`
    Compose { outer: Box<Transform>, inner: Box<Transform> },
    Inverse(Box<Transform>),
}

/// Solve `g(x) = y` for increasing `g` on the bracket `[lo, hi]`.
fn invert_monotone(g: impl Fn(f64) -> (f64, f64), y: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut x = y.clamp(lo, hi);
    for _ in 0..200 {
        let (gx, dg) = g(x);
        let r = gx - y;
        if r.abs() <= 1e-15 * (1.0 + y.abs()) {
            return x;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = x - r / dg;
        x = if dg > 0.0 && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn curve_rho(modes: &[[f64; 2]], s: f64) -> (f64, f64) {
    let (mut rho, mut drho) = (0.0, 0.0);
    for (k, [a, b]) in modes.iter().enumerate() {
        let kf = (k + 1) as f64;
        let (sn, cs) = (kf * s).sin_cos();
        rho += SQRT6_OVER_PI / (kf * kf) * (a * cs + b * sn);
        drho += SQRT6_OVER_PI / kf * (-a * sn + b * cs);
    }
    (rho, drho)
}

impl Transform {
    pub fn rotation(angle: f64) -> Self {
        Transform::Rotation { angle }
    }

    pub fn sine_stretch(lambda: [f64; 2]) -> Self {
        Transform::SineStretch { lambda }
    }

    /// Modes from the interleaved sequence `(a₁, b₁, a₂, b₂, …)`; a trailing
    /// odd entry is an `a_k` with `b_k = 0`.
    pub fn curve_stretch(coeffs: &[f64]) -> Self {
        let modes = coeffs.chunks(2).map(|c| [c[0], c.get(1).copied().unwrap_or(0.0)]).collect();
        Transform::CurveStretch { modes }
    }

    pub fn compose(outer: Transform, inner: Transform) -> Self {
        Transform::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    pub fn inverted(self) -> Self {
        match self {
            Transform::Inverse(t) => *t,
            Transform::Identity => Transform::Identity,
            Transform::Rotation { angle } => Transform::Rotation { angle: -angle },
            other => Transform::Inverse(Box::new(other)),
        }
    }

    pub fn forward(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Transform::Identity => x,
            Transform::Rotation { angle } => {
                let (s, c) = angle.sin_cos();
                [c * x[0] - s * x[1], s * x[0] + c * x[1]]
            }
            Transform::SineStretch { lambda } => [x[0] + lambda[0] * x[0].sin(), x[1] + lambda[1] * x[1].sin()],
            Transform::CurveStretch { modes } => {
                let (rho, _) = curve_rho(modes, x[0]);
                [x[0], x[1] + rho * x[1].sin()]
            }
            Transform::Compose { outer, inner } => outer.forward(inner.forward(x)),
            Transform::Inverse(t) => t.inverse(x),
        }
    }

    pub fn jacobian(&self, x: [f64; 2]) -> Mat2 {
        match self {
            Transform::Identity => [[1.0, 0.0], [0.0, 1.0]],
            Transform::Rotation { angle } => {
                let (s, c) = angle.sin_cos();
                [[c, -s], [s, c]]
            }
            Transform::SineStretch { lambda } => {
                [[1.0 + lambda[0] * x[0].cos(), 0.0], [0.0, 1.0 + lambda[1] * x[1].cos()]]
            }
            Transform::CurveStretch { modes } => {
                let (rho, drho) = curve_rho(modes, x[0]);
                let (s, c) = x[1].sin_cos();
                [[1.0, 0.0], [drho * s, 1.0 + rho * c]]
            }
            Transform::Compose { outer, inner } => mat2_mul(&outer.jacobian(inner.forward(x)), &inner.jacobian(x)),
            Transform::Inverse(t) => {
                let j = t.jacobian(t.inverse(x));
                inv2(&j).unwrap_or([[f64::NAN; 2]; 2])
            }
        }
    }

    pub fn inverse(&self, y: [f64; 2]) -> [f64; 2] {
        match self {
            Transform::Identity => y,
            Transform::Rotation { angle } => Transform::Rotation { angle: -angle }.forward(y),
            Transform::SineStretch { lambda } => {
                let mut x = [0.0; 2];
                for i in 0..2 {
                    let l = lambda[i];
                    x[i] = invert_monotone(|s| (s + l * s.sin(), 1.0 + l * s.cos()), y[i], y[i] - l.abs(), y[i] + l.abs());
                }
                x
            }
            Transform::CurveStretch { modes } => {
                let (rho, _) = curve_rho(modes, y[0]);
                let x2 = invert_monotone(|s| (s + rho * s.sin(), 1.0 + rho * s.cos()), y[1], y[1] - rho.abs(), y[1] + rho.abs());
                [y[0], x2]
            }
            Transform::Compose { outer, inner } => inner.inverse(outer.inverse(y)),
            Transform::Inverse(t) => t.forward(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Rotation,
    SineStretch,
    CurveStretch,
}

/// Parametrized transforms `λ ↦ T_λ` with `T₀ = id`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformFamily {
    pub kind: FamilyKind,
    pub params: ConvexSet,
}

impl TransformFamily {
    /// `Λ = [−π, π]`
    pub fn rotation() -> Self {
        Self { kind: FamilyKind::Rotation, params: ConvexSet::Box { lo: vec![-PI], hi: vec![PI] } }
    }

    /// `Λ = [−1/2, 1/2]²`
    pub fn sine_stretch() -> Self {
        Self { kind: FamilyKind::SineStretch, params: ConvexSet::Box { lo: vec![-0.5; 2], hi: vec![0.5; 2] } }
    }

    /// `Λ = {Σ (a_k² + b_k²)/w_k ≤ 9/64}` truncated to `weights.len()` modes.
    pub fn curve_stretch(weights: &[f64]) -> Result<Self> {
        let w: Vec<f64> = weights.iter().flat_map(|&w| [w, w]).collect();
        Ok(Self { kind: FamilyKind::CurveStretch, params: ConvexSet::ellipsoid(w, 0.375)? })
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn transform(&self, lambda: &[f64]) -> Result<Transform> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: lambda.len() });
        }
        Ok(match self.kind {
            FamilyKind::Rotation => Transform::rotation(lambda[0]),
            FamilyKind::SineStretch => Transform::sine_stretch([lambda[0], lambda[1]]),
            FamilyKind::CurveStretch => Transform::curve_stretch(lambda),
        })
    }

    /// `β = T_λ ∘ T_λ̄⁻¹`
    pub fn relative(&self, lambda: &[f64], lambda_bar: &[f64]) -> Result<Transform> {
        Ok(Transform::compose(self.transform(lambda)?, self.transform(lambda_bar)?.inverted()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm2;
    use crate::rng::stream;
    use rand::Rng;

    fn sigma_min(j: &Mat2) -> f64 {
        let inv = inv2(j).unwrap();
        1.0 / spectral_norm2(&inv)
    }

    fn fd_jacobian(t: &Transform, x: [f64; 2]) -> Mat2 {
        let h = 1e-6;
        let mut j = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut p = x;
            let mut m = x;
            p[c] += h;
            m[c] -= h;
            let (fp, fm) = (t.forward(p), t.forward(m));
            for r in 0..2 {
                j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    fn families() -> Vec<(TransformFamily, [f64; 4])> {
        let w: Vec<f64> = (1..=6).map(|k| 1.0 / (k * k) as f64).collect();
        vec![
            (TransformFamily::rotation(), [-1.0, 1.0, -1.0, 1.0]),
            (TransformFamily::sine_stretch(), [-PI, PI, -PI, PI]),
            (TransformFamily::curve_stretch(&w).unwrap(), [-PI, PI, 0.0, PI]),
        ]
    }

    #[test]
    fn zero_parameter_is_identity() {
        for (fam, bb) in families() {
            let t = fam.transform(&vec![0.0; fam.dim()]).unwrap();
            let mut rng = stream(1, 0);
            for _ in 0..100 {
                let x = [rng.random_range(bb[0]..bb[1]), rng.random_range(bb[2]..bb[3])];
                let y = t.forward(x);
                assert!((y[0] - x[0]).abs() < 1e-12 && (y[1] - x[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_jacobian_and_singular_values() {
        for (fi, (fam, bb)) in families().into_iter().enumerate() {
            let lams = fam.params.sample(20, 40 + fi as u64);
            let mut rng = stream(2, fi as u64);
            for lam in &lams {
                let t = fam.transform(lam).unwrap();
                for _ in 0..50 {
                    let x = [rng.random_range(bb[0]..bb[1]), rng.random_range(bb[2]..bb[3])];
                    let y = t.forward(x);
                    let back = t.forward(t.inverse(y));
                    assert!((back[0] - y[0]).abs() < 1e-10 && (back[1] - y[1]).abs() < 1e-10);
                    let j = t.jacobian(x);
                    let fd = fd_jacobian(&t, x);
                    for r in 0..2 {
                        for c in 0..2 {
                            assert!((j[r][c] - fd[r][c]).abs() < 1e-6);
                        }
                    }
                    assert!(sigma_min(&j) >= 0.5 - 1e-12, "{fam:?} {lam:?}");
                }
            }
        }
    }

    #[test]
    fn relative_map_and_its_jacobian() {
        let fam = TransformFamily::sine_stretch();
        let beta = fam.relative(&[0.3, -0.2], &[-0.1, 0.25]).unwrap();
        let y = [0.7, -1.3];
        let j = beta.jacobian(y);
        let fd = fd_jacobian(&beta, y);
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - fd[r][c]).abs() < 1e-6);
            }
        }
        let inv = beta.clone().inverted();
        let z = inv.forward(beta.forward(y));
        assert!((z[0] - y[0]).abs() < 1e-12 && (z[1] - y[1]).abs() < 1e-12);
    }

    #[test]
    fn boundaries_are_preserved() {
        let w = [1.0, 0.25, 1.0 / 9.0];
        let fam = TransformFamily::curve_stretch(&w).unwrap();
        let lam = fam.params.project(&[0.3, -0.2, 0.1, 0.05, 0.0, 0.02]);
        let t = fam.transform(&lam).unwrap();
        for s in [-3.0, -1.0, 0.5, 2.9] {
            assert!((t.forward([s, 0.0])[1]).abs() < 1e-15);
            assert!((t.forward([s, PI])[1] - PI).abs() < 1e-14);
        }
        let t = Transform::sine_stretch([0.4, -0.3]);
        assert!((t.forward([PI, 1.0])[0] - PI).abs() < 1e-14);
        assert!((t.forward([PI / 2.0, 0.0])[0] - (PI / 2.0 + 0.4)).abs() < 1e-15);
    }
}
