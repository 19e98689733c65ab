use super::{Transform, TransformFamily};
use crate::fem::{CoefficientField, FieldKind, Mesh};
use crate::linalg::{det2, mat2_mul, mat2_transpose, spectral_norm2};
use crate::{Error, Result};
use std::sync::Arc;

/// Coefficients of the transported problem: with `x = β⁻¹(y)` and
/// `J = ∂β/∂x`, `ã(y) = J a(x) Jᵀ / det J` and `f̃(y) = f(x) / det J`.
///
/// Evaluation at a point where `det J ≤ 0` yields NaN, which assembly
/// reports as a non-finite coefficient.
pub fn pushforward_coefficients(a: &CoefficientField, f: &CoefficientField, beta: &Transform) -> Result<(CoefficientField, CoefficientField)> {
    a.expect_kind(FieldKind::SymMatrix2, "diffusion a")?;
    f.expect_kind(FieldKind::Scalar, "load f")?;
    if *beta == Transform::Identity {
        return Ok((a.clone(), f.clone()));
    }
    let beta = Arc::new(beta.clone());
    let (a0, b0) = (a.clone(), Arc::clone(&beta));
    let a_t = CoefficientField::matrix_t(move |y, t| {
        let x = b0.inverse(y);
        let j = b0.jacobian(x);
        let det = det2(&j);
        if det <= 0.0 {
            return [[f64::NAN; 2]; 2];
        }
        let m = mat2_mul(&mat2_mul(&j, &a0.matrix_at(x, t)), &mat2_transpose(&j));
        let off = 0.5 * (m[0][1] + m[1][0]) / det;
        [[m[0][0] / det, off], [off, m[1][1] / det]]
    });
    let f0 = f.clone();
    let f_t = CoefficientField::scalar_t(move |y, t| {
        let x = beta.inverse(y);
        let det = det2(&beta.jacobian(x));
        if det <= 0.0 {
            return f64::NAN;
        }
        f0.scalar_at(x, t) / det
    });
    Ok((a_t, f_t))
}

/// Mesh nodes, edge midpoints and centroids.
pub fn default_samples(mesh: &Mesh) -> Vec<[f64; 2]> {
    let nodes = mesh.nodes();
    let mut pts = nodes.to_vec();
    pts.extend(mesh.edges().into_iter().map(|(i, j)| [0.5 * (nodes[i][0] + nodes[j][0]), 0.5 * (nodes[i][1] + nodes[j][1])]));
    pts.extend(mesh.centroids());
    pts
}

/// Sampled C¹ distance of `β = T_λ ∘ T_λ̄⁻¹` from the identity; a lower
/// estimate of the supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBeta {
    pub value: f64,
    pub samples: usize,
}

pub fn delta_beta(family: &TransformFamily, lambda: &[f64], lambda_bar: &[f64], samples: &[[f64; 2]]) -> Result<DeltaBeta> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("delta_beta needs sample points".into()));
    }
    let t = family.transform(lambda)?;
    let tb = family.transform(lambda_bar)?;
    let mut value = 0.0f64;
    for &y in samples {
        let x = tb.inverse(y);
        let by = t.forward(x);
        let dist = ((by[0] - y[0]).powi(2) + (by[1] - y[1]).powi(2)).sqrt();
        let jb = tb.jacobian(x);
        let inv = crate::linalg::inv2(&jb).ok_or_else(|| Error::InvalidInput(format!("singular Jacobian at {x:?}")))?;
        let mut d = mat2_mul(&t.jacobian(x), &inv);
        d[0][0] -= 1.0;
        d[1][1] -= 1.0;
        value = value.max(dist).max(spectral_norm2(&d));
    }
    Ok(DeltaBeta { value, samples: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::build_disk_mesh;
    use crate::linalg::inv2;

    #[test]
    fn identity_and_rotation() {
        let a = CoefficientField::isotropic(|x| 1.5 + 0.3 * x[0]);
        let f = CoefficientField::scalar(|x| x[0] * x[1]);
        let (at, ft) = pushforward_coefficients(&a, &f, &Transform::Identity).unwrap();
        let p = [0.3, -0.4];
        assert_eq!(at.matrix_at(p, 0.0), a.matrix_at(p, 0.0));
        assert_eq!(ft.scalar_at(p, 0.0), f.scalar_at(p, 0.0));

        let (at, _) = pushforward_coefficients(&CoefficientField::identity(), &f, &Transform::rotation(0.7)).unwrap();
        let m = at.matrix_at(p, 0.0);
        assert!((m[0][0] - 1.0).abs() < 1e-14 && m[0][1].abs() < 1e-14 && (m[1][1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_stretch_matches_finite_differences() {
        let beta = Transform::sine_stretch([0.3, -0.2]);
        let f = CoefficientField::scalar(|x| (x[0] + 2.0 * x[1]).cos());
        let (at, ft) = pushforward_coefficients(&CoefficientField::identity(), &f, &beta).unwrap();
        let y = [1.1, -0.6];
        // independent route: invert by bisection, differentiate by central differences
        let inv1 = |yy: f64, l: f64| {
            let (mut lo, mut hi) = (yy - 1.0, yy + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid + l * mid.sin() < yy {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let x = [inv1(y[0], 0.3), inv1(y[1], -0.2)];
        let h = 1e-5;
        let fwd = |p: [f64; 2]| [p[0] + 0.3 * p[0].sin(), p[1] - 0.2 * p[1].sin()];
        let mut j = [[0.0; 2]; 2];
        for c in 0..2 {
            let (mut p, mut m) = (x, x);
            p[c] += h;
            m[c] -= h;
            for r in 0..2 {
                j[r][c] = (fwd(p)[r] - fwd(m)[r]) / (2.0 * h);
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let want = mat2_mul(&j, &mat2_transpose(&j));
        let got = at.matrix_at(y, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                assert!((got[r][c] - want[r][c] / det).abs() < 1e-6);
            }
        }
        assert!((ft.scalar_at(y, 0.0) - (x[0] + 2.0 * x[1]).cos() / det).abs() < 1e-6);
        assert!(inv2(&got).is_some());
    }

    #[test]
    fn rotation_delta_closed_form() {
        let mesh = build_disk_mesh(1.0, 3, None).unwrap();
        let pts = default_samples(&mesh);
        let fam = TransformFamily::rotation();
        assert!(delta_beta(&fam, &[0.4], &[0.4], &pts).unwrap().value < 1e-14);
        let d = delta_beta(&fam, &[0.35], &[0.25], &pts).unwrap();
        assert!((d.value - 2.0 * 0.05f64.sin()).abs() < 1e-4);
        assert!(d.value <= 2.0 * 0.1 + 1e-12);
    }

    #[test]
    fn delta_within_twice_parameter_distance() {
        let fam = TransformFamily::sine_stretch();
        let mesh = crate::fem::build_rect_mesh((-3.14159, 3.14159, -3.14159, 3.14159), 12, 12, None).unwrap();
        let pts = default_samples(&mesh);
        let lams = fam.params.sample(20, 9);
        for w in lams.windows(2) {
            let d = delta_beta(&fam, &w[0], &w[1], &pts).unwrap().value;
            let dl = ((w[0][0] - w[1][0]).powi(2) + (w[0][1] - w[1][1]).powi(2)).sqrt();
            assert!(d <= 2.0 * dl + 1e-12);
        }
    }
}
