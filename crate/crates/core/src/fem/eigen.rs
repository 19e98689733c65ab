use super::{assemble_elliptic, assemble_mass, CoefficientField, DofMap, Mesh, NodeClass};
use crate::linalg::{dot, CsrMatrix, EnvelopeCholesky};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareEstimate {
    /// `λ_min^{-1/2}`
    pub constant: f64,
    pub lambda_min: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 2000;

/// Smallest eigenvalue of `K v = λ M v` on the pinned-reduced system by
/// inverse power iteration.
///
/// The Rayleigh quotient only overestimates `λ_min`, so the returned constant
/// can only be low; the tight default keeps that error at roundoff level.
pub fn poincare_constant(mesh: &Mesh, pin: &[NodeClass]) -> Result<PoincareEstimate> {
    poincare_constant_with_tol(mesh, pin, 1e-12)
}

/// As [`poincare_constant`], stopping once the Rayleigh quotient changes by
/// less than `tol` relative.
pub fn poincare_constant_with_tol(mesh: &Mesh, pin: &[NodeClass], tol: f64) -> Result<PoincareEstimate> {
    let map = DofMap::new(mesh, pin)?;
    let k = map.reduce_matrix(&assemble_elliptic(mesh, &CoefficientField::identity(), None)?);
    let m = map.reduce_matrix(&assemble_mass(mesh, None)?);
    smallest_generalized(&k, &m, tol)
}

pub(crate) fn smallest_generalized(k: &CsrMatrix, m: &CsrMatrix, tol: f64) -> Result<PoincareEstimate> {
    let chol = EnvelopeCholesky::factor(k)?;
    let n = k.nrows();
    // smooth positive start vector has a nonzero component on the ground state
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
    let mut lambda = f64::INFINITY;
    for it in 1..=MAX_ITER {
        let mv = m.mul_vec(&v);
        let w = chol.solve(&mv);
        let mw = m.mul_vec(&w);
        let mnorm = dot(&w, &mw).sqrt();
        v = w.iter().map(|x| x / mnorm).collect();
        let next = k.quadratic_form(&v) / m.quadratic_form(&v);
        let change = (next - lambda).abs() / next;
        lambda = next;
        if change < tol {
            return Ok(PoincareEstimate { constant: lambda.powf(-0.5), lambda_min: lambda, iterations: it });
        }
    }
    Err(Error::NotConverged { method: "inverse power iteration", iterations: MAX_ITER, residual: lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_disk_mesh, build_rect_mesh, OUTER};
    use std::f64::consts::PI;

    #[test]
    fn unit_square() {
        let target = 1.0 / (PI * 2f64.sqrt());
        let coarse = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 24, 24, None).unwrap();
        let fine = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 48, 48, None).unwrap();
        let c1 = poincare_constant(&coarse, OUTER).unwrap().constant;
        let c2 = poincare_constant(&fine, OUTER).unwrap().constant;
        assert!((c2 - target).abs() < 0.01 * target);
        // P1 overestimates λ, so C_P approaches from below at rate h²
        assert!(c1 < c2 && c2 < target);
        let extrapolated = (4.0 * c2 - c1) / 3.0;
        assert!((extrapolated - target).abs() < (c2 - target).abs() / 3.0);
        assert!((c2 - c1).abs() < 0.01 * c2);
    }

    #[test]
    fn unit_disk_bessel_zero() {
        let j01 = 2.404_825_557_695_773;
        let mesh = build_disk_mesh(1.0, 4, None).unwrap();
        let c = poincare_constant(&mesh, OUTER).unwrap().constant;
        assert!((c - 1.0 / j01).abs() < 0.01 / j01, "c = {c}");
    }
}
