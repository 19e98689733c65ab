//! Sparse matrices, direct and iterative solvers, and small dense kernels.

mod cholesky;
mod det;
mod iterative;
mod ordering;
mod small;
mod sparse;

pub use cholesky::EnvelopeCholesky;
pub use det::{perturbed_identity_det, DetBounds};
pub use iterative::{bicgstab, IterativeOutcome};
pub use ordering::reverse_cuthill_mckee;
pub use small::{det2, inv2, mat2_mul, mat2_transpose, spectral_norm2, sym2_eigenvalues, Mat2};
pub use sparse::CsrMatrix;

use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Residual 2-norm of `A x - b`.
pub fn residual_norm(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Solve `A x = b` to `‖Ax − b‖ ≤ tol (1 + ‖b‖)`.
///
/// Symmetric systems are factored (envelope Cholesky, so a non-definite
/// matrix surfaces as a breakdown); others go through BiCGSTAB.
pub fn solve_linear(a: &CsrMatrix, b: &[f64], symmetric_hint: bool, tol: f64) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidInput(format!(
            "matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    if a.nrows() == 0 {
        return Err(Error::EmptySystem);
    }
    let target = tol * (1.0 + norm2(b));
    if symmetric_hint {
        let chol = EnvelopeCholesky::factor(a)?;
        let mut x = chol.solve(b);
        for _ in 0..3 {
            let ax = a.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
            if norm2(&r) <= target {
                return Ok(x);
            }
            let dx = chol.solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
        }
        let res = residual_norm(a, &x, b);
        if res <= target {
            Ok(x)
        } else {
            Err(Error::NotConverged { method: "cholesky+refinement", iterations: 3, residual: res })
        }
    } else {
        let x0 = vec![0.0; b.len()];
        let out = bicgstab(a, b, &x0, tol, 20 * a.nrows() + 100)?;
        Ok(out.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_returns_rhs() {
        let a = CsrMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(solve_linear(&a, &b, true, 1e-12).unwrap(), b);
        let x = solve_linear(&a, &b, false, 1e-12).unwrap();
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_1d_closed_form() {
        // tridiag(-1, 2, -1), n = 4, rhs = ones: x_i = i (n + 1 - i) / 2
        let n = 4;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b = vec![1.0; n];
        for sym in [true, false] {
            let x = solve_linear(&a, &b, sym, 1e-12).unwrap();
            for (i, xi) in x.iter().enumerate() {
                let k = (i + 1) as f64;
                assert!((xi - k * (n as f64 + 1.0 - k) / 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_spd_residual() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let m: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..n {
                    s += m[k * n + i] * m[k * n + j];
                }
                t.push((i, j, s));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = solve_linear(&a, &b, true, 1e-10).unwrap();
        assert!(residual_norm(&a, &x, &b) <= 1e-10);
        let y = solve_linear(&a, &b, false, 1e-10).unwrap();
        assert!(residual_norm(&a, &y, &b) <= 1e-10 * (1.0 + norm2(&b)));
    }

    #[test]
    fn indefinite_symmetric_is_a_breakdown() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(matches!(solve_linear(&a, &[1.0, 1.0], true, 1e-10), Err(Error::Breakdown { .. })));
    }
}
