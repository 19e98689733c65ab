use super::{dot, norm2, CsrMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct IterativeOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi-preconditioned BiCGSTAB from initial guess `x0`, stopping at
/// `‖b − Ax‖ ≤ tol (1 + ‖b‖)` on the true residual.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], x0: &[f64], tol: f64, max_iter: usize) -> Result<IterativeOutcome> {
    let n = b.len();
    let target = tol * (1.0 + norm2(b));
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = x0.to_vec();
    let mut total = 0usize;
    let mut ax = vec![0.0; n];

    // restarts guard against drift between recursive and true residual
    for _restart in 0..8 {
        a.mul_vec_into(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let mut rnorm = norm2(&r);
        if rnorm <= target {
            return Ok(IterativeOutcome { x, iterations: total, residual: rnorm });
        }
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut t = vec![0.0; n];
        let mut broke = false;
        while total < max_iter {
            total += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() < 1e-300 {
                broke = true;
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                y[i] = inv_diag[i] * p[i];
            }
            a.mul_vec_into(&y, &mut v);
            let denom = dot(&r_hat, &v);
            if denom.abs() < 1e-300 {
                broke = true;
                break;
            }
            alpha = rho_new / denom;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm2(&s) <= 0.1 * target {
                for i in 0..n {
                    x[i] += alpha * y[i];
                }
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * s[i];
            }
            a.mul_vec_into(&z, &mut t);
            let tt = dot(&t, &t);
            if tt == 0.0 {
                broke = true;
                break;
            }
            omega = dot(&t, &s) / tt;
            for i in 0..n {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            rho = rho_new;
            rnorm = norm2(&r);
            if rnorm <= 0.1 * target || omega == 0.0 {
                break;
            }
        }
        a.mul_vec_into(&x, &mut ax);
        let true_res = b.iter().zip(&ax).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        if true_res <= target {
            return Ok(IterativeOutcome { x, iterations: total, residual: true_res });
        }
        if total >= max_iter {
            return Err(Error::NotConverged { method: "bicgstab", iterations: total, residual: true_res });
        }
        if broke && true_res >= rnorm {
            // restart from the current iterate with a fresh shadow residual
            continue;
        }
    }
    a.mul_vec_into(&x, &mut ax);
    let res = b.iter().zip(&ax).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    Err(Error::Breakdown { method: "bicgstab", iterations: total, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convection_diffusion_1d() {
        let n = 40;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.3));
            }
            if i + 1 < n {
                t.push((i, i + 1, -0.7));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b = vec![1.0; n];
        let out = bicgstab(&a, &b, &vec![0.0; n], 1e-12, 1000).unwrap();
        assert!(super::super::residual_norm(&a, &out.x, &b) <= 1e-12 * (1.0 + norm2(&b)));
    }
}
