use super::{reverse_cuthill_mckee, CsrMatrix};
use crate::{Error, Result};

/// Profile (envelope) Cholesky factorization `P A Pᵀ = L Lᵀ` under an RCM
/// ordering. Row `i` of `L` is stored densely from its first nonzero column.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    l: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        let perm = reverse_cuthill_mckee(a);
        let mut new_of = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            new_of[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &j in a.row(old).0 {
                let jn = new_of[j];
                if jn < first[new] {
                    first[new] = jn;
                }
            }
        }
        // symmetric pattern: column entries contribute to the later row
        for (new, &old) in perm.iter().enumerate() {
            for &j in a.row(old).0 {
                let jn = new_of[j];
                if jn > new && new < first[jn] {
                    first[jn] = new;
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut l = vec![0.0; offset[n]];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&j, &v) in cols.iter().zip(vals) {
                let jn = new_of[j];
                if jn <= new {
                    l[offset[new] + jn - first[new]] += v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let ri = offset[i];
            for j in fi..i {
                let fj = first[j];
                let rj = offset[j];
                let k0 = fi.max(fj);
                let mut s = l[ri + j - fi];
                for k in k0..j {
                    s -= l[ri + k - fi] * l[rj + k - fj];
                }
                l[ri + j - fi] = s / l[rj + j - fj];
            }
            let mut d = l[ri + i - fi];
            let diag_a = d;
            for k in fi..i {
                let v = l[ri + k - fi];
                d -= v * v;
            }
            if !(d > 1e-14 * diag_a.abs()) || !d.is_finite() {
                return Err(Error::Breakdown { method: "cholesky", iterations: i, residual: d });
            }
            l[ri + i - fi] = d.sqrt();
        }
        Ok(Self { n, perm, first, offset, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.offset[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.l[ri + k - fi] * y[k];
            }
            y[i] = s / self.l[ri + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.offset[i];
            let xi = y[i] / self.l[ri + i - fi];
            y[i] = xi;
            for k in fi..i {
                y[k] -= self.l[ri + k - fi] * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// `Lᵀ P v`: a Euclidean embedding with `‖Lᵀ P v‖² = vᵀ A v`.
    pub fn energy_coordinates(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut z = vec![0.0; self.n];
        for i in 0..self.n {
            let w = v[self.perm[i]];
            if w == 0.0 {
                continue;
            }
            let fi = self.first[i];
            let ri = self.offset[i];
            for k in fi..=i {
                z[k] += self.l[ri + k - fi] * w;
            }
        }
        z
    }

    pub fn profile_size(&self) -> usize {
        self.l.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_2d(m: usize) -> CsrMatrix {
        let n = m * m;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let p = i * m + j;
                t.push((p, p, 4.0));
                if i + 1 < m {
                    t.push((p, p + m, -1.0));
                    t.push((p + m, p, -1.0));
                }
                if j + 1 < m {
                    t.push((p, p + 1, -1.0));
                    t.push((p + 1, p, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn solves_grid_laplacian() {
        let a = laplace_2d(7);
        let b: Vec<f64> = (0..49).map(|i| (i as f64 * 0.37).sin()).collect();
        let c = EnvelopeCholesky::factor(&a).unwrap();
        let x = c.solve(&b);
        assert!(super::super::residual_norm(&a, &x, &b) < 1e-12);
        let z = c.energy_coordinates(&b);
        let q = a.quadratic_form(&b);
        assert!((super::super::dot(&z, &z) - q).abs() < 1e-12 * q);
    }
}
