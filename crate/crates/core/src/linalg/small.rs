pub type Mat2 = [[f64; 2]; 2];

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Eigenvalues (lo, hi) of the symmetric part of `m`.
pub fn sym2_eigenvalues(m: &Mat2) -> (f64, f64) {
    let a = m[0][0];
    let c = m[1][1];
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - rad, mean + rad)
}

/// Largest singular value of a 2x2 matrix.
pub fn spectral_norm2(m: &Mat2) -> f64 {
    let f2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let d = det2(m);
    let disc = (f2 * f2 - 4.0 * d * d).max(0.0);
    ((f2 + disc.sqrt()) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_minus_identity() {
        let t: f64 = 0.1;
        let m = [[t.cos() - 1.0, -t.sin()], [t.sin(), t.cos() - 1.0]];
        assert!((spectral_norm2(&m) - 2.0 * (t / 2.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn eigen_of_diag() {
        assert_eq!(sym2_eigenvalues(&[[3.0, 0.0], [0.0, 1.0]]), (1.0, 3.0));
        let inv = inv2(&[[2.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(inv, [[1.0, -1.0], [-1.0, 2.0]]);
    }
}
