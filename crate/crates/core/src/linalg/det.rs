use nalgebra::DMatrix;

/// `(1−α)^d`, `det(I+Q)`, `(1+α)^d` with `α = ‖Q‖₂`.
#[derive(Debug, Clone, Copy)]
pub struct DetBounds {
    pub alpha: f64,
    pub lower: f64,
    pub det: f64,
    pub upper: f64,
}

impl DetBounds {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.det + tol && self.det <= self.upper + tol
    }
}

/// Determinant of `I + Q` with the spectral-norm sandwich.
pub fn perturbed_identity_det(q: &DMatrix<f64>) -> DetBounds {
    let d = q.nrows();
    assert_eq!(d, q.ncols(), "Q must be square");
    let alpha = q.clone().svd(false, false).singular_values.max();
    let m = DMatrix::<f64>::identity(d, d) + q;
    DetBounds {
        alpha,
        lower: (1.0 - alpha).powi(d as i32),
        det: m.determinant(),
        upper: (1.0 + alpha).powi(d as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_attains_bounds() {
        let q = DMatrix::from_diagonal_element(3, 3, 0.5);
        let b = perturbed_identity_det(&q);
        assert!((b.det - b.upper).abs() < 1e-14);
        let q = DMatrix::from_diagonal_element(2, 2, -0.5);
        let b = perturbed_identity_det(&q);
        assert!((b.det - b.lower).abs() < 1e-14);
    }
}
