use crate::linalg::{sym2_eigenvalues, Mat2};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector2,
    SymMatrix2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue {
    Scalar(f64),
    Vector([f64; 2]),
    Matrix(Mat2),
}

impl FieldValue {
    fn is_finite(&self) -> bool {
        match self {
            FieldValue::Scalar(v) => v.is_finite(),
            FieldValue::Vector(v) => v.iter().all(|x| x.is_finite()),
            FieldValue::Matrix(m) => m.iter().flatten().all(|x| x.is_finite()),
        }
    }
}

type Eval = Arc<dyn Fn([f64; 2], f64) -> FieldValue + Send + Sync>;

/// Evaluable spatial or space-time coefficient.
#[derive(Clone)]
pub struct CoefficientField {
    kind: FieldKind,
    time_dependent: bool,
    eval: Eval,
    lipschitz_hint: Option<f64>,
    ellipticity: Option<(f64, f64)>,
    zero: bool,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("kind", &self.kind)
            .field("time_dependent", &self.time_dependent)
            .field("lipschitz_hint", &self.lipschitz_hint)
            .field("ellipticity", &self.ellipticity)
            .field("zero", &self.zero)
            .finish()
    }
}

impl CoefficientField {
    fn new(kind: FieldKind, time_dependent: bool, eval: Eval) -> Self {
        Self { kind, time_dependent, eval, lipschitz_hint: None, ellipticity: None, zero: false }
    }

    pub fn scalar(f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::Scalar, false, Arc::new(move |x, _| FieldValue::Scalar(f(x))))
    }

    pub fn scalar_t(f: impl Fn([f64; 2], f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::Scalar, true, Arc::new(move |x, t| FieldValue::Scalar(f(x, t))))
    }

    pub fn constant(c: f64) -> Self {
        let mut s = Self::scalar(move |_| c).with_lipschitz(0.0);
        s.zero = c == 0.0;
        s
    }

    pub fn zero_scalar() -> Self {
        Self::constant(0.0)
    }

    pub fn vector(f: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::Vector2, false, Arc::new(move |x, _| FieldValue::Vector(f(x))))
    }

    pub fn vector_t(f: impl Fn([f64; 2], f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::Vector2, true, Arc::new(move |x, t| FieldValue::Vector(f(x, t))))
    }

    pub fn zero_vector() -> Self {
        let mut v = Self::vector(|_| [0.0, 0.0]).with_lipschitz(0.0);
        v.zero = true;
        v
    }

    pub fn matrix(f: impl Fn([f64; 2]) -> Mat2 + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::SymMatrix2, false, Arc::new(move |x, _| FieldValue::Matrix(f(x))))
    }

    pub fn matrix_t(f: impl Fn([f64; 2], f64) -> Mat2 + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::SymMatrix2, true, Arc::new(move |x, t| FieldValue::Matrix(f(x, t))))
    }

    /// `s(x) I`.
    pub fn isotropic(s: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self::matrix(move |x| {
            let v = s(x);
            [[v, 0.0], [0.0, v]]
        })
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::isotropic(move |_| s).with_lipschitz(0.0).with_ellipticity(s, s)
    }

    pub fn identity() -> Self {
        Self::scaled_identity(1.0)
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_hint = Some(l);
        self
    }

    pub fn with_ellipticity(mut self, r: f64, big_r: f64) -> Self {
        self.ellipticity = Some((r, big_r));
        self
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn ellipticity(&self) -> Option<(f64, f64)> {
        self.ellipticity
    }

    /// True only for fields constructed as identically zero.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn value(&self, x: [f64; 2], t: f64) -> FieldValue {
        (self.eval)(x, t)
    }

    pub fn checked_value(&self, x: [f64; 2], t: f64, what: &'static str) -> Result<FieldValue> {
        let v = self.value(x, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { what, x: x[0], y: x[1] })
        }
    }

    pub fn scalar_at(&self, x: [f64; 2], t: f64) -> f64 {
        match self.value(x, t) {
            FieldValue::Scalar(v) => v,
            other => panic!("expected scalar field, got {other:?}"),
        }
    }

    pub fn vector_at(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        match self.value(x, t) {
            FieldValue::Vector(v) => v,
            other => panic!("expected vector field, got {other:?}"),
        }
    }

    pub fn matrix_at(&self, x: [f64; 2], t: f64) -> Mat2 {
        match self.value(x, t) {
            FieldValue::Matrix(m) => m,
            other => panic!("expected matrix field, got {other:?}"),
        }
    }

    pub fn expect_kind(&self, kind: FieldKind, role: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{role} must be {kind:?}, got {:?}", self.kind)))
        }
    }

    /// Symmetry and ellipticity on an `n x n` grid over `bbox` at time `t`.
    pub fn check_invariants(&self, bbox: [f64; 4], n: usize, t: f64) -> Result<()> {
        for i in 0..n {
            for j in 0..n {
                let x = [
                    bbox[0] + (bbox[1] - bbox[0]) * (i as f64 + 0.5) / n as f64,
                    bbox[2] + (bbox[3] - bbox[2]) * (j as f64 + 0.5) / n as f64,
                ];
                let v = self.checked_value(x, t, "coefficient")?;
                if let FieldValue::Matrix(m) = v {
                    let scale = m.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
                    if (m[0][1] - m[1][0]).abs() > 1e-14 * scale {
                        return Err(Error::InvalidInput(format!("matrix field not symmetric at {x:?}")));
                    }
                    check_ellipticity(&m, self.ellipticity, x)?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_ellipticity(m: &Mat2, bounds: Option<(f64, f64)>, x: [f64; 2]) -> Result<()> {
    let (lo, hi) = sym2_eigenvalues(m);
    let (r, big_r) = bounds.unwrap_or((f64::MIN_POSITIVE, f64::INFINITY));
    let slack = 1e-12 * big_r.min(1e12).max(1.0);
    if lo < r - slack || hi > big_r + slack || lo <= 0.0 {
        return Err(Error::Ellipticity { x: x[0], y: x[1], lo, hi, r, big_r });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_detect_violations() {
        let a = CoefficientField::isotropic(|x| 1.0 + x[0]).with_ellipticity(1.0, 2.0);
        assert!(a.check_invariants([0.0, 1.0, 0.0, 1.0], 8, 0.0).is_ok());
        assert!(a.check_invariants([0.0, 2.0, 0.0, 1.0], 8, 0.0).is_err());
        let skew = CoefficientField::matrix(|_| [[1.0, 0.1], [0.0, 1.0]]);
        assert!(skew.check_invariants([0.0, 1.0, 0.0, 1.0], 2, 0.0).is_err());
        let nan = CoefficientField::scalar(|_| f64::NAN);
        assert!(matches!(nan.check_invariants([0.0, 1.0, 0.0, 1.0], 2, 0.0), Err(Error::NonFinite { .. })));
    }
}
