//! Triangle quadrature in barycentric coordinates; weights sum to one.

/// Degree-2 rule with interior points.
pub const GAUSS3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

const A1: f64 = 0.059_715_871_789_770;
const B1: f64 = 0.470_142_064_105_115;
const W1: f64 = 0.132_394_152_788_506;
const A2: f64 = 0.797_426_985_353_087;
const B2: f64 = 0.101_286_507_323_456;
const W2: f64 = 0.125_939_180_544_827;

/// Degree-5 seven-point rule.
pub const DUNAVANT7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([A1, B1, B1], W1),
    ([B1, A1, B1], W1),
    ([B1, B1, A1], W1),
    ([A2, B2, B2], W2),
    ([B2, A2, B2], W2),
    ([B2, B2, A2], W2),
];

pub fn map_point(p: &[[f64; 2]; 3], bary: &[f64; 3]) -> [f64; 2] {
    [
        bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
        bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &[([f64; 3], f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
        // reference triangle (0,0),(1,0),(0,1), area 1/2
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        0.5 * rule.iter().map(|(b, w)| {
            let x = map_point(&tri, b);
            w * f(x[0], x[1])
        }).sum::<f64>()
    }

    #[test]
    fn exactness() {
        // ∫ x^a y^b over reference triangle = a! b! / (a+b+2)!
        assert!((integrate(&GAUSS3, |x, y| x * y) - 1.0 / 24.0).abs() < 1e-15);
        assert!((integrate(&GAUSS3, |x, _| x * x) - 1.0 / 12.0).abs() < 1e-15);
        let w: f64 = DUNAVANT7.iter().map(|r| r.1).sum();
        assert!((w - 1.0).abs() < 1e-12);
        assert!((integrate(&DUNAVANT7, |x, y| x.powi(3) * y * y) - 12.0 / 5040.0).abs() < 1e-12);
    }
}
