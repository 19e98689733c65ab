use nalgebra::DMatrix;
use proptest::prelude::*;
use widthlab::linalg::perturbed_identity_det;
use widthlab::params::{ConvexSet, ParamMetric, PiecewiseLinear};
use widthlab::pde::Transform;
use widthlab::width::{entropy_greedy, entropy_grid_cover, min_admissible_n};
use widthlab::Execution;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn descending(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..3.0f64, dim).prop_map(|mut w| {
        w.sort_by(|a, b| b.total_cmp(a));
        w
    })
}

fn any_set(dim: usize) -> impl Strategy<Value = ConvexSet> {
    let boxed = prop::collection::vec((-2.0..0.0f64, 0.0..2.0f64), dim).prop_map(|b| ConvexSet::Box {
        lo: b.iter().map(|p| p.0).collect(),
        hi: b.iter().map(|p| p.1).collect(),
    });
    let ball = (prop::collection::vec(-1.0..1.0f64, dim), 0.1..2.0f64).prop_map(|(c, r)| ConvexSet::ball(c, r).unwrap());
    let ell = (descending(dim), 0.1..2.0f64).prop_map(|(w, r)| ConvexSet::ellipsoid(w, r).unwrap());
    prop_oneof![boxed, ball, ell]
}

fn compound(dim: usize) -> impl Strategy<Value = ConvexSet> {
    prop_oneof![
        any_set(dim),
        (any_set(dim / 2), any_set(dim - dim / 2)).prop_map(|(a, b)| ConvexSet::product(vec![a, b])),
        (any_set(dim), 1..=dim).prop_filter_map("empty truncation", |(s, k)| ConvexSet::truncation(s, k).ok()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn projection_is_idempotent_and_nonexpansive(
        set in compound(4),
        x in prop::collection::vec(-5.0..5.0f64, 4),
        y in prop::collection::vec(-5.0..5.0f64, 4),
    ) {
        let (px, py) = (set.project(&x), set.project(&y));
        prop_assert!(set.contains(&px, 1e-10));
        let ppx = set.project(&px);
        prop_assert!(dist(&ppx, &px) <= 1e-12 * (1.0 + norm(&px)));
        prop_assert!(dist(&px, &py) <= dist(&x, &y) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn ellipsoid_projection_satisfies_kkt(
        w in descending(3),
        radius in 0.2..2.0f64,
        y in prop::collection::vec(-6.0..6.0f64, 3),
    ) {
        let set = ConvexSet::ellipsoid(w.clone(), radius).unwrap();
        let p = set.project(&y);
        let g: f64 = y.iter().zip(&w).map(|(v, wk)| v * v / wk).sum();
        if g > radius * radius * (1.0 + 1e-9) {
            // on the boundary, y − p = ν ∇(Σ p²/w) / 2 with ν ≥ 0
            let level: f64 = p.iter().zip(&w).map(|(v, wk)| v * v / wk).sum();
            prop_assert!((level - radius * radius).abs() <= 1e-9 * radius * radius);
            let grad: Vec<f64> = p.iter().zip(&w).map(|(v, wk)| v / wk).collect();
            let r: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
            let nu = r.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() / grad.iter().map(|b| b * b).sum::<f64>();
            prop_assert!(nu >= -1e-12);
            for (ri, gi) in r.iter().zip(&grad) {
                prop_assert!((ri - nu * gi).abs() <= 1e-8 * (1.0 + norm(&y)));
            }
        } else {
            prop_assert!(dist(&p, &y) <= 1e-14 * (1.0 + norm(&y)));
        }
    }

    #[test]
    fn perturbed_identity_determinant_bounds(
        d in 2usize..=3,
        entries in prop::collection::vec(-1.0..1.0f64, 9),
        scale in 0.0..0.999f64,
    ) {
        let q = DMatrix::from_fn(d, d, |i, j| entries[i * 3 + j]);
        let s = q.clone().svd(false, false).singular_values.max();
        let q = if s > 0.0 { q * (scale / s) } else { q };
        prop_assert!(perturbed_identity_det(&q).holds(1e-12));
    }

    #[test]
    fn metrics_satisfy_triangle_inequality(
        x in prop::collection::vec(-1.0..1.0f64, 6),
        y in prop::collection::vec(-1.0..1.0f64, 6),
        z in prop::collection::vec(-1.0..1.0f64, 6),
    ) {
        for m in [ParamMetric::Euclidean, ParamMetric::Linf, ParamMetric::CellL2 { measures: vec![0.5; 6] }, ParamMetric::CellMatrixLinf] {
            prop_assert!(m.distance(&x, &x) == 0.0);
            prop_assert!((m.distance(&x, &y) - m.distance(&y, &x)).abs() <= 1e-15);
            prop_assert!(m.distance(&x, &z) <= m.distance(&x, &y) + m.distance(&y, &z) + 1e-12);
        }
    }

    #[test]
    fn pwl_l1_distance_is_norm_of_difference(
        a in prop::collection::vec(1.0..2.0f64, 5),
        b in prop::collection::vec(1.0..2.0f64, 5),
    ) {
        let nodes = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
        let (f, g) = (PiecewiseLinear::new(nodes.clone(), a).unwrap(), PiecewiseLinear::new(nodes, b).unwrap());
        let diff = PiecewiseLinear::combination(&[(1.0, &f), (-1.0, &g)]);
        prop_assert!((f.l1_distance(&g) - diff.l1_norm()).abs() <= 1e-13);
        prop_assert!(f.l1_distance(&g) <= 2.0 * f.linf_distance(&g) + 1e-13);
    }

    #[test]
    fn sine_stretch_inverse_roundtrip(
        l1 in -0.5..0.5f64,
        l2 in -0.5..0.5f64,
        x in -3.1..3.1f64,
        y in -3.1..3.1f64,
    ) {
        let t = Transform::sine_stretch([l1, l2]);
        let p = t.forward([x, y]);
        let q = t.inverse(p);
        prop_assert!((q[0] - x).abs() < 1e-10 && (q[1] - y).abs() < 1e-10);
    }

    #[test]
    fn grid_cover_count_and_bound(mus in prop::collection::vec(0.1..3.0f64, 1..=3), extra in 0usize..10) {
        let n = min_admissible_n(&mus) + extra;
        let g = entropy_grid_cover(&mus, n).unwrap();
        prop_assert!(g.center_count() <= 1u128 << n);
        prop_assert!(g.bound <= 4.0 * mus.len() as f64 * g.delta);
    }

    #[test]
    fn greedy_radius_is_nonincreasing(pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..200)) {
        let e = |a: &(f64, f64), b: &(f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let g = entropy_greedy(&pts, 12, e, Execution::Sequential);
        prop_assert_eq!(g.radii.len(), 13);
        prop_assert!(g.radii.windows(2).all(|w| w[1] <= w[0]));
        let par = entropy_greedy(&pts, 12, e, Execution::Parallel);
        prop_assert_eq!(g, par);
    }
}
