use super::locate::{barycentric, PointLocator};
use super::quadrature::{map_point, GAUSS3};
use super::Mesh;
use crate::exec::{map_indexed, Execution};
use crate::{Error, Result};

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Sutherland-Hodgman clip of a convex polygon against a counterclockwise triangle.
fn clip(subject: &[[f64; 2]], tri: &[[f64; 2]; 3]) -> Vec<[f64; 2]> {
    let mut poly = subject.to_vec();
    for k in 0..3 {
        if poly.is_empty() {
            break;
        }
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let input = std::mem::take(&mut poly);
        for i in 0..input.len() {
            let p = input[i];
            let q = input[(i + 1) % input.len()];
            let sp = cross(a, b, p);
            let sq = cross(a, b, q);
            if sp >= 0.0 {
                poly.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let s = sp / (sp - sq);
                poly.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
    }
    poly
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let mut a = 0.0;
    for i in 1..p.len().saturating_sub(1) {
        a += 0.5 * cross(p[0], p[i], p[i + 1]);
    }
    a
}

fn linear(v: &[[f64; 2]; 3], vals: [f64; 3], p: [f64; 2]) -> f64 {
    let l = barycentric(v, p);
    l[0] * vals[0] + l[1] * vals[1] + l[2] * vals[2]
}

fn own_square_integral(area: f64, v: [f64; 3]) -> f64 {
    area / 6.0 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[0] * v[1] + v[1] * v[2] + v[0] * v[2])
}

fn uncovered(own: f64, overlap: f64, covered: f64, area: f64) -> f64 {
    if (covered - area).abs() <= 1e-12 * area {
        0.0
    } else {
        (own - overlap).max(0.0)
    }
}

struct Piece {
    diff2: f64,
    own1: f64,
    cover1: f64,
    hits: Vec<(usize, f64, f64)>,
}

/// `‖u₁ − u₂‖_{L²}` for P1 functions on two different triangulations of
/// (nearly) the same region, outside a mesh the function is zero.
///
/// Both meshes are overlaid exactly: on each intersection polygon both
/// functions are linear, so the 3-point rule on a fan of the polygon is exact.
pub fn overlay_l2_distance(m1: &Mesh, v1: &[f64], m2: &Mesh, v2: &[f64]) -> Result<f64> {
    if v1.len() != m1.node_count() {
        return Err(Error::DimensionMismatch { expected: m1.node_count(), got: v1.len() });
    }
    if v2.len() != m2.node_count() {
        return Err(Error::DimensionMismatch { expected: m2.node_count(), got: v2.len() });
    }
    let loc = PointLocator::new(m2);
    let pieces = map_indexed(Execution::Parallel, m1.triangle_count(), |t1| {
        let tv1 = m1.vertices(t1);
        let n1 = m1.triangles()[t1];
        let vals1 = [v1[n1[0]], v1[n1[1]], v1[n1[2]]];
        let a1 = m1.area(t1);
        let bb = [
            tv1[0][0].min(tv1[1][0]).min(tv1[2][0]),
            tv1[0][0].max(tv1[1][0]).max(tv1[2][0]),
            tv1[0][1].min(tv1[1][1]).min(tv1[2][1]),
            tv1[0][1].max(tv1[1][1]).max(tv1[2][1]),
        ];
        let mut piece = Piece { diff2: 0.0, own1: 0.0, cover1: 0.0, hits: Vec::new() };
        for t2 in loc.candidates(bb) {
            let tv2 = m2.vertices(t2);
            let poly = clip(&tv1, &tv2);
            if poly.len() < 3 || polygon_area(&poly) <= 1e-14 * a1 {
                continue;
            }
            let n2 = m2.triangles()[t2];
            let vals2 = [v2[n2[0]], v2[n2[1]], v2[n2[2]]];
            let (mut d2, mut s1, mut s2, mut area) = (0.0, 0.0, 0.0, 0.0);
            for i in 1..poly.len() - 1 {
                let sub = [poly[0], poly[i], poly[i + 1]];
                let sa = 0.5 * cross(sub[0], sub[1], sub[2]);
                if sa <= 0.0 {
                    continue;
                }
                area += sa;
                for (bary, w) in GAUSS3.iter() {
                    let p = map_point(&sub, bary);
                    let f1 = linear(&tv1, vals1, p);
                    let f2 = linear(&tv2, vals2, p);
                    d2 += sa * w * (f1 - f2) * (f1 - f2);
                    s1 += sa * w * f1 * f1;
                    s2 += sa * w * f2 * f2;
                }
            }
            piece.diff2 += d2;
            piece.own1 += s1;
            piece.cover1 += area;
            piece.hits.push((t2, s2, area));
        }
        let rest = uncovered(own_square_integral(a1, vals1), piece.own1, piece.cover1, a1);
        piece.diff2 += rest;
        piece
    });

    let mut total = 0.0;
    let mut over2 = vec![0.0; m2.triangle_count()];
    let mut cover2 = vec![0.0; m2.triangle_count()];
    for p in &pieces {
        total += p.diff2;
        for &(t2, s2, area) in &p.hits {
            over2[t2] += s2;
            cover2[t2] += area;
        }
    }
    for t2 in 0..m2.triangle_count() {
        let n2 = m2.triangles()[t2];
        let a2 = m2.area(t2);
        total += uncovered(own_square_integral(a2, [v2[n2[0]], v2[n2[1]], v2[n2[2]]]), over2[t2], cover2[t2], a2);
    }
    Ok(total.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, build_disk_mesh, build_rect_mesh};
    use crate::pde::Transform;

    #[test]
    fn same_mesh_matches_mass_matrix() {
        let mesh = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 9, 7, None).unwrap();
        let m = assemble_mass(&mesh, None).unwrap();
        let v1: Vec<f64> = mesh.nodes().iter().map(|p| (3.0 * p[0]).sin() * p[1]).collect();
        let v2: Vec<f64> = mesh.nodes().iter().map(|p| p[0] * p[0] - p[1]).collect();
        let d: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a - b).collect();
        let oracle = m.quadratic_form(&d).sqrt();
        let got = overlay_l2_distance(&mesh, &v1, &mesh, &v2).unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle.max(1.0));
        assert_eq!(overlay_l2_distance(&mesh, &v1, &mesh, &v1).unwrap(), 0.0);
    }

    #[test]
    fn linear_functions_on_unrelated_meshes() {
        let a = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 4, 4, None).unwrap();
        let b = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 7, 5, None).unwrap();
        let x: Vec<f64> = a.nodes().iter().map(|p| p[0]).collect();
        let y: Vec<f64> = b.nodes().iter().map(|p| p[1]).collect();
        // ∫∫ (x − y)² over the unit square = 1/6
        let d = overlay_l2_distance(&a, &x, &b, &y).unwrap();
        assert!((d - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
        let back = overlay_l2_distance(&b, &y, &a, &x).unwrap();
        assert!((d - back).abs() < 1e-12);
    }

    #[test]
    fn disjoint_parts_count_fully() {
        let a = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 3, 3, None).unwrap();
        let b = build_rect_mesh((0.5, 1.5, 0.0, 1.0), 3, 3, None).unwrap();
        let one_a = vec![1.0; a.node_count()];
        let one_b = vec![1.0; b.node_count()];
        // only the two non-overlapping half-squares differ
        let d = overlay_l2_distance(&a, &one_a, &b, &one_b).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_disk_is_symmetric() {
        let mesh = build_disk_mesh(1.0, 2, None).unwrap();
        let rot = crate::fem::map_mesh(&mesh, &Transform::rotation(0.3)).unwrap();
        let v: Vec<f64> = mesh.nodes().iter().map(|p| 1.0 - p[0] * p[0] - p[1] * p[1]).collect();
        let w: Vec<f64> = rot.nodes().iter().map(|p| p[0] + 0.5).collect();
        let d1 = overlay_l2_distance(&mesh, &v, &rot, &w).unwrap();
        let d2 = overlay_l2_distance(&rot, &w, &mesh, &v).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }
}
