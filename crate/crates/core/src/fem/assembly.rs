use super::field::check_ellipticity;
use super::quadrature::{map_point, GAUSS3};
use super::{CoefficientField, FieldKind, FieldValue, Mesh};
use crate::linalg::CsrMatrix;
use crate::{Error, Result};

/// Affine data of one triangle: area and barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

pub fn triangle_geometry(mesh: &Mesh, t: usize) -> TriangleGeometry {
    let v = mesh.vertices(t);
    let area = mesh.area(t);
    let inv = 1.0 / (2.0 * area);
    let mut grads = [[0.0; 2]; 3];
    for i in 0..3 {
        let (p, q) = (v[(i + 1) % 3], v[(i + 2) % 3]);
        grads[i] = [(p[1] - q[1]) * inv, (q[0] - p[0]) * inv];
    }
    TriangleGeometry { vertices: v, area, grads }
}

/// Zero matrix with the P1 node-adjacency pattern.
pub fn pattern_matrix(mesh: &Mesh) -> CsrMatrix {
    let n = mesh.node_count();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in mesh.triangles() {
        for &i in t {
            rows[i].extend_from_slice(t);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    CsrMatrix::from_pattern(n, &rows)
}

fn scatter(m: &mut CsrMatrix, tri: &[usize; 3], local: &[[f64; 3]; 3]) {
    for a in 0..3 {
        for b in 0..3 {
            m.add_at(tri[a], tri[b], local[a][b]);
        }
    }
}

/// `∫ (∇u)ᵀ a ∇v + c u v` over all nodes, no Dirichlet elimination.
pub fn assemble_elliptic(mesh: &Mesh, a: &CoefficientField, c: Option<&CoefficientField>) -> Result<CsrMatrix> {
    assemble_elliptic_at(mesh, a, c, 0.0)
}

pub fn assemble_elliptic_at(mesh: &Mesh, a: &CoefficientField, c: Option<&CoefficientField>, t: f64) -> Result<CsrMatrix> {
    a.expect_kind(FieldKind::SymMatrix2, "diffusion a")?;
    if let Some(c) = c {
        c.expect_kind(FieldKind::Scalar, "reaction c")?;
    }
    let mut m = pattern_matrix(mesh);
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let g = triangle_geometry(mesh, ti);
        let mut local = [[0.0; 3]; 3];
        for (bary, w) in GAUSS3.iter() {
            let x = map_point(&g.vertices, bary);
            let FieldValue::Matrix(am) = a.checked_value(x, t, "diffusion a")? else { unreachable!() };
            check_ellipticity(&am, a.ellipticity(), x)?;
            let wa = w * g.area;
            let cq = match c {
                Some(c) => {
                    let v = c.checked_value(x, t, "reaction c")?;
                    let FieldValue::Scalar(v) = v else { unreachable!() };
                    v
                }
                None => 0.0,
            };
            for i in 0..3 {
                let agi = [
                    am[0][0] * g.grads[i][0] + am[0][1] * g.grads[i][1],
                    am[1][0] * g.grads[i][0] + am[1][1] * g.grads[i][1],
                ];
                for j in 0..3 {
                    local[j][i] += wa * (agi[0] * g.grads[j][0] + agi[1] * g.grads[j][1]);
                    if cq != 0.0 {
                        local[i][j] += wa * cq * bary[i] * bary[j];
                    }
                }
            }
        }
        scatter(&mut m, tri, &local);
    }
    Ok(m)
}

/// Mass matrix `∫ c u v`; `c = None` gives the exact P1 mass matrix.
pub fn assemble_mass(mesh: &Mesh, c: Option<&CoefficientField>) -> Result<CsrMatrix> {
    let mut m = pattern_matrix(mesh);
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.area(ti);
        let mut local = [[0.0; 3]; 3];
        match c {
            None => {
                for (i, row) in local.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                    }
                }
            }
            Some(c) => {
                c.expect_kind(FieldKind::Scalar, "mass weight")?;
                let v = mesh.vertices(ti);
                for (bary, w) in GAUSS3.iter() {
                    let x = map_point(&v, bary);
                    let FieldValue::Scalar(cq) = c.checked_value(x, 0.0, "mass weight")? else { unreachable!() };
                    for i in 0..3 {
                        for j in 0..3 {
                            local[i][j] += w * area * cq * bary[i] * bary[j];
                        }
                    }
                }
            }
        }
        scatter(&mut m, tri, &local);
    }
    Ok(m)
}

/// `∫ v bᵀ∇u + c u v` at time `t`; row = test function, column = trial.
pub fn assemble_advection_reaction(mesh: &Mesh, b: &CoefficientField, c: &CoefficientField, t: f64) -> Result<CsrMatrix> {
    b.expect_kind(FieldKind::Vector2, "drift b")?;
    c.expect_kind(FieldKind::Scalar, "reaction c")?;
    let mut m = pattern_matrix(mesh);
    if b.is_zero() && c.is_zero() {
        return Ok(m);
    }
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let g = triangle_geometry(mesh, ti);
        let mut local = [[0.0; 3]; 3];
        for (bary, w) in GAUSS3.iter() {
            let x = map_point(&g.vertices, bary);
            let FieldValue::Vector(bq) = b.checked_value(x, t, "drift b")? else { unreachable!() };
            let FieldValue::Scalar(cq) = c.checked_value(x, t, "reaction c")? else { unreachable!() };
            let wa = w * g.area;
            for i in 0..3 {
                for j in 0..3 {
                    let adv = bq[0] * g.grads[j][0] + bq[1] * g.grads[j][1];
                    local[i][j] += wa * bary[i] * (adv + cq * bary[j]);
                }
            }
        }
        scatter(&mut m, tri, &local);
    }
    Ok(m)
}

/// Load vector `∫ f φᵢ` at time `t`.
pub fn assemble_load(mesh: &Mesh, f: &CoefficientField, t: f64) -> Result<Vec<f64>> {
    f.expect_kind(FieldKind::Scalar, "load f")?;
    let mut out = vec![0.0; mesh.node_count()];
    if f.is_zero() {
        return Ok(out);
    }
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let v = mesh.vertices(ti);
        let area = mesh.area(ti);
        for (bary, w) in GAUSS3.iter() {
            let x = map_point(&v, bary);
            let FieldValue::Scalar(fq) = f.checked_value(x, t, "load f")? else { unreachable!() };
            for i in 0..3 {
                out[tri[i]] += w * area * fq * bary[i];
            }
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite load vector".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::build_rect_mesh;

    fn unit(n: usize) -> Mesh {
        build_rect_mesh((0.0, 1.0, 0.0, 1.0), n, n, None).unwrap()
    }

    /// Cotangent-formula oracle for the unit-coefficient stiffness.
    fn cot_stiffness(mesh: &Mesh) -> Vec<Vec<f64>> {
        let n = mesh.node_count();
        let mut k = vec![vec![0.0; n]; n];
        for t in mesh.triangles() {
            let p: Vec<[f64; 2]> = t.iter().map(|&i| mesh.nodes()[i]).collect();
            for c in 0..3 {
                // angle at vertex c opposite edge (a, b)
                let (a, b) = ((c + 1) % 3, (c + 2) % 3);
                let u = [p[a][0] - p[c][0], p[a][1] - p[c][1]];
                let v = [p[b][0] - p[c][0], p[b][1] - p[c][1]];
                let cot = (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]).abs();
                let (ia, ib) = (t[a], t[b]);
                k[ia][ib] -= 0.5 * cot;
                k[ib][ia] -= 0.5 * cot;
                k[ia][ia] += 0.5 * cot;
                k[ib][ib] += 0.5 * cot;
            }
        }
        k
    }

    #[test]
    fn laplacian_matches_cotangent_oracle() {
        let mesh = unit(2);
        let k = assemble_elliptic(&mesh, &CoefficientField::identity(), None).unwrap().to_dense();
        let oracle = cot_stiffness(&mesh);
        for i in 0..9 {
            for j in 0..9 {
                assert!((k[i][j] - oracle[i][j]).abs() < 1e-14, "({i},{j})");
            }
        }
        // centre node: sum over its 8 right triangles of the right-angle vertex
        assert!((k[4][4] - 4.0).abs() < 1e-14);
        assert!(k.iter().all(|r| r.iter().sum::<f64>().abs() < 1e-14));
    }

    #[test]
    fn scaling_and_symmetry() {
        let mesh = unit(6);
        let k1 = assemble_elliptic(&mesh, &CoefficientField::identity(), None).unwrap();
        let k3 = assemble_elliptic(&mesh, &CoefficientField::scaled_identity(3.0), None).unwrap();
        for (a, b) in k1.values().iter().zip(k3.values()) {
            assert!((3.0 * a - b).abs() < 1e-13);
        }
        let a = CoefficientField::matrix(|x| [[1.5 + 0.2 * x[0], 0.1], [0.1, 1.2 + x[1] * 0.3]]);
        assert!(assemble_elliptic(&mesh, &a, None).unwrap().is_symmetric(1e-12));
    }

    #[test]
    fn unit_reaction_is_exact_mass() {
        let mesh = unit(4);
        let eps = CoefficientField::scaled_identity(1e-300);
        let m1 = assemble_elliptic(&mesh, &eps, Some(&CoefficientField::constant(1.0))).unwrap();
        let m = assemble_mass(&mesh, None).unwrap();
        for (a, b) in m1.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let total: f64 = m.values().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let b0 = assemble_advection_reaction(&mesh, &CoefficientField::zero_vector(), &CoefficientField::constant(1.0), 0.0)
            .unwrap();
        for (a, b) in b0.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = assemble_advection_reaction(&mesh, &CoefficientField::zero_vector(), &CoefficientField::zero_scalar(), 0.0)
            .unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn drift_of_linear_function() {
        // ∫ v ∂₁u with u = x₁: equals ∫ v; summing rows gives ∫ 1 = 1
        let mesh = unit(5);
        let b = CoefficientField::vector(|_| [1.0, 0.0]);
        let m = assemble_advection_reaction(&mesh, &b, &CoefficientField::zero_scalar(), 0.0).unwrap();
        let u: Vec<f64> = mesh.nodes().iter().map(|p| p[0]).collect();
        let bu = m.mul_vec(&u);
        assert!((bu.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // with v = x₂ as test: ∫ x₂ dx = 1/2
        let v: Vec<f64> = mesh.nodes().iter().map(|p| p[1]).collect();
        assert!((crate::linalg::dot(&v, &bu) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn load_of_constant() {
        let mesh = unit(3);
        let f = assemble_load(&mesh, &CoefficientField::constant(2.0), 0.0).unwrap();
        assert!((f.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
