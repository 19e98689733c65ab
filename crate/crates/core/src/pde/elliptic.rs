use super::TransformFamily;
use crate::fem::{
    apply_dirichlet, assemble_elliptic, assemble_load, map_mesh, overlay_l2_distance, CoefficientField, Mesh, NodeClass, Snapshot,
    EXTENDED, OUTER,
};
use crate::linalg::{solve_linear, DEFAULT_TOL};
use crate::Result;
use std::sync::Arc;

/// Galerkin solve of `−∇·(a∇u) + cu = f` with `u = 0` on the pinned nodes;
/// returns full nodal values.
pub fn solve_elliptic(mesh: &Mesh, pin: &[NodeClass], a: &CoefficientField, c: Option<&CoefficientField>, f: &CoefficientField) -> Result<Vec<f64>> {
    let k = assemble_elliptic(mesh, a, c)?;
    let load = assemble_load(mesh, f, 0.0)?;
    let sys = apply_dirichlet(&k, &load, mesh, pin)?;
    if sys.rhs.iter().all(|v| *v == 0.0) {
        return Ok(vec![0.0; mesh.node_count()]);
    }
    let x = solve_linear(&sys.matrix, &sys.rhs, true, DEFAULT_TOL)?;
    Ok(sys.map.reconstruct(&x))
}

/// Fixed-domain problem with the outer boundary pinned.
pub fn solve_elliptic_fixed(a: &CoefficientField, c: Option<&CoefficientField>, f: &CoefficientField, mesh: &Mesh) -> Result<Snapshot> {
    Ok(Snapshot::stationary(mesh, solve_elliptic(mesh, OUTER, a, c, f)?))
}

/// Extended solution on a transported mesh.
#[derive(Debug, Clone)]
pub struct VarDomainSolution {
    pub mesh: Arc<Mesh>,
    pub snapshot: Snapshot,
}

impl VarDomainSolution {
    pub fn values(&self) -> &[f64] {
        &self.snapshot.values
    }
}

/// Map `ref_mesh` by `T_λ`, pin outer boundary and interface, solve.
pub fn solve_elliptic_vardomain(
    a: &CoefficientField,
    f: &CoefficientField,
    lambda: &[f64],
    family: &TransformFamily,
    ref_mesh: &Mesh,
) -> Result<VarDomainSolution> {
    let t = family.transform(lambda)?;
    let mesh = Arc::new(map_mesh(ref_mesh, &t)?);
    let values = solve_elliptic(&mesh, EXTENDED, a, None, f)?;
    let snapshot = Snapshot::stationary(&mesh, values);
    Ok(VarDomainSolution { mesh, snapshot })
}

/// L² distance on the master domain between solutions on two meshes.
pub fn l2_distance_crossmesh(s1: &VarDomainSolution, s2: &VarDomainSolution) -> Result<f64> {
    overlay_l2_distance(&s1.mesh, s1.values(), &s2.mesh, s2.values())
}
