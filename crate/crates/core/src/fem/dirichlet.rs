use super::{Mesh, NodeClass};
use crate::linalg::CsrMatrix;
use crate::{Error, Result};

/// Pin set of the classical homogeneous Dirichlet problem.
pub const OUTER: &[NodeClass] = &[NodeClass::OuterBoundary];
/// Pin set of the extended problem on the master domain.
pub const EXTENDED: &[NodeClass] = &[NodeClass::OuterBoundary, NodeClass::Interface];

/// Map between full node numbering and free (unpinned) unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    free: Vec<usize>,
    full_to_free: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, pin: &[NodeClass]) -> Result<Self> {
        if pin.is_empty() {
            return Err(Error::InvalidInput("pin set must be nonempty".into()));
        }
        let mut free = Vec::new();
        let mut full_to_free = vec![None; mesh.node_count()];
        for (i, c) in mesh.classes().iter().enumerate() {
            if !pin.contains(c) {
                full_to_free[i] = Some(free.len());
                free.push(i);
            }
        }
        if free.is_empty() {
            return Err(Error::EmptySystem);
        }
        Ok(Self { free, full_to_free })
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_full(&self) -> usize {
        self.full_to_free.len()
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.full_to_free[i].is_none()
    }

    pub fn free_index(&self, i: usize) -> Option<usize> {
        self.full_to_free[i]
    }

    pub fn reduce(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| full[i]).collect()
    }

    /// Full-length vector with exact zeros at pinned nodes.
    pub fn reconstruct(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_full()];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = reduced[k];
        }
        out
    }

    pub fn reduce_matrix(&self, m: &CsrMatrix) -> CsrMatrix {
        m.principal_submatrix(&self.free)
    }
}

#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub map: DofMap,
}

/// Eliminate homogeneous Dirichlet rows and columns of the pinned classes.
pub fn apply_dirichlet(matrix: &CsrMatrix, rhs: &[f64], mesh: &Mesh, pin: &[NodeClass]) -> Result<ReducedSystem> {
    if matrix.nrows() != mesh.node_count() || rhs.len() != mesh.node_count() {
        return Err(Error::DimensionMismatch { expected: mesh.node_count(), got: rhs.len().min(matrix.nrows()) });
    }
    let map = DofMap::new(mesh, pin)?;
    Ok(ReducedSystem { matrix: map.reduce_matrix(matrix), rhs: map.reduce(rhs), map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_elliptic, build_rect_mesh, CoefficientField, RectInterface};
    use std::f64::consts::PI;

    #[test]
    fn reconstruct_has_exact_zeros() {
        let mesh = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 4, 4, None).unwrap();
        let map = DofMap::new(&mesh, OUTER).unwrap();
        assert_eq!(map.n_free(), 9);
        let full: Vec<f64> = (0..25).map(|i| i as f64 + 1.0).collect();
        let back = map.reconstruct(&map.reduce(&full));
        for (i, v) in back.iter().enumerate() {
            if map.is_pinned(i) {
                assert_eq!(*v, 0.0);
            } else {
                assert_eq!(*v, full[i]);
            }
        }
    }

    #[test]
    fn all_pinned_is_empty() {
        let mesh = build_rect_mesh((0.0, 1.0, 0.0, 1.0), 2, 2, None).unwrap();
        assert!(matches!(
            DofMap::new(&mesh, &[NodeClass::OuterBoundary, NodeClass::Interior]),
            Err(Error::EmptySystem)
        ));
        assert!(DofMap::new(&mesh, &[]).is_err());
    }

    #[test]
    fn hole_blocks_decouple() {
        let mesh = build_rect_mesh(
            (-PI, PI, -PI, PI),
            8,
            8,
            Some(RectInterface::Rectangle { x_lo: -PI / 2.0, x_hi: PI / 2.0, y_lo: -PI / 2.0, y_hi: PI / 2.0 }),
        )
        .unwrap();
        let k = assemble_elliptic(&mesh, &CoefficientField::identity(), None).unwrap();
        let sys = apply_dirichlet(&k, &vec![0.0; mesh.node_count()], &mesh, EXTENDED).unwrap();
        let inside = |i: usize| {
            let p = mesh.nodes()[sys.map.free()[i]];
            p[0].abs() < PI / 2.0 && p[1].abs() < PI / 2.0
        };
        for i in 0..sys.matrix.nrows() {
            let (cols, vals) = sys.matrix.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if inside(i) != inside(j) {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }
}
