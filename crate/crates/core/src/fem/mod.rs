//! P1 finite elements on triangles.

mod assembly;
mod dirichlet;
mod eigen;
mod field;
mod io;
mod locate;
mod mesh;
mod overlay;
pub mod quadrature;
mod space;

pub use assembly::{
    assemble_advection_reaction, assemble_elliptic, assemble_elliptic_at, assemble_load, assemble_mass,
    pattern_matrix, triangle_geometry, TriangleGeometry,
};
pub use dirichlet::{apply_dirichlet, DofMap, ReducedSystem, EXTENDED, OUTER};
pub use eigen::{poincare_constant, poincare_constant_with_tol, PoincareEstimate};
pub use field::{CoefficientField, FieldKind, FieldValue};
pub use io::{read_mesh, write_mesh};
pub use locate::PointLocator;
pub use mesh::{build_disk_mesh, build_rect_mesh, map_mesh, Mesh, NodeClass, Outline, RectInterface};
pub use overlay::overlay_l2_distance;
pub use space::{FemSpace, NormKind, Snapshot};
