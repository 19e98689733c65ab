//! Parametric PDE solution maps: fixed-domain elliptic and parabolic
//! problems, elliptic problems on transported domains, and exact linear
//! advection.

mod advection;
mod elliptic;
pub mod models;
mod parabolic;
mod pushforward;
mod transform;

pub use advection::{adaptive_simpson, advection_distance, solve_advection_exact, solve_advection_pwl, AdvectionSolution};
pub use elliptic::{l2_distance_crossmesh, solve_elliptic, solve_elliptic_fixed, solve_elliptic_vardomain, VarDomainSolution};
pub use models::{
    AdvectionModel, Element, EllipticCellModel, GridDiffusionModel, ParabolicModel, ParabolicSetup, SolutionMap, VarDomainModel,
    VarParamModel,
};
pub use parabolic::{mesh_peclet, solve_parabolic, Load, ParabolicProblem};
pub use pushforward::{default_samples, delta_beta, pushforward_coefficients, DeltaBeta};
pub use transform::{FamilyKind, Transform, TransformFamily};
