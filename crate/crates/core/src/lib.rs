//! Parametric PDE solution maps, explicit Lipschitz decoders, and width /
//! entropy estimators on P1 finite elements.

pub mod decoders;
pub mod error;
pub mod exec;
pub mod fem;
pub mod linalg;
pub mod params;
pub mod pde;
pub mod rng;
pub mod width;

pub use error::{Error, Result};
pub use exec::Execution;
