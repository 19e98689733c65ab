//! Width and entropy estimators, bound chains, the constants ledger and
//! empirical Lipschitz checks.

mod bounds;
mod constants;
mod entropy;
mod kolmogorov;
mod lipschitz;
mod report;

pub use bounds::{bound_chain, holder_transfer, ChainExample, ExampleId};
pub use constants::{
    c1_parabolic, c_b, c_j, c_vardomain, delta0, theory_constants, AdvectionConstants, ConstantEntry, ConstantsConfig, ConstantsLedger,
    Domain,
};
pub use entropy::{entropy_greedy, entropy_grid_cover, min_admissible_n, GreedyCover, GridCover};
pub use kolmogorov::{kolmogorov_width_svd, PodWidths};
pub use lipschitz::{empirical_lipschitz, empirical_lipschitz_pairs, LipschitzReport, PairRatio};
pub use report::{fit_decay_exponent, fit_log2_slope, fmt_f64, to_csv, Semantics, WidthMethod, WidthReport, CSV_HEADER, FIT_SKIP};
