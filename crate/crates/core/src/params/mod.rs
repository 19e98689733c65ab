//! Parameter sets, their metrics and the affine embeddings used by the
//! explicit decoder constructions.

mod embed;
mod metric;
mod pwl;
mod sets;

pub use embed::{basis_expansion_embed, grid_field_embed, sequence_truncate_embed, BasisExpansionEmbed, Combine, GridFieldEmbed, SequenceTruncateEmbed};
pub use metric::{MetricPart, ParamMetric};
pub use pwl::PiecewiseLinear;
pub use sets::ConvexSet;

/// Weight profiles for weighted-ellipsoid parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightProfile {
    /// `w_k = k^-2`
    #[default]
    InverseSquare,
    /// `w_k = 2^(1-k)`
    Geometric,
}

impl WeightProfile {
    pub fn weight(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            WeightProfile::InverseSquare => 1.0 / (k * k),
            WeightProfile::Geometric => 2f64.powf(1.0 - k),
        }
    }

    /// `w_1, …, w_len`
    pub fn weights(self, len: usize) -> Vec<f64> {
        (1..=len).map(|k| self.weight(k)).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightProfile::InverseSquare => "k^-2",
            WeightProfile::Geometric => "2^(1-k)",
        }
    }
}
