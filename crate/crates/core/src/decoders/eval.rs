use super::{Decoded, Decoder};
use crate::exec::{try_map_indexed, Execution};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct ReconstructionCase {
    pub truth: Decoded,
    /// Latent code, required to lie in the unit ball.
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub cases: usize,
    pub max_error: f64,
    /// `max ‖u − D(z)‖ / ‖u‖` over cases with `u ≠ 0`.
    pub max_relative: f64,
    pub argmax: usize,
    pub errors: Vec<f64>,
    pub note: &'static str,
}

pub const WITNESS_TOL: f64 = 1e-10;

/// Worst case of `‖u − D(z_u)‖` over the given cases, an upper bound for
/// the sup-inf over the sampled set.
pub fn eval_reconstruction(decoder: &Decoder, cases: &[ReconstructionCase], exec: Execution) -> Result<ReconstructionReport> {
    for c in cases {
        let norm = c.witness.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1.0 + WITNESS_TOL {
            return Err(Error::WitnessOutside { norm });
        }
    }
    let pairs = try_map_indexed(exec, cases.len(), |k| -> Result<(f64, f64)> {
        let c = &cases[k];
        let d = decoder.decode(&c.witness)?;
        Ok((decoder.distance(&c.truth, &d)?, decoder.norm(&c.truth)?))
    })?;
    let mut argmax = 0;
    let mut max_error = 0.0;
    let mut max_relative: f64 = 0.0;
    for (k, (e, n)) in pairs.iter().enumerate() {
        if *e > max_error {
            max_error = *e;
            argmax = k;
        }
        if *n > 0.0 {
            max_relative = max_relative.max(e / n);
        }
    }
    Ok(ReconstructionReport {
        cases: cases.len(),
        max_error,
        max_relative,
        argmax,
        errors: pairs.into_iter().map(|p| p.0).collect(),
        note: "decoder ends in the discrete solver; zero width holds to solver tolerance",
    })
}
