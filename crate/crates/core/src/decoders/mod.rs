//! Composable Lipschitz decoders `ℝⁿ → 𝒦`, the explicit constructions for
//! each shipped example, and reconstruction / width evaluators.

mod eval;
mod paper;
mod search;

pub use eval::{eval_reconstruction, ReconstructionCase, ReconstructionReport};
pub use paper::{paper_decoder, PaperDecoder, PaperSetup, Witness};
pub use search::{estimate_decoder_width, SampleTrace, SearchConfig, SearchMethod, WidthEstimate, HEURISTIC_SEMANTICS};

use crate::params::ConvexSet;
use crate::pde::{Element, SolutionMap};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpace {
    Param,
    Field,
    SnapshotL2,
    SnapshotH10,
    #[serde(rename = "snapshot_l2t_h10")]
    SnapshotL2TH10,
}

/// A decoder output: a point of a Euclidean space or a discrete solution.
#[derive(Debug, Clone)]
pub enum Decoded {
    Point(Vec<f64>),
    Solution(Element),
}

impl Decoded {
    fn point(self) -> Result<Vec<f64>> {
        match self {
            Decoded::Point(p) => Ok(p),
            Decoded::Solution(_) => Err(Error::InvalidInput("stage expects a Euclidean input".into())),
        }
    }
}

#[derive(Clone)]
pub enum Stage {
    /// Metric projection, 1-Lipschitz.
    Project(ConvexSet),
    /// `z ↦ scale·(z, 0) + offset`; pads with zeros up to `offset.len()`.
    Affine { in_dim: usize, scale: f64, offset: Vec<f64> },
    /// `z ↦ (cos πz, sin πz)`
    Circle,
    Solve(Arc<dyn SolutionMap>),
    Constant(Vec<f64>),
}

impl fmt::Debug for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Project(s) => f.debug_tuple("Project").field(s).finish(),
            Stage::Affine { in_dim, scale, offset } => {
                f.debug_struct("Affine").field("in_dim", in_dim).field("scale", scale).field("out_dim", &offset.len()).finish()
            }
            Stage::Circle => f.write_str("Circle"),
            Stage::Solve(m) => f.debug_tuple("Solve").field(&m.name()).finish(),
            Stage::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
        }
    }
}

impl Stage {
    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Project(_) => "projection",
            Stage::Affine { .. } => "affine_embed",
            Stage::Circle => "circle",
            Stage::Solve(_) => "solution_mapping",
            Stage::Constant(_) => "constant",
        }
    }

    /// `None` accepts any dimension.
    pub fn in_dim(&self) -> Option<usize> {
        match self {
            Stage::Project(s) => Some(s.dim()),
            Stage::Affine { in_dim, .. } => Some(*in_dim),
            Stage::Circle => Some(1),
            Stage::Solve(m) => Some(m.param_dim()),
            Stage::Constant(_) => None,
        }
    }

    /// `None` for solution-valued stages.
    pub fn out_dim(&self, input: usize) -> Option<usize> {
        match self {
            Stage::Project(_) => Some(input),
            Stage::Affine { offset, .. } => Some(offset.len()),
            Stage::Circle => Some(2),
            Stage::Solve(_) => None,
            Stage::Constant(c) => Some(c.len()),
        }
    }

    pub fn bound(&self) -> Result<f64> {
        Ok(match self {
            Stage::Project(_) => 1.0,
            Stage::Affine { scale, .. } => scale.abs(),
            Stage::Circle => PI,
            Stage::Solve(m) => m
                .euclidean_factors()
                .ok_or_else(|| Error::InvalidInput(format!("{} has no Euclidean Lipschitz factors", m.name())))?
                .iter()
                .map(|(_, f)| f)
                .product(),
            Stage::Constant(_) => 0.0,
        })
    }

    fn apply(&self, x: Decoded) -> Result<Decoded> {
        Ok(match self {
            Stage::Project(s) => Decoded::Point(s.project(&x.point()?)),
            Stage::Affine { scale, offset, .. } => {
                let p = x.point()?;
                Decoded::Point(offset.iter().enumerate().map(|(i, o)| o + scale * p.get(i).copied().unwrap_or(0.0)).collect())
            }
            Stage::Circle => {
                let (s, c) = (PI * x.point()?[0]).sin_cos();
                Decoded::Point(vec![c, s])
            }
            Stage::Solve(m) => Decoded::Solution(m.solve(&x.point()?)?),
            Stage::Constant(c) => Decoded::Point(c.clone()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Decoder {
    latent_dim: usize,
    stages: Vec<Stage>,
    target: TargetSpace,
    bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageDescription {
    pub kind: &'static str,
    pub bound: f64,
    pub in_dim: Option<usize>,
    pub out_dim: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoderDescription {
    pub latent_dim: usize,
    pub lipschitz_bound: f64,
    pub target_space: TargetSpace,
    pub stages: Vec<StageDescription>,
}

/// Chains stages, checking dimensions; the bound is the product of the
/// stage bounds.
pub fn compose(latent_dim: usize, stages: Vec<Stage>, target: TargetSpace) -> Result<Decoder> {
    let mut dim = Some(latent_dim);
    let mut bound = 1.0;
    for st in &stages {
        let d = dim.ok_or_else(|| Error::InvalidInput(format!("{} stage after a solution mapping", st.kind())))?;
        if let Some(expected) = st.in_dim() {
            if expected != d {
                return Err(Error::DimensionMismatch { expected, got: d });
            }
        }
        if let Stage::Affine { in_dim, offset, .. } = st {
            if offset.len() < *in_dim {
                return Err(Error::DimensionMismatch { expected: *in_dim, got: offset.len() });
            }
        }
        dim = st.out_dim(d);
        bound *= st.bound()?;
    }
    Ok(Decoder { latent_dim, stages, target, bound })
}

pub fn identity_decoder(n: usize) -> Decoder {
    Decoder { latent_dim: n, stages: Vec::new(), target: TargetSpace::Param, bound: 1.0 }
}

pub fn circle_decoder() -> Decoder {
    compose(1, vec![Stage::Project(ConvexSet::Box { lo: vec![-1.0], hi: vec![1.0] }), Stage::Circle], TargetSpace::Param)
        .expect("static stages")
}

/// `z ↦ D(l·diam·z + e₀)`
pub fn shift_scale_wrap(decoder: &Decoder, e0: &[f64], diam: f64, l: f64) -> Result<Decoder> {
    if !(diam > 0.0) {
        return Err(Error::InvalidInput(format!("diameter must be positive, got {diam}")));
    }
    if e0.len() != decoder.latent_dim {
        return Err(Error::DimensionMismatch { expected: decoder.latent_dim, got: e0.len() });
    }
    let mut stages = vec![Stage::Affine { in_dim: e0.len(), scale: l * diam, offset: e0.to_vec() }];
    stages.extend(decoder.stages.iter().cloned());
    compose(decoder.latent_dim, stages, decoder.target)
}

impl Decoder {
    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.bound
    }

    pub fn target(&self) -> TargetSpace {
        self.target
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    fn solver(&self) -> Option<&Arc<dyn SolutionMap>> {
        self.stages.iter().rev().find_map(|s| match s {
            Stage::Solve(m) => Some(m),
            _ => None,
        })
    }

    pub fn decode(&self, z: &[f64]) -> Result<Decoded> {
        if z.len() != self.latent_dim {
            return Err(Error::DimensionMismatch { expected: self.latent_dim, got: z.len() });
        }
        self.stages.iter().try_fold(Decoded::Point(z.to_vec()), |x, st| st.apply(x))
    }

    pub fn distance(&self, a: &Decoded, b: &Decoded) -> Result<f64> {
        match (a, b) {
            (Decoded::Point(p), Decoded::Point(q)) => {
                if p.len() != q.len() {
                    return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
                }
                Ok(p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            }
            (Decoded::Solution(u), Decoded::Solution(v)) => {
                self.solver().ok_or_else(|| Error::InvalidInput("decoder has no solution stage".into()))?.distance(u, v)
            }
            _ => Err(Error::InvalidInput("cannot compare a point with a solution".into())),
        }
    }

    pub fn norm(&self, a: &Decoded) -> Result<f64> {
        match a {
            Decoded::Point(p) => Ok(p.iter().map(|x| x * x).sum::<f64>().sqrt()),
            Decoded::Solution(u) => self.solver().ok_or_else(|| Error::InvalidInput("decoder has no solution stage".into()))?.norm(u),
        }
    }

    /// Isometric coordinates of an output, when the target admits them.
    pub fn coordinates(&self, a: &Decoded) -> Option<Result<Vec<f64>>> {
        match a {
            Decoded::Point(p) => Some(Ok(p.clone())),
            Decoded::Solution(u) => self.solver()?.coordinates(u),
        }
    }

    pub fn describe(&self) -> DecoderDescription {
        let mut dim = Some(self.latent_dim);
        let stages = self
            .stages
            .iter()
            .map(|s| {
                let out = dim.and_then(|d| s.out_dim(d));
                let detail = match s {
                    Stage::Solve(m) => m.name().to_string(),
                    Stage::Affine { scale, .. } => format!("scale={scale}"),
                    _ => String::new(),
                };
                let d = StageDescription { kind: s.kind(), bound: s.bound().unwrap_or(f64::NAN), in_dim: dim, out_dim: out, detail };
                dim = out;
                d
            })
            .collect();
        DecoderDescription { latent_dim: self.latent_dim, lipschitz_bound: self.bound, target_space: self.target, stages }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(d: Decoded) -> Vec<f64> {
        d.point().unwrap()
    }

    #[test]
    fn composition_bounds() {
        assert_eq!(identity_decoder(3).lipschitz_bound(), 1.0);
        let d = compose(
            4,
            vec![
                Stage::Project(ConvexSet::Box { lo: vec![-0.5; 4], hi: vec![0.5; 4] }),
                Stage::Affine { in_dim: 4, scale: 2.0, offset: vec![1.5; 4] },
            ],
            TargetSpace::Param,
        )
        .unwrap();
        assert_eq!(d.lipschitz_bound(), 2.0);
        assert!(matches!(
            compose(3, vec![Stage::Project(ConvexSet::unit_ball(2))], TargetSpace::Param),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn circle_values() {
        let c = circle_decoder();
        assert_eq!(c.lipschitz_bound(), PI);
        let p = point(c.decode(&[0.5]).unwrap());
        assert!(p[0].abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        assert_eq!(point(c.decode(&[0.0]).unwrap()), vec![1.0, 0.0]);
        let (a, b) = (point(c.decode(&[1.0]).unwrap()), point(c.decode(&[-1.0]).unwrap()));
        assert!((a[0] + 1.0).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }

    #[test]
    fn shift_scale_arithmetic() {
        let id = identity_decoder(2);
        let w = shift_scale_wrap(&id, &[0.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!(point(w.decode(&[0.3, -0.2]).unwrap()), vec![0.3, -0.2]);
        let base = compose(2, vec![Stage::Affine { in_dim: 2, scale: 3.0, offset: vec![0.0; 2] }], TargetSpace::Param).unwrap();
        let (e0, diam, l) = ([0.1, 0.2], 0.7, 3.0);
        let w = shift_scale_wrap(&base, &e0, diam, l).unwrap();
        assert!((w.lipschitz_bound() - l * l * diam).abs() < 1e-14);
        let e = [0.4, -0.3];
        let zbar: Vec<f64> = e.iter().zip(&e0).map(|(a, b)| (a - b) / (l * diam)).collect();
        let (p, q) = (point(w.decode(&zbar).unwrap()), point(base.decode(&e).unwrap()));
        assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
