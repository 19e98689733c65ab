use super::{compose, Decoded, Decoder, Stage, TargetSpace};
use crate::exec::{try_map_indexed, Execution};
use crate::params::ConvexSet;
use crate::pde::{AdvectionModel, GridDiffusionModel, ParabolicModel, SolutionMap, VarDomainModel, VarParamModel};
use crate::rng::stream;
use crate::width::ExampleId;
use crate::{Error, Result};
use rand::Rng as _;
use std::f64::consts::PI;
use std::sync::Arc;

/// Model and truncation a paper construction is built on.
#[derive(Debug, Clone)]
pub enum PaperSetup {
    Circle,
    Elliptic(Arc<GridDiffusionModel>),
    ParabolicFinite(Arc<ParabolicModel>),
    /// Latent dimension `5n`.
    ParabolicWeighted { model: Arc<ParabolicModel>, n: usize },
    MovingDisk(Arc<VarDomainModel>),
    MovingHole(Arc<VarDomainModel>),
    DeformableHole(Arc<VarDomainModel>),
    /// Latent dimension `2n`.
    Curve { model: Arc<VarDomainModel>, n: usize },
    VarParam(Arc<VarParamModel>),
    AdvectionL1(Arc<AdvectionModel>),
}

impl PaperSetup {
    pub fn example(&self) -> ExampleId {
        match self {
            PaperSetup::Circle => ExampleId::Circle34,
            PaperSetup::Elliptic(_) => ExampleId::Elliptic42,
            PaperSetup::ParabolicFinite(_) => ExampleId::Parabolic45,
            PaperSetup::ParabolicWeighted { .. } => ExampleId::Parabolic46,
            PaperSetup::MovingDisk(_) => ExampleId::MovDisk410,
            PaperSetup::MovingHole(_) => ExampleId::MovHole411,
            PaperSetup::DeformableHole(_) => ExampleId::DefHole413,
            PaperSetup::Curve { .. } => ExampleId::Curve414,
            PaperSetup::VarParam(_) => ExampleId::VarParam417,
            PaperSetup::AdvectionL1(_) => ExampleId::AdvL1420,
        }
    }
}

/// Latent code of a parameter: `(η[..keep] − offset) / scale`, or `θ/π`
/// for the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Angle,
    Affine { scale: f64, offset: f64, keep: usize },
}

impl Witness {
    pub fn encode(&self, eta: &[f64]) -> Vec<f64> {
        match self {
            Witness::Angle => vec![eta[0] / PI],
            Witness::Affine { scale, offset, keep } => eta[..*keep].iter().map(|v| (v - offset) / scale).collect(),
        }
    }
}

#[derive(Clone)]
pub struct PaperDecoder {
    pub example: ExampleId,
    pub decoder: Decoder,
    pub witness: Witness,
    pub model: Option<Arc<dyn SolutionMap>>,
}

impl std::fmt::Debug for PaperDecoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PaperDecoder").field("example", &self.example).field("decoder", &self.decoder).field("witness", &self.witness).finish()
    }
}

fn cube(dim: usize, h: f64) -> ConvexSet {
    ConvexSet::Box { lo: vec![-h; dim], hi: vec![h; dim] }
}

fn build(
    example: ExampleId,
    model: Arc<dyn SolutionMap>,
    latent: usize,
    mut stages: Vec<Stage>,
    target: TargetSpace,
    witness: Witness,
) -> Result<PaperDecoder> {
    stages.push(Stage::Solve(Arc::clone(&model)));
    Ok(PaperDecoder { example, decoder: compose(latent, stages, target)?, witness, model: Some(model) })
}

pub fn paper_decoder(example: ExampleId, setup: &PaperSetup) -> Result<PaperDecoder> {
    if setup.example() != example {
        if matches!(example, ExampleId::AdvL2422 | ExampleId::Table1Contrast) {
            return Err(Error::UnknownExample(format!("{example} has no explicit decoder")));
        }
        return Err(Error::InvalidInput(format!("setup for {} given for {example}", setup.example())));
    }
    let aff = |scale: f64, offset: f64, keep: usize| Witness::Affine { scale, offset, keep };
    match setup {
        PaperSetup::Circle => Ok(PaperDecoder { example, decoder: super::circle_decoder(), witness: Witness::Angle, model: None }),
        PaperSetup::Elliptic(m) => {
            let k = m.k();
            let n = k * k;
            let s = k as f64 / 2.0;
            let stages = vec![Stage::Project(cube(n, 1.0 / k as f64)), Stage::Affine { in_dim: n, scale: s, offset: vec![1.5; n] }];
            build(example, m.clone(), n, stages, TargetSpace::SnapshotH10, aff(s, 1.5, n))
        }
        PaperSetup::ParabolicFinite(m) => {
            let n = m.param_dim();
            build(example, m.clone(), n, vec![Stage::Project(ConvexSet::unit_ball(n))], TargetSpace::SnapshotL2TH10, aff(1.0, 0.0, n))
        }
        PaperSetup::ParabolicWeighted { model, n } => {
            if *n == 0 || *n > model.modes() {
                return Err(Error::InvalidInput(format!("truncation {n} outside 1..={}", model.modes())));
            }
            let stages = vec![
                Stage::Affine { in_dim: 5 * n, scale: 1.0, offset: vec![0.0; model.param_dim()] },
                Stage::Project(model.params().clone()),
            ];
            build(example, model.clone(), 5 * n, stages, TargetSpace::SnapshotL2TH10, aff(1.0, 0.0, 5 * n))
        }
        PaperSetup::MovingDisk(m) | PaperSetup::MovingHole(m) => {
            let stages = vec![Stage::Project(cube(1, 1.0)), Stage::Affine { in_dim: 1, scale: PI, offset: vec![0.0] }];
            build(example, m.clone(), 1, stages, TargetSpace::SnapshotL2, aff(PI, 0.0, 1))
        }
        PaperSetup::DeformableHole(m) => {
            let s = 0.5f64.sqrt();
            let stages = vec![Stage::Project(cube(2, s)), Stage::Affine { in_dim: 2, scale: s, offset: vec![0.0; 2] }];
            build(example, m.clone(), 2, stages, TargetSpace::SnapshotL2, aff(s, 0.0, 2))
        }
        PaperSetup::Curve { model, n } => {
            let total = model.param_dim();
            if *n == 0 || 2 * n > total {
                return Err(Error::InvalidInput(format!("truncation {n} outside 1..={}", total / 2)));
            }
            let stages = vec![
                Stage::Affine { in_dim: 2 * n, scale: 3.0 / 8.0, offset: vec![0.0; total] },
                Stage::Project(model.family().params.clone()),
            ];
            build(example, model.clone(), 2 * n, stages, TargetSpace::SnapshotL2, aff(3.0 / 8.0, 0.0, 2 * n))
        }
        PaperSetup::VarParam(m) => {
            let n = m.param_dim();
            build(example, m.clone(), n, vec![Stage::Project(m.params().clone())], TargetSpace::SnapshotL2, aff(1.0, 0.0, n))
        }
        PaperSetup::AdvectionL1(m) => {
            let k = m.param_dim();
            let s = (k as f64).sqrt();
            let stages = vec![Stage::Project(cube(k, 1.0 / s)), Stage::Affine { in_dim: k, scale: s, offset: vec![0.0; k] }];
            build(example, m.clone(), k, stages, TargetSpace::Field, aff(s, 0.0, k))
        }
    }
}

impl PaperDecoder {
    pub fn latent_dim(&self) -> usize {
        self.decoder.latent_dim()
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.decoder.lipschitz_bound()
    }

    /// Parameter `k` of a seeded sample; angles for the circle.
    pub fn sample_param(&self, seed: u64, k: usize) -> Vec<f64> {
        let mut rng = stream(seed, k as u64);
        match &self.model {
            Some(m) => m.sample(&mut rng),
            None => vec![rng.random_range(-PI..=PI)],
        }
    }

    pub fn sample_params(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..count).map(|k| self.sample_param(seed, k)).collect()
    }

    pub fn truth(&self, eta: &[f64]) -> Result<Decoded> {
        match &self.model {
            Some(m) => Ok(Decoded::Solution(m.solve(eta)?)),
            None => Ok(Decoded::Point(vec![eta[0].cos(), eta[0].sin()])),
        }
    }

    pub fn cases(&self, etas: &[Vec<f64>], exec: Execution) -> Result<Vec<super::ReconstructionCase>> {
        try_map_indexed(exec, etas.len(), |k| {
            Ok(super::ReconstructionCase { truth: self.truth(&etas[k])?, witness: self.witness.encode(&etas[k]) })
        })
    }
}
