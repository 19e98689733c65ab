//! Experiment configuration: strict JSON, unknown keys rejected, defaults
//! filled per example.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use widthlab::params::WeightProfile;
use widthlab::width::ExampleId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub example_id: ExampleId,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Latent sizes / truncations to report on.
    #[serde(default)]
    pub n_range: Option<Vec<usize>>,
    #[serde(default)]
    pub search: Option<Search>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    /// Cells per side of the rectangular mesh.
    pub mesh_n: Option<usize>,
    /// Disk mesh refinement level.
    pub refinement: Option<usize>,
    pub steps: Option<usize>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    /// Basis / grid size `K`.
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub weights: Option<WeightProfile>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    /// Parameters for reconstruction and snapshot widths.
    pub count: Option<usize>,
    /// Parameter pairs for the Lipschitz check.
    pub pairs: Option<usize>,
    /// Latent pairs for the decoder Lipschitz check.
    pub latent_pairs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Search {
    pub starts: usize,
    pub iterations: usize,
    pub step: f64,
    /// Number of parameters searched.
    pub targets: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&lines.join("; "))
    }
}

pub const DEFAULT_SEED: u64 = 20_241_014;

struct Defaults {
    mesh_n: usize,
    refinement: usize,
    steps: usize,
    k: usize,
    k_max: usize,
    count: usize,
    pairs: usize,
    latent_pairs: usize,
    n_range: Vec<usize>,
}

fn defaults(id: ExampleId) -> Defaults {
    let base = Defaults {
        mesh_n: 16,
        refinement: 3,
        steps: 20,
        k: 2,
        k_max: 8,
        count: 20,
        pairs: 20,
        latent_pairs: 20,
        n_range: vec![1, 2, 4, 8],
    };
    match id {
        ExampleId::Circle34 => Defaults { count: 10_000, latent_pairs: 1000, n_range: vec![1], ..base },
        ExampleId::Elliptic42 => Defaults { mesh_n: 48, k: 3, count: 100, pairs: 100, latent_pairs: 100, n_range: vec![9], ..base },
        ExampleId::Parabolic45 => Defaults { n_range: vec![10], count: 10, pairs: 10, latent_pairs: 10, ..base },
        ExampleId::Parabolic46 => Defaults { n_range: vec![2, 4, 8], count: 10, pairs: 10, latent_pairs: 10, ..base },
        ExampleId::MovDisk410 | ExampleId::MovHole411 => Defaults { n_range: vec![1], ..base },
        ExampleId::DefHole413 => Defaults { n_range: vec![2], ..base },
        ExampleId::Curve414 => Defaults { k_max: 4, n_range: vec![1, 2, 4], ..base },
        ExampleId::VarParam417 => Defaults { n_range: vec![6], count: 10, pairs: 10, latent_pairs: 10, ..base },
        ExampleId::AdvL1420 => Defaults { count: 100, pairs: 500, latent_pairs: 200, n_range: vec![2], ..base },
        ExampleId::AdvL2422 | ExampleId::Table1Contrast => {
            Defaults { k: 1, count: 200, pairs: 500, latent_pairs: 0, n_range: (1..=24).collect(), ..base }
        }
    }
}

impl ExperimentConfig {
    /// Fills every optional field with the example's default.
    pub fn normalized(&self) -> Self {
        let d = defaults(self.example_id);
        let mut c = self.clone();
        let disc = &mut c.discretization;
        disc.mesh_n.get_or_insert(d.mesh_n);
        disc.refinement.get_or_insert(d.refinement);
        disc.steps.get_or_insert(d.steps);
        disc.t_final.get_or_insert(1.0);
        disc.k.get_or_insert(d.k);
        disc.k_max.get_or_insert(d.k_max);
        disc.weights.get_or_insert(WeightProfile::InverseSquare);
        c.samples.count.get_or_insert(d.count);
        c.samples.pairs.get_or_insert(d.pairs);
        c.samples.latent_pairs.get_or_insert(d.latent_pairs);
        c.seed.get_or_insert(DEFAULT_SEED);
        c.n_range.get_or_insert(d.n_range);
        c.search.get_or_insert(Search { starts: 4, iterations: 100, step: 0.1, targets: 0 });
        c
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn check(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut need = |ok: bool, path: &str, message: &str| {
            if !ok {
                out.push(ConfigIssue { path: path.into(), message: message.into() });
            }
        };
        let d = &self.discretization;
        let pos = |v: Option<usize>| v.is_none_or(|v| v > 0);
        need(pos(d.mesh_n), "discretization.mesh_n", "must be positive");
        need(pos(d.steps), "discretization.steps", "must be positive");
        need(pos(d.k), "discretization.K", "must be positive");
        need(pos(d.k_max), "discretization.k_max", "must be positive");
        need(d.t_final.is_none_or(|t| t > 0.0 && t.is_finite()), "discretization.T", "must be positive");
        need(pos(self.samples.count), "samples.count", "must be positive");
        need(pos(self.samples.pairs), "samples.pairs", "must be positive");
        if let Some(r) = &self.n_range {
            need(!r.is_empty(), "n_range", "must be nonempty");
        }
        if let Some(s) = &self.search {
            need(s.starts > 0 && s.iterations > 0, "search", "budget must be positive");
            need(s.step > 0.0, "search.step", "must be positive");
        }
        if let (Some(k), Some(n)) = (d.k, d.mesh_n) {
            if self.example_id == ExampleId::Elliptic42 {
                need(n % k == 0, "discretization.mesh_n", "must be a multiple of K");
            }
        }
        if let (Some(k), Some(km)) = (d.k, d.k_max) {
            if self.example_id == ExampleId::Parabolic46 || self.example_id == ExampleId::Curve414 {
                need(k <= km, "discretization.K", "must not exceed k_max");
            }
        }
        out
    }
}

/// Parses and checks a config, collecting every semantic issue.
pub fn validate_config_str(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigErrors(vec![ConfigIssue { path, message: e.into_inner().to_string() }])
    })?;
    let issues = cfg.check();
    if issues.is_empty() {
        Ok(cfg.normalized())
    } else {
        Err(ConfigErrors(issues))
    }
}

pub fn validate_config(path: &Path) -> Result<ExperimentConfig, ConfigErrors> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigErrors(vec![ConfigIssue { path: path.display().to_string(), message: e.to_string() }]))?;
    validate_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = validate_config_str(r#"{"example_id":"circle_3_4"}"#).unwrap();
        assert_eq!(c.samples.count, Some(10_000));
        assert_eq!(c.seed, Some(DEFAULT_SEED));
    }

    #[test]
    fn errors_name_the_field() {
        let e = validate_config_str(r#"{"example_id":"circle_3_4","samples":{"count":-3}}"#).unwrap_err();
        assert_eq!(e.0[0].path, "samples.count");
        let e = validate_config_str(r#"{"example_id":"nope"}"#).unwrap_err();
        assert_eq!(e.0[0].path, "example_id");
        let e = validate_config_str(r#"{"example_id":"circle_3_4","bogus":1}"#).unwrap_err();
        assert!(e.0[0].message.contains("bogus"));
        let e = validate_config_str(r#"{"example_id":"circle_3_4","seed":1,"seed":2}"#).unwrap_err();
        assert!(e.0[0].message.contains("duplicate"));
    }

    #[test]
    fn semantic_issues_are_aggregated() {
        let e = validate_config_str(r#"{"example_id":"elliptic_4_2","samples":{"count":0,"pairs":0},"n_range":[]}"#).unwrap_err();
        let paths: Vec<&str> = e.0.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, vec!["samples.count", "samples.pairs", "n_range"]);
    }
}
