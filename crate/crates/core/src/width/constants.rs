use crate::fem::{build_disk_mesh, build_rect_mesh, poincare_constant, OUTER};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Master domains with a known Poincaré constant route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(0,1)²`
    UnitSquare,
    /// `{|x| < 1}`
    UnitDisk,
    /// `(−π,π)²`
    SquarePi,
    /// `(−π,π) × (0,π)`
    StripPi,
    /// `(−1,1)` (advection)
    Interval,
}

impl Domain {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit_square" => Some(Domain::UnitSquare),
            "unit_disk" => Some(Domain::UnitDisk),
            "square_pi" => Some(Domain::SquarePi),
            "strip_pi" => Some(Domain::StripPi),
            "interval" => Some(Domain::Interval),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitSquare => "unit_square",
            Domain::UnitDisk => "unit_disk",
            Domain::SquarePi => "square_pi",
            Domain::StripPi => "strip_pi",
            Domain::Interval => "interval",
        }
    }

    /// Discrete Poincaré constant on the default mesh of the domain.
    pub fn mesh_poincare(self) -> Result<f64> {
        let mesh = match self {
            Domain::UnitSquare => build_rect_mesh((0.0, 1.0, 0.0, 1.0), 48, 48, None)?,
            Domain::UnitDisk => build_disk_mesh(1.0, 4, None)?,
            Domain::SquarePi => build_rect_mesh((-PI, PI, -PI, PI), 48, 48, None)?,
            Domain::StripPi => build_rect_mesh((-PI, PI, 0.0, PI), 48, 24, None)?,
            Domain::Interval => return Ok(2.0 / PI),
        };
        Ok(poincare_constant(&mesh, OUTER)?.constant)
    }
}

/// Inputs of the constants ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsConfig {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub domain: Domain,
    pub d: usize,
    /// Supplied Poincaré constant; computed from the domain mesh if absent.
    pub poincare: Option<f64>,
    /// `‖φ_k‖_{L¹}` of an advection basis.
    #[serde(default)]
    pub basis_norms: Vec<f64>,
}

impl ConstantsConfig {
    pub fn new(r: f64, big_r: f64, t_final: f64, domain: Domain, d: usize) -> Self {
        Self { r, big_r, t_final, domain, d, poincare: None, basis_norms: Vec::new() }
    }

    pub fn with_poincare(mut self, cp: f64) -> Self {
        self.poincare = Some(cp);
        self
    }

    pub fn with_basis_norms(mut self, mus: Vec<f64>) -> Self {
        self.basis_norms = mus;
        self
    }
}

/// Advection-specific constants of a basis `φ₁..φ_K` with `μ_k = ‖φ_k‖_{L¹}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectionConstants {
    pub k: usize,
    pub mus: Vec<f64>,
    /// `√(K Σ μ_k²)`
    pub l_a: f64,
    /// `4K (∏ μ_k)^{1/K}`
    pub c1_entropy: f64,
    /// `6 r⁻¹ √K (∏ μ_k)^{1/2K}`
    pub c_exponential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub d: usize,
    pub domain: Domain,
    pub poincare: f64,
    pub c_b: f64,
    /// Energy-estimate constant of the parabolic problem (derived trace).
    pub c1_parabolic: f64,
    pub c_parabolic: f64,
    pub delta0: f64,
    pub c_j: f64,
    /// Domain-transformation Lipschitz constant.
    pub c_vardomain: f64,
    /// Variable coefficients on a variable domain.
    pub c1_varparam: f64,
    pub advection: Option<AdvectionConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
}

pub fn c_b(r: f64, big_r: f64) -> f64 {
    big_r + big_r * big_r / (2.0 * r)
}

pub fn delta0(d: usize) -> f64 {
    (1.0 - (8.0f64 / 9.0).powf(2.0 / d as f64)).min(1.0 / 9.0)
}

pub fn c_j(delta0: f64) -> f64 {
    (9.0 + 1.0 / delta0) / 8.0
}

pub fn c_vardomain(r: f64, big_r: f64, cp: f64, delta0: f64) -> f64 {
    4.0 * big_r * cp / (r * r) * (3.0 * r + (3.0 / 8.0 * (9.0 + 1.0 / delta0) + 1.0) * big_r * cp)
}

pub fn c1_parabolic(r: f64, big_r: f64, t_final: f64) -> f64 {
    let cb = c_b(r, big_r);
    let growth = 1.0 + 2.0 * cb * t_final * (2.0 * cb * t_final).exp();
    (2.0 / r * (2.0 / r).max(1.0) * growth).sqrt()
}

pub fn theory_constants(cfg: &ConstantsConfig) -> Result<ConstantsLedger> {
    if cfg.d < 1 {
        return Err(Error::InvalidInput("dimension d must be at least 1".into()));
    }
    if !(cfg.r > 0.0 && cfg.big_r >= cfg.r && cfg.t_final > 0.0) {
        return Err(Error::InvalidInput(format!("need 0 < r <= R and T > 0, got r={}, R={}, T={}", cfg.r, cfg.big_r, cfg.t_final)));
    }
    let (r, big_r) = (cfg.r, cfg.big_r);
    let cp = match cfg.poincare {
        Some(cp) if cp > 0.0 => cp,
        Some(cp) => return Err(Error::InvalidInput(format!("Poincare constant must be positive, got {cp}"))),
        None => cfg.domain.mesh_poincare()?,
    };
    let cb = c_b(r, big_r);
    let c1 = c1_parabolic(r, big_r, cfg.t_final);
    let c_par = (2.0 * big_r * c1 * c1).max(2.0 * big_r * c1 * c1 * cp * cp).max(c1);
    let d0 = delta0(cfg.d);
    let cvd = c_vardomain(r, big_r, cp, d0);
    let advection = if cfg.basis_norms.is_empty() {
        None
    } else {
        let mus = cfg.basis_norms.clone();
        if mus.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::InvalidInput("advection basis norms must be positive".into()));
        }
        let k = mus.len();
        let kf = k as f64;
        let log_prod: f64 = mus.iter().map(|m| m.ln()).sum();
        Some(AdvectionConstants {
            k,
            l_a: (kf * mus.iter().map(|m| m * m).sum::<f64>()).sqrt(),
            c1_entropy: 4.0 * kf * (log_prod / kf).exp(),
            c_exponential: 6.0 / r * kf.sqrt() * (log_prod / (2.0 * kf)).exp(),
            mus,
        })
    };
    Ok(ConstantsLedger {
        r,
        big_r,
        t_final: cfg.t_final,
        d: cfg.d,
        domain: cfg.domain,
        poincare: cp,
        c_b: cb,
        c1_parabolic: c1,
        c_parabolic: c_par,
        delta0: d0,
        c_j: c_j(d0),
        c_vardomain: cvd,
        c1_varparam: (cp * cp * big_r / (r * r)).max(cvd),
        advection,
    })
}

impl ConstantsLedger {
    /// Every constant with the formula that produced it.
    pub fn entries(&self) -> Vec<ConstantEntry> {
        let mut out = vec![
            ConstantEntry { name: "r", value: self.r, formula: "input" },
            ConstantEntry { name: "R", value: self.big_r, formula: "input" },
            ConstantEntry { name: "T", value: self.t_final, formula: "input" },
            ConstantEntry { name: "C_P", value: self.poincare, formula: "lambda_min^(-1/2) of the discrete Dirichlet Laplacian" },
            ConstantEntry { name: "C_B", value: self.c_b, formula: "R + R^2/(2r)" },
            ConstantEntry {
                name: "C1_parabolic",
                value: self.c1_parabolic,
                formula: "sqrt((2/r) max(1,2/r) (1 + 2 C_B T exp(2 C_B T))) from the Gronwall trace",
            },
            ConstantEntry { name: "C_parabolic", value: self.c_parabolic, formula: "max(2 R C1^2, 2 R C1^2 C_P^2, C1)" },
            ConstantEntry { name: "delta0", value: self.delta0, formula: "min(1 - (8/9)^(2/d), 1/9)" },
            ConstantEntry { name: "C_J", value: self.c_j, formula: "(9 + 1/delta0)/8" },
            ConstantEntry {
                name: "C_vardomain",
                value: self.c_vardomain,
                formula: "(4 R C_P / r^2)(3r + (3/8 (9 + 1/delta0) + 1) R C_P)",
            },
            ConstantEntry { name: "C1_varparam", value: self.c1_varparam, formula: "max(C_P^2 R / r^2, C_vardomain)" },
        ];
        if let Some(a) = &self.advection {
            out.push(ConstantEntry { name: "l_A", value: a.l_a, formula: "sqrt(K sum mu_k^2)" });
            out.push(ConstantEntry { name: "C1_entropy", value: a.c1_entropy, formula: "4K (prod mu_k)^(1/K)" });
            out.push(ConstantEntry { name: "C_exponential", value: a.c_exponential, formula: "6 r^-1 sqrt(K) (prod mu_k)^(1/2K)" });
        }
        out
    }

    pub fn advection(&self) -> Result<&AdvectionConstants> {
        self.advection.as_ref().ok_or(Error::MissingConstant("advection basis norms"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(c_b(1.0, 2.0), 4.0);
        assert!((delta0(2) - 1.0 / 9.0).abs() < 1e-15);
        assert!((c_j(delta0(2)) - 9.0 / 4.0).abs() < 1e-14);
        let cp = 0.41585;
        let c = c_vardomain(1.0, 2.0, cp, 1.0 / 9.0);
        assert!((c - 8.0 * cp * (3.0 + 15.5 * cp)).abs() < 1e-12);
        assert!((c - 31.4).abs() < 0.1);
    }

    #[test]
    fn ledger_is_positive_and_traced() {
        let cfg = ConstantsConfig::new(1.0, 2.0, 1.0, Domain::UnitSquare, 2).with_poincare(0.225).with_basis_norms(vec![2.0]);
        let l = theory_constants(&cfg).unwrap();
        assert!(l.entries().iter().all(|e| e.value > 0.0));
        assert!(l.delta0 <= 1.0 / 9.0);
        let a = l.advection().unwrap();
        assert!((a.c_exponential - 6.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(a.l_a, 2.0);
        assert!(theory_constants(&ConstantsConfig { d: 0, ..cfg }).is_err());
    }
}
