use super::constants::ConstantsLedger;
use super::report::{Semantics, WidthMethod, WidthReport};
use crate::params::WeightProfile;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Identifiers of the shipped experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    #[serde(rename = "circle_3_4")]
    Circle34,
    #[serde(rename = "elliptic_4_2")]
    Elliptic42,
    #[serde(rename = "parabolic_4_5")]
    Parabolic45,
    #[serde(rename = "parabolic_4_6")]
    Parabolic46,
    #[serde(rename = "movdisk_4_10")]
    MovDisk410,
    #[serde(rename = "movhole_4_11")]
    MovHole411,
    #[serde(rename = "defhole_4_13")]
    DefHole413,
    #[serde(rename = "curve_4_14")]
    Curve414,
    #[serde(rename = "varparam_4_17")]
    VarParam417,
    #[serde(rename = "adv_l1_4_20")]
    AdvL1420,
    #[serde(rename = "adv_l2_4_22")]
    AdvL2422,
    #[serde(rename = "table1_contrast")]
    Table1Contrast,
}

impl ExampleId {
    pub const ALL: [ExampleId; 12] = [
        ExampleId::Circle34,
        ExampleId::Elliptic42,
        ExampleId::Parabolic45,
        ExampleId::Parabolic46,
        ExampleId::MovDisk410,
        ExampleId::MovHole411,
        ExampleId::DefHole413,
        ExampleId::Curve414,
        ExampleId::VarParam417,
        ExampleId::AdvL1420,
        ExampleId::AdvL2422,
        ExampleId::Table1Contrast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Circle34 => "circle_3_4",
            ExampleId::Elliptic42 => "elliptic_4_2",
            ExampleId::Parabolic45 => "parabolic_4_5",
            ExampleId::Parabolic46 => "parabolic_4_6",
            ExampleId::MovDisk410 => "movdisk_4_10",
            ExampleId::MovHole411 => "movhole_4_11",
            ExampleId::DefHole413 => "defhole_4_13",
            ExampleId::Curve414 => "curve_4_14",
            ExampleId::VarParam417 => "varparam_4_17",
            ExampleId::AdvL1420 => "adv_l1_4_20",
            ExampleId::AdvL2422 => "adv_l2_4_22",
            ExampleId::Table1Contrast => "table1_contrast",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

impl std::fmt::Display for ExampleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An example together with the sizes its bound depends on.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainExample {
    Circle,
    /// `K × K` diffusion grid.
    Elliptic { k: usize },
    ParabolicFinite { k: usize },
    ParabolicWeighted { profile: WeightProfile },
    MovingDisk,
    MovingHole,
    DeformableHole,
    /// Curve modes weighted by `w`; each mode has two coefficients.
    Curve { profile: WeightProfile },
    VarParam { k: usize },
    AdvectionL1 { mus: Vec<f64> },
    AdvectionL2 { mus: Vec<f64> },
}

impl ChainExample {
    pub fn id(&self) -> ExampleId {
        match self {
            ChainExample::Circle => ExampleId::Circle34,
            ChainExample::Elliptic { .. } => ExampleId::Elliptic42,
            ChainExample::ParabolicFinite { .. } => ExampleId::Parabolic45,
            ChainExample::ParabolicWeighted { .. } => ExampleId::Parabolic46,
            ChainExample::MovingDisk => ExampleId::MovDisk410,
            ChainExample::MovingHole => ExampleId::MovHole411,
            ChainExample::DeformableHole => ExampleId::DefHole413,
            ChainExample::Curve { .. } => ExampleId::Curve414,
            ChainExample::VarParam { .. } => ExampleId::VarParam417,
            ChainExample::AdvectionL1 { .. } => ExampleId::AdvL1420,
            ChainExample::AdvectionL2 { .. } => ExampleId::AdvL2422,
        }
    }
}

fn zero_at(n: usize, dim: usize, l: f64) -> Result<WidthReport> {
    if n < dim {
        return Err(Error::PreconditionFailed { n, min_n: dim });
    }
    Ok(WidthReport::new(WidthMethod::DecoderBoundChain, n, Some(l), 0.0, Semantics::UpperBound))
}

/// Closed-form decoder-width bound for `example`, at the latent index the
/// example's construction uses (`5n`, `2n`, `26n`, or `n`).
pub fn bound_chain(example: &ChainExample, n: usize, ledger: &ConstantsLedger) -> Result<WidthReport> {
    let (r, big_r, cp) = (ledger.r, ledger.big_r, ledger.poincare);
    let report = match example {
        ChainExample::Circle => zero_at(n, 1, PI)?,
        ChainExample::Elliptic { k } => {
            let l = cp / (r * r) * big_r * (*k as f64) / 2.0;
            zero_at(n, k * k, l)?.with_constant("C_P", cp).with_constant("r", r).with_constant("R", big_r)
        }
        ChainExample::ParabolicFinite { k } => {
            zero_at(n, 5 * k, 5.0 * big_r * ledger.c_parabolic)?.with_constant("C_parabolic", ledger.c_parabolic).with_constant("R", big_r)
        }
        ChainExample::ParabolicWeighted { profile } => {
            if n == 0 {
                return Err(Error::PreconditionFailed { n, min_n: 1 });
            }
            let c = ledger.c_parabolic;
            let v = 5.0 * c * big_r * profile.weight(n).sqrt();
            WidthReport::new(WidthMethod::DecoderBoundChain, 5 * n, Some(5.0 * c * big_r), v, Semantics::UpperBound)
                .with_constant("C_parabolic", c)
                .with_constant("R", big_r)
                .with_constant("w_n", profile.weight(n))
        }
        ChainExample::MovingDisk | ChainExample::MovingHole => {
            zero_at(n, 1, ledger.c_vardomain * PI)?.with_constant("C_vardomain", ledger.c_vardomain)
        }
        ChainExample::DeformableHole => {
            zero_at(n, 2, ledger.c_vardomain / 2f64.sqrt())?.with_constant("C_vardomain", ledger.c_vardomain)
        }
        ChainExample::Curve { profile } => {
            if n == 0 {
                return Err(Error::PreconditionFailed { n, min_n: 1 });
            }
            let c = ledger.c_vardomain;
            WidthReport::new(WidthMethod::DecoderBoundChain, 2 * n, Some(3.0 * c / 8.0), 3.0 * c * profile.weight(n).sqrt() / 8.0, Semantics::UpperBound)
                .with_constant("C_vardomain", c)
                .with_constant("w_n", profile.weight(n))
        }
        ChainExample::VarParam { k } => zero_at(n, 2 * k + 2, 3.0 * ledger.c1_varparam)?.with_constant("C1_varparam", ledger.c1_varparam),
        ChainExample::AdvectionL1 { mus } => {
            let l_a = ((mus.len() as f64) * mus.iter().map(|m| m * m).sum::<f64>()).sqrt();
            zero_at(n, mus.len(), l_a / (r * r))?.with_constant("l_A", l_a).with_constant("r", r)
        }
        ChainExample::AdvectionL2 { mus } => {
            let adv = ledger.advection()?;
            if adv.mus != *mus {
                return Err(Error::InvalidInput("ledger basis norms differ from the example's".into()));
            }
            let k = mus.len() as f64;
            let v = adv.c_exponential * (-(n as f64) / (2.0 * k)).exp2();
            WidthReport::new(WidthMethod::DecoderBoundChain, 26 * n, Some(8.0), v, Semantics::UpperBound)
                .with_constant("C_exponential", adv.c_exponential)
                .with_constant("r", r)
        }
    };
    Ok(report)
}

/// Modulus `w(ε) = r^{−2/p} ε^{1/p}` carrying entropy numbers of the
/// coefficient set to the solution set.
pub fn holder_transfer(radius: f64, r: f64, p: f64) -> f64 {
    r.powf(-2.0 / p) * radius.max(0.0).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::width::{entropy_grid_cover, theory_constants, ConstantsConfig, Domain};

    fn ledger(mus: Vec<f64>) -> ConstantsLedger {
        theory_constants(&ConstantsConfig::new(1.0, 3.0, 1.0, Domain::Interval, 1).with_basis_norms(mus)).unwrap()
    }

    #[test]
    fn ids_roundtrip() {
        for e in ExampleId::ALL {
            assert_eq!(ExampleId::parse(e.name()).unwrap(), e);
        }
        assert!(matches!(ExampleId::parse("nope"), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn holder_arithmetic() {
        assert_eq!(holder_transfer(0.0, 1.0, 2.0), 0.0);
        assert!((holder_transfer(0.04, 1.0, 2.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn exponential_chain_matches_entropy_route() {
        let mus = vec![2.0];
        let l = ledger(mus.clone());
        for n in 4..20 {
            let b = bound_chain(&ChainExample::AdvectionL2 { mus: mus.clone() }, n, &l).unwrap();
            assert_eq!((b.n, b.l), (26 * n, Some(8.0)));
            let g = entropy_grid_cover(&mus, n).unwrap();
            let via_transfer = holder_transfer(4.0 * g.delta, l.r, 2.0);
            assert!((3.0 * via_transfer - b.value).abs() < 1e-12 * b.value);
            assert!(holder_transfer(g.bound, l.r, 2.0) <= b.value / 3.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_width_below_dimension_is_refused() {
        let l = ledger(vec![2.0]);
        assert!(matches!(bound_chain(&ChainExample::Elliptic { k: 3 }, 8, &l), Err(Error::PreconditionFailed { min_n: 9, .. })));
        assert_eq!(bound_chain(&ChainExample::Elliptic { k: 3 }, 9, &l).unwrap().value, 0.0);
    }
}
