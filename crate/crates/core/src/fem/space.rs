use super::{assemble_elliptic, assemble_mass, DofMap, Mesh, NodeClass};
use crate::linalg::{dot, CsrMatrix, EnvelopeCholesky};
use crate::{Error, Result};
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L2,
    H10,
    L2TH10,
    Hm1,
}

/// Nodal values on a mesh, one block per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub mesh_fingerprint: u64,
    pub node_count: usize,
    pub values: Vec<f64>,
    pub time_grid: Option<Vec<f64>>,
}

impl Snapshot {
    pub fn stationary(mesh: &Mesh, values: Vec<f64>) -> Self {
        Self { mesh_fingerprint: mesh.fingerprint(), node_count: mesh.node_count(), values, time_grid: None }
    }

    pub fn levels(&self) -> usize {
        self.values.len() / self.node_count.max(1)
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.values[k * self.node_count..(k + 1) * self.node_count]
    }
}

/// Mesh + pin set with cached mass/stiffness matrices and factorizations.
#[derive(Debug)]
pub struct FemSpace {
    mesh: Arc<Mesh>,
    fingerprint: u64,
    dofs: DofMap,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    mass_red: CsrMatrix,
    stiff_red: CsrMatrix,
    stiff_chol: OnceLock<std::result::Result<EnvelopeCholesky, String>>,
    mass_chol: OnceLock<std::result::Result<EnvelopeCholesky, String>>,
}

impl FemSpace {
    pub fn new(mesh: Arc<Mesh>, pin: &[NodeClass]) -> Result<Self> {
        let dofs = DofMap::new(&mesh, pin)?;
        let mass = assemble_mass(&mesh, None)?;
        let stiffness = assemble_elliptic(&mesh, &super::CoefficientField::identity(), None)?;
        let mass_red = dofs.reduce_matrix(&mass);
        let stiff_red = dofs.reduce_matrix(&stiffness);
        let fingerprint = mesh.fingerprint();
        Ok(Self {
            mesh,
            fingerprint,
            dofs,
            mass,
            stiffness,
            mass_red,
            stiff_red,
            stiff_chol: OnceLock::new(),
            mass_chol: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn reduced_mass(&self) -> &CsrMatrix {
        &self.mass_red
    }

    pub fn reduced_stiffness(&self) -> &CsrMatrix {
        &self.stiff_red
    }

    pub fn stiffness_factor(&self) -> Result<&EnvelopeCholesky> {
        self.stiff_chol
            .get_or_init(|| EnvelopeCholesky::factor(&self.stiff_red).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::InvalidInput(format!("stiffness factorization failed: {e}")))
    }

    pub fn mass_factor(&self) -> Result<&EnvelopeCholesky> {
        self.mass_chol
            .get_or_init(|| EnvelopeCholesky::factor(&self.mass_red).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::InvalidInput(format!("mass factorization failed: {e}")))
    }

    pub fn snapshot(&self, values: Vec<f64>) -> Snapshot {
        Snapshot { mesh_fingerprint: self.fingerprint, node_count: self.mesh.node_count(), values, time_grid: None }
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.mesh.node_count() {
            return Err(Error::DimensionMismatch { expected: self.mesh.node_count(), got: v.len() });
        }
        Ok(())
    }

    pub fn l2(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v)?;
        Ok(self.mass.quadratic_form(v).max(0.0).sqrt())
    }

    pub fn h10(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v)?;
        Ok(self.stiffness.quadratic_form(v).max(0.0).sqrt())
    }

    /// `√(Fᵀ K⁻¹ F)` on the reduced system; pinned entries of `load` are ignored.
    pub fn hm1(&self, load: &[f64]) -> Result<f64> {
        self.check_len(load)?;
        let f = self.dofs.reduce(load);
        let x = self.stiffness_factor()?.solve(&f);
        Ok(dot(&f, &x).max(0.0).sqrt())
    }

    /// Trapezoid rule in time over per-level squared norms.
    pub fn trapezoid(&self, values: &[f64], time_grid: &[f64], per_level: impl Fn(&[f64]) -> Result<f64>) -> Result<f64> {
        let n = self.mesh.node_count();
        if values.len() != n * time_grid.len() {
            return Err(Error::DimensionMismatch { expected: n * time_grid.len(), got: values.len() });
        }
        let sq: Vec<f64> = (0..time_grid.len())
            .map(|k| per_level(&values[k * n..(k + 1) * n]).map(|v| v * v))
            .collect::<Result<_>>()?;
        let mut s = 0.0;
        for k in 1..time_grid.len() {
            s += 0.5 * (time_grid[k] - time_grid[k - 1]) * (sq[k] + sq[k - 1]);
        }
        Ok(s.max(0.0).sqrt())
    }

    pub fn norm(&self, s: &Snapshot, which: NormKind) -> Result<f64> {
        if s.node_count != self.mesh.node_count() || s.mesh_fingerprint != self.fingerprint {
            return Err(Error::InvalidInput("snapshot belongs to a different mesh".into()));
        }
        match which {
            NormKind::L2 => self.l2(&s.values),
            NormKind::H10 => self.h10(&s.values),
            NormKind::Hm1 => self.hm1(&s.values),
            NormKind::L2TH10 => {
                let tg = s
                    .time_grid
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("L2T_H10 needs a time grid".into()))?;
                self.trapezoid(&s.values, tg, |v| self.h10(v))
            }
        }
    }

    /// Euclidean coordinates `e(v)` with `‖e(v) − e(w)‖ = ‖v − w‖` in the
    /// chosen norm (L2 or H10, values zero at pinned nodes).
    pub fn energy_coordinates(&self, v: &[f64], which: NormKind) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let r = self.dofs.reduce(v);
        match which {
            NormKind::H10 => Ok(self.stiffness_factor()?.energy_coordinates(&r)),
            NormKind::L2 => Ok(self.mass_factor()?.energy_coordinates(&r)),
            other => Err(Error::InvalidInput(format!("no Euclidean embedding for {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_rect_mesh, OUTER};
    use crate::linalg::norm2;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn space(n: usize) -> FemSpace {
        let mesh = build_rect_mesh((0.0, 1.0, 0.0, 1.0), n, n, None).unwrap();
        FemSpace::new(Arc::new(mesh), OUTER).unwrap()
    }

    fn interp(sp: &FemSpace, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        sp.mesh().nodes().iter().map(|&p| f(p)).collect()
    }

    #[test]
    fn zero_snapshot_has_zero_norms() {
        let sp = space(4);
        let mut s = sp.snapshot(vec![0.0; 25]);
        for w in [NormKind::L2, NormKind::H10, NormKind::Hm1] {
            assert_eq!(sp.norm(&s, w).unwrap(), 0.0);
        }
        s.values = vec![0.0; 50];
        s.time_grid = Some(vec![0.0, 1.0]);
        assert_eq!(sp.norm(&s, NormKind::L2TH10).unwrap(), 0.0);
    }

    #[test]
    fn analytic_norms_of_sine_mode() {
        let f = |p: [f64; 2]| (PI * p[0]).sin() * (PI * p[1]).sin();
        let mut prev_l2 = f64::INFINITY;
        let mut prev_h1 = f64::INFINITY;
        for n in [16, 32, 64] {
            let sp = space(n);
            let v = interp(&sp, f);
            let e_l2 = (sp.l2(&v).unwrap() - 0.5).abs();
            let e_h1 = (sp.h10(&v).unwrap() - PI / 2f64.sqrt()).abs();
            assert!(e_l2 < 2.0 / (n * n) as f64, "n={n} err={e_l2}");
            assert!(e_h1 < 5.0 / n as f64);
            assert!(e_l2 < prev_l2 && e_h1 < prev_h1);
            prev_l2 = e_l2;
            prev_h1 = e_h1;
        }
    }

    #[test]
    fn hm1_is_the_dual_norm() {
        let sp = space(8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let free = sp.dofs().n_free();
        let f_red: Vec<f64> = (0..free).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = sp.dofs().reconstruct(&f_red);
        let hm1 = sp.hm1(&f).unwrap();
        for _ in 0..100 {
            let v = sp.dofs().reconstruct(&(0..free).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
            let ratio = dot(&f, &v) / sp.h10(&v).unwrap();
            assert!(ratio <= hm1 * (1.0 + 1e-10));
        }
        let riesz = sp.dofs().reconstruct(&sp.stiffness_factor().unwrap().solve(&f_red));
        let attained = dot(&f, &riesz) / sp.h10(&riesz).unwrap();
        assert!((attained - hm1).abs() < 1e-10 * hm1);
    }

    #[test]
    fn embeddings_are_isometric() {
        let sp = space(6);
        let v = interp(&sp, |p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]));
        for w in [NormKind::L2, NormKind::H10] {
            let e = sp.energy_coordinates(&v, w).unwrap();
            let direct = if w == NormKind::L2 { sp.l2(&v) } else { sp.h10(&v) }.unwrap();
            assert!((norm2(&e) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn reduced_stiffness_is_spd() {
        let sp = space(10);
        assert!(sp.reduced_stiffness().is_symmetric(1e-12));
        assert!(EnvelopeCholesky::factor(sp.reduced_stiffness()).is_ok());
    }
}
