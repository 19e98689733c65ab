//! The parametric solution maps `η ↦ u` of the shipped examples.

use super::advection::{adaptive_simpson, advection_distance, solve_advection_pwl, AdvectionSolution};
use super::elliptic::{l2_distance_crossmesh, solve_elliptic, solve_elliptic_vardomain, VarDomainSolution};
use super::parabolic::{solve_parabolic, Load, ParabolicProblem};
use super::TransformFamily;
use crate::fem::{
    assemble_load, assemble_mass, build_disk_mesh, build_rect_mesh, poincare_constant, CoefficientField, FemSpace, Mesh, NormKind,
    RectInterface, Snapshot, OUTER,
};
use crate::params::{ConvexSet, MetricPart, ParamMetric, PiecewiseLinear, WeightProfile};
use crate::rng::Rng;
use crate::width::{c_vardomain, delta0, theory_constants, ConstantsConfig, Domain};
use crate::{Error, Result};
use rand::Rng as _;
use std::f64::consts::PI;
use std::sync::Arc;

/// Value of a solution map.
#[derive(Debug, Clone)]
pub enum Element {
    Vector(Vec<f64>),
    /// Nodal values on the model's fixed mesh.
    Nodal(Snapshot),
    /// Nodal values on a transported mesh.
    Mapped(VarDomainSolution),
    Breakthrough(Arc<AdvectionSolution>),
}

impl Element {
    fn nodal(&self) -> Result<&Snapshot> {
        match self {
            Element::Nodal(s) => Ok(s),
            _ => Err(Error::InvalidInput("expected a nodal snapshot".into())),
        }
    }
}

/// A discrete solution map with its parameter metric and Lipschitz (or
/// Hölder) constant: `‖S(η) − S(η̄)‖ ≤ C d(η, η̄)^α`.
pub trait SolutionMap: Send + Sync {
    fn name(&self) -> &str;
    fn param_dim(&self) -> usize;
    fn solve(&self, eta: &[f64]) -> Result<Element>;
    fn distance(&self, u: &Element, v: &Element) -> Result<f64>;
    fn norm(&self, u: &Element) -> Result<f64>;
    fn param_distance(&self, eta: &[f64], eta_bar: &[f64]) -> f64;
    fn lipschitz(&self) -> f64;
    fn holder_exponent(&self) -> f64 {
        1.0
    }
    /// An admissible parameter.
    fn sample(&self, rng: &mut Rng) -> Vec<f64>;
    /// Lipschitz factors from Euclidean `η` to the solution norm, in
    /// composition order; `None` when the map is only Hölder.
    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>>;
    /// Isometric Euclidean coordinates of a solution, when available.
    fn coordinates(&self, _u: &Element) -> Option<Result<Vec<f64>>> {
        None
    }
}

/// Uniform `m × m` cell partition of an axis-aligned rectangle.
#[derive(Debug, Clone, Copy)]
struct CellGrid {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    m: usize,
}

impl CellGrid {
    fn new(bbox: [f64; 4], m: usize) -> Self {
        Self { x0: bbox[0], y0: bbox[2], w: bbox[1] - bbox[0], h: bbox[3] - bbox[2], m }
    }

    /// `m·i + j` with `i` along `x₁`.
    fn index(&self, x: [f64; 2]) -> usize {
        let m = self.m as f64;
        let i = (((x[0] - self.x0) / self.w * m).floor().max(0.0) as usize).min(self.m - 1);
        let j = (((x[1] - self.y0) / self.h * m).floor().max(0.0) as usize).min(self.m - 1);
        i * self.m + j
    }

    fn cell_area(&self) -> f64 {
        self.w * self.h / (self.m * self.m) as f64
    }

    fn count(&self) -> usize {
        self.m * self.m
    }
}

fn unit_square_space(n: usize, cells: usize) -> Result<(Arc<FemSpace>, CellGrid, f64)> {
    if cells == 0 || n % cells != 0 {
        return Err(Error::InvalidInput(format!("mesh size {n} must be a multiple of the cell count {cells}")));
    }
    let mesh = Arc::new(build_rect_mesh((0.0, 1.0, 0.0, 1.0), n, n, None)?);
    let cp = poincare_constant(&mesh, OUTER)?.constant;
    let space = Arc::new(FemSpace::new(mesh, OUTER)?);
    Ok((space, CellGrid::new([0.0, 1.0, 0.0, 1.0], cells), cp))
}

fn nodal_difference(space: &FemSpace, u: &Element, v: &Element) -> Result<Snapshot> {
    let (a, b) = (u.nodal()?, v.nodal()?);
    if a.values.len() != b.values.len() {
        return Err(Error::DimensionMismatch { expected: a.values.len(), got: b.values.len() });
    }
    let mut s = space.snapshot(a.values.iter().zip(&b.values).map(|(p, q)| p - q).collect());
    s.time_grid = a.time_grid.clone();
    Ok(s)
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Fixed-domain elliptic problem with `a`, `c`, `f` piecewise constant on a
/// cell grid of the unit square. Parameters per cell: `(a11, a12, a22)`,
/// then all `c`, then all `f`.
#[derive(Debug, Clone)]
pub struct EllipticCellModel {
    space: Arc<FemSpace>,
    grid: CellGrid,
    r: f64,
    big_r: f64,
    poincare: f64,
    metric: ParamMetric,
}

impl EllipticCellModel {
    pub fn new(mesh_n: usize, cells: usize, r: f64, big_r: f64) -> Result<Self> {
        let (space, grid, cp) = unit_square_space(mesh_n, cells)?;
        let nc = grid.count();
        let metric = ParamMetric::WeightedSum(vec![
            MetricPart { weight: big_r, offset: 0, len: 3 * nc, metric: ParamMetric::CellMatrixLinf },
            MetricPart { weight: big_r * cp * cp, offset: 3 * nc, len: nc, metric: ParamMetric::Linf },
            MetricPart { weight: r, offset: 4 * nc, len: nc, metric: ParamMetric::CellL2 { measures: vec![grid.cell_area(); nc] } },
        ]);
        Ok(Self { space, grid, r, big_r, poincare: cp, metric })
    }

    pub fn space(&self) -> &FemSpace {
        &self.space
    }

    pub fn poincare(&self) -> f64 {
        self.poincare
    }

    /// `C_P R / r`, the a-priori bound on `‖u‖_{H¹₀}`.
    pub fn stability_bound(&self) -> f64 {
        self.poincare * self.big_r / self.r
    }

    /// `(a, c, f)` of a parameter vector.
    pub fn fields(&self, eta: &[f64]) -> (CoefficientField, CoefficientField, CoefficientField) {
        let nc = self.grid.count();
        let g = self.grid;
        let p: Arc<Vec<f64>> = Arc::new(eta.to_vec());
        let pa = Arc::clone(&p);
        let a = CoefficientField::matrix(move |x| {
            let k = g.index(x);
            let (a11, a12, a22) = (pa[3 * k], pa[3 * k + 1], pa[3 * k + 2]);
            [[a11, a12], [a12, a22]]
        })
        .with_ellipticity(self.r, self.big_r);
        let pc = Arc::clone(&p);
        let c = CoefficientField::scalar(move |x| pc[3 * nc + g.index(x)]);
        let f = CoefficientField::scalar(move |x| p[4 * nc + g.index(x)]);
        (a, c, f)
    }
}

impl SolutionMap for EllipticCellModel {
    fn name(&self) -> &str {
        "elliptic_cells"
    }

    fn param_dim(&self) -> usize {
        5 * self.grid.count()
    }

    fn solve(&self, eta: &[f64]) -> Result<Element> {
        if eta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: eta.len() });
        }
        let (a, c, f) = self.fields(eta);
        let u = solve_elliptic(self.space.mesh(), OUTER, &a, Some(&c), &f)?;
        Ok(Element::Nodal(self.space.snapshot(u)))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        self.space.norm(&nodal_difference(&self.space, u, v)?, NormKind::H10)
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        self.space.norm(u.nodal()?, NormKind::H10)
    }

    fn param_distance(&self, eta: &[f64], eta_bar: &[f64]) -> f64 {
        self.metric.distance(eta, eta_bar)
    }

    fn lipschitz(&self) -> f64 {
        self.poincare / (self.r * self.r)
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        let nc = self.grid.count();
        let mut out = Vec::with_capacity(5 * nc);
        for _ in 0..nc {
            let th: f64 = rng.random_range(0.0..PI);
            let (e1, e2): (f64, f64) = (rng.random_range(self.r..=self.big_r), rng.random_range(self.r..=self.big_r));
            let (s, c) = th.sin_cos();
            out.extend([e1 * c * c + e2 * s * s, (e1 - e2) * c * s, e1 * s * s + e2 * c * c]);
        }
        for _ in 0..nc {
            out.push(rng.random_range(0.0..=self.big_r));
        }
        let raw: Vec<f64> = (0..nc).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = (raw.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt();
        let target = self.big_r * rng.random::<f64>();
        out.extend(raw.iter().map(|v| v * target / norm));
        out
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        None
    }

    fn coordinates(&self, u: &Element) -> Option<Result<Vec<f64>>> {
        Some(u.nodal().and_then(|s| self.space.energy_coordinates(&s.values, NormKind::H10)))
    }
}

/// Diffusion `a = λ_ij I` on a `K × K` grid of the unit square, `f ≡ 1`,
/// `c = 0`; `λ ∈ [r, R]^{K²}` indexed `K i + j`.
#[derive(Debug, Clone)]
pub struct GridDiffusionModel {
    space: Arc<FemSpace>,
    grid: CellGrid,
    r: f64,
    big_r: f64,
    poincare: f64,
}

impl GridDiffusionModel {
    pub fn new(k: usize, mesh_n: usize) -> Result<Self> {
        let (space, grid, cp) = unit_square_space(mesh_n, k)?;
        Ok(Self { space, grid, r: 1.0, big_r: 2.0, poincare: cp })
    }

    pub fn k(&self) -> usize {
        self.grid.m
    }

    pub fn poincare(&self) -> f64 {
        self.poincare
    }

    pub fn space(&self) -> &FemSpace {
        &self.space
    }

    pub fn diffusion(&self, lambda: &[f64]) -> CoefficientField {
        let g = self.grid;
        let l = lambda.to_vec();
        CoefficientField::isotropic(move |x| l[g.index(x)]).with_ellipticity(self.r, self.big_r)
    }
}

impl SolutionMap for GridDiffusionModel {
    fn name(&self) -> &str {
        "elliptic_4_2"
    }

    fn param_dim(&self) -> usize {
        self.grid.count()
    }

    fn solve(&self, lambda: &[f64]) -> Result<Element> {
        if lambda.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: lambda.len() });
        }
        let u = solve_elliptic(self.space.mesh(), OUTER, &self.diffusion(lambda), None, &CoefficientField::constant(1.0))?;
        Ok(Element::Nodal(self.space.snapshot(u)))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        self.space.norm(&nodal_difference(&self.space, u, v)?, NormKind::H10)
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        self.space.norm(u.nodal()?, NormKind::H10)
    }

    /// `R ‖a − ā‖_{L^∞}`
    fn param_distance(&self, eta: &[f64], eta_bar: &[f64]) -> f64 {
        self.big_r * max_abs_diff(eta, eta_bar)
    }

    fn lipschitz(&self) -> f64 {
        self.poincare / (self.r * self.r)
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        (0..self.param_dim()).map(|_| rng.random_range(self.r..=self.big_r)).collect()
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        Some(vec![("S_Lambda", self.big_r), ("S_0", self.lipschitz())])
    }

    fn coordinates(&self, u: &Element) -> Option<Result<Vec<f64>>> {
        Some(u.nodal().and_then(|s| self.space.energy_coordinates(&s.values, NormKind::H10)))
    }
}

/// Modes `2 sin(pπx) sin(qπy)` ordered by `p + q`, then `p`.
fn sine_mode(k: usize) -> (usize, usize) {
    let mut idx = 0;
    for s in 2.. {
        for p in 1..s {
            if idx == k {
                return (p, s - p);
            }
            idx += 1;
        }
    }
    unreachable!()
}

/// `s_k = √6/(πk)`, `Σ s_k² = 1`.
fn mode_scale(k: usize) -> f64 {
    6f64.sqrt() / (PI * (k + 1) as f64)
}

/// Parabolic problem on the unit square with per-mode blocks
/// `(λ^a, λ^b, λ^c, λ^f, λ^g)`; mode `k` of `a`, `b`, `c` lives on cell `k`
/// of an `8 × 8` grid.
#[derive(Debug, Clone)]
pub struct ParabolicModel {
    name: &'static str,
    space: Arc<FemSpace>,
    grid: CellGrid,
    modes: usize,
    r: f64,
    big_r: f64,
    t_final: f64,
    steps: usize,
    poincare: f64,
    constant: f64,
    f_loads: Vec<Vec<f64>>,
    g_loads: Vec<Vec<f64>>,
    params: ConvexSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicSetup {
    pub mesh_n: usize,
    pub steps: usize,
    pub t_final: f64,
}

impl Default for ParabolicSetup {
    fn default() -> Self {
        Self { mesh_n: 32, steps: 200, t_final: 1.0 }
    }
}

const PARABOLIC_CELLS: usize = 8;

impl ParabolicModel {
    fn build(name: &'static str, modes: usize, params: ConvexSet, setup: ParabolicSetup) -> Result<Self> {
        if modes == 0 || modes > PARABOLIC_CELLS * PARABOLIC_CELLS {
            return Err(Error::InvalidInput(format!("mode count {modes} outside 1..=64")));
        }
        let (space, grid, cp) = unit_square_space(setup.mesh_n, PARABOLIC_CELLS)?;
        let (r, big_r) = (1.0, 2.0);
        let ledger = theory_constants(&ConstantsConfig::new(r, big_r, setup.t_final, Domain::UnitSquare, 2).with_poincare(cp))?;
        let mut f_loads = Vec::with_capacity(modes);
        let mut g_loads = Vec::with_capacity(modes);
        for k in 0..modes {
            let (p, q) = sine_mode(k);
            let psi = move |x: [f64; 2]| 2.0 * (p as f64 * PI * x[0]).sin() * (q as f64 * PI * x[1]).sin();
            let gs = big_r * mode_scale(k);
            let fs = gs / setup.t_final.sqrt();
            f_loads.push(assemble_load(space.mesh(), &CoefficientField::scalar(move |x| fs * psi(x)), 0.0)?);
            g_loads.push(assemble_load(space.mesh(), &CoefficientField::scalar(move |x| gs * psi(x)), 0.0)?);
        }
        Ok(Self {
            name,
            space,
            grid,
            modes,
            r,
            big_r,
            t_final: setup.t_final,
            steps: setup.steps,
            poincare: cp,
            constant: ledger.c_parabolic,
            f_loads,
            g_loads,
            params,
        })
    }

    /// `Λ_K`: the unit ball of `ℝ^{5K}`.
    pub fn finite(k: usize, setup: ParabolicSetup) -> Result<Self> {
        Self::build("parabolic_4_5", k, ConvexSet::unit_ball(5 * k), setup)
    }

    /// `Λ_w = {Σ λ_k²/w_k ≤ 1}` truncated at `k_max` modes.
    pub fn weighted(profile: WeightProfile, k_max: usize, setup: ParabolicSetup) -> Result<Self> {
        let w: Vec<f64> = profile.weights(k_max).into_iter().flat_map(|w| [w; 5]).collect();
        Self::build("parabolic_4_6", k_max, ConvexSet::ellipsoid(w, 1.0)?, setup)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn params(&self) -> &ConvexSet {
        &self.params
    }

    pub fn poincare(&self) -> f64 {
        self.poincare
    }

    pub fn space(&self) -> &FemSpace {
        &self.space
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn problem(&self, lambda: &[f64]) -> ParabolicProblem {
        let (r, big_r, g) = (self.r, self.big_r, self.grid);
        let modes = self.modes;
        let block = |j: usize| -> Vec<f64> { (0..modes).map(|k| lambda[5 * k + j]).collect() };
        let (la, lb, lc, lf, lg) = (block(0), block(1), block(2), block(3), block(4));
        let mid = 0.5 * (big_r + r);
        let amp = 0.5 * (big_r - r);
        let la = Arc::new(la);
        let a = CoefficientField::matrix(move |x| {
            let k = g.index(x);
            let s = la.get(k).copied().unwrap_or(0.0) * amp;
            [[mid + s, 0.0], [0.0, mid + 0.5 * s]]
        })
        .with_ellipticity(r, big_r);
        let b = if lb.iter().all(|v| *v == 0.0) {
            CoefficientField::zero_vector()
        } else {
            CoefficientField::vector(move |x| {
                let k = g.index(x);
                let s = lb.get(k).copied().unwrap_or(0.0) * big_r;
                let (sn, cs) = ((k + 1) as f64).sin_cos();
                [s * cs, s * sn]
            })
        };
        let c = if lc.iter().all(|v| *v == 0.0) {
            CoefficientField::zero_scalar()
        } else {
            CoefficientField::scalar(move |x| lc.get(g.index(x)).copied().unwrap_or(0.0) * big_r)
        };
        let combine = |loads: &[Vec<f64>], coef: &[f64]| {
            let mut out = vec![0.0; self.space.mesh().node_count()];
            for (l, c) in loads.iter().zip(coef) {
                if *c != 0.0 {
                    out.iter_mut().zip(l).for_each(|(o, v)| *o += c * v);
                }
            }
            out
        };
        ParabolicProblem {
            a,
            b,
            c,
            f: Load::Assembled(combine(&self.f_loads, &lf)),
            g: Load::Assembled(combine(&self.g_loads, &lg)),
        }
    }

    fn trapezoid_weights(&self) -> Vec<f64> {
        let dt = self.t_final / self.steps as f64;
        (0..=self.steps).map(|k| if k == 0 || k == self.steps { 0.5 * dt } else { dt }).collect()
    }
}

impl SolutionMap for ParabolicModel {
    fn name(&self) -> &str {
        self.name
    }

    fn param_dim(&self) -> usize {
        5 * self.modes
    }

    fn solve(&self, lambda: &[f64]) -> Result<Element> {
        if lambda.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: lambda.len() });
        }
        Ok(Element::Nodal(solve_parabolic(&self.space, &self.problem(lambda), self.steps, self.t_final)?))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        self.space.norm(&nodal_difference(&self.space, u, v)?, NormKind::L2TH10)
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        self.space.norm(u.nodal()?, NormKind::L2TH10)
    }

    /// `‖Δa‖_∞ + ‖Δb‖_∞ + ‖Δc‖_∞ + ‖Δf‖_{L²(H⁻¹)} + ‖Δg‖_{L²}`; the `f` term
    /// uses the discrete dual norm, the `g` term the orthonormality of the
    /// sine modes.
    fn param_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = |j: usize| -> Vec<f64> { (0..self.modes).map(|k| x[5 * k + j] - y[5 * k + j]).collect() };
        let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let (da, db, dc, df, dg) = (d(0), d(1), d(2), d(3), d(4));
        let mut load = vec![0.0; self.space.mesh().node_count()];
        for (l, c) in self.f_loads.iter().zip(&df) {
            load.iter_mut().zip(l).for_each(|(o, v)| *o += c * v);
        }
        let f_term = self.t_final.sqrt() * self.space.hm1(&load).expect("load length matches mesh");
        let g_term = self.big_r * dg.iter().enumerate().map(|(k, v)| (mode_scale(k) * v).powi(2)).sum::<f64>().sqrt();
        0.5 * (self.big_r - self.r) * maxabs(&da) + self.big_r * maxabs(&db) + self.big_r * maxabs(&dc) + f_term + g_term
    }

    fn lipschitz(&self) -> f64 {
        self.constant
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.params.sample_one(rng)
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        Some(vec![("S_Lambda", 5.0 * self.big_r), ("S_0", self.constant)])
    }

    fn coordinates(&self, u: &Element) -> Option<Result<Vec<f64>>> {
        let run = || -> Result<Vec<f64>> {
            let s = u.nodal()?;
            let mut out = Vec::new();
            for (k, w) in self.trapezoid_weights().into_iter().enumerate() {
                let e = self.space.energy_coordinates(s.level(k), NormKind::H10)?;
                out.extend(e.into_iter().map(|v| v * w.sqrt()));
            }
            Ok(out)
        };
        Some(run())
    }
}

fn default_diffusion() -> CoefficientField {
    CoefficientField::isotropic(|x| 1.5 + 0.3 * (x[0] + x[1]).sin()).with_ellipticity(1.0, 2.0).with_lipschitz(0.3 * 2f64.sqrt())
}

/// Fixed coefficients on a family of transported domains.
#[derive(Debug, Clone)]
pub struct VarDomainModel {
    name: &'static str,
    family: TransformFamily,
    ref_mesh: Arc<Mesh>,
    a: CoefficientField,
    f: CoefficientField,
    poincare: f64,
    constant: f64,
}

impl VarDomainModel {
    fn build(name: &'static str, family: TransformFamily, ref_mesh: Mesh, f: CoefficientField) -> Result<Self> {
        let (r, big_r) = (1.0, 2.0);
        let cp = poincare_constant(&ref_mesh, OUTER)?.constant;
        Ok(Self {
            name,
            family,
            ref_mesh: Arc::new(ref_mesh),
            a: default_diffusion(),
            f,
            poincare: cp,
            constant: c_vardomain(r, big_r, cp, delta0(2)),
        })
    }

    /// Unit disk, interface circle of radius 1/3 centred at `(cos λ, sin λ)/3`.
    pub fn moving_disk(refinement: usize) -> Result<Self> {
        let mesh = build_disk_mesh(1.0, refinement, Some(([1.0 / 3.0, 0.0], 1.0 / 3.0)))?;
        Self::build("movdisk_4_10", TransformFamily::rotation(), mesh, CoefficientField::scalar(|x| 0.8 + 0.5 * x[0]))
    }

    /// Same extended problem as [`VarDomainModel::moving_disk`]; the domain
    /// of interest is the complement of the disk.
    pub fn moving_hole(refinement: usize) -> Result<Self> {
        let mut m = Self::moving_disk(refinement)?;
        m.name = "movhole_4_11";
        Ok(m)
    }

    /// `(−π,π)²` minus the hole `[−π/2−λ₁, π/2+λ₁] × [−π/2−λ₂, π/2+λ₂]`.
    pub fn deformable_hole(n: usize) -> Result<Self> {
        if n % 4 != 0 {
            return Err(Error::InvalidInput(format!("mesh size {n} must be a multiple of 4")));
        }
        let h = PI / 2.0;
        let mesh = build_rect_mesh((-PI, PI, -PI, PI), n, n, Some(RectInterface::Rectangle { x_lo: -h, x_hi: h, y_lo: -h, y_hi: h }))?;
        Self::build("defhole_4_13", TransformFamily::sine_stretch(), mesh, CoefficientField::scalar(|x| 0.25 + 0.1 * x[0]))
    }

    /// `(−π,π) × (0,π)` cut at the curve `x₂ = π/2 + ρ_λ(x₁)`, `n` modes.
    pub fn curve(n: usize, weights: &[f64]) -> Result<Self> {
        if n % 4 != 0 {
            return Err(Error::InvalidInput(format!("mesh size {n} must be a multiple of 4")));
        }
        let mesh = build_rect_mesh((-PI, PI, 0.0, PI), n, n / 2, Some(RectInterface::HorizontalLine { y: PI / 2.0 }))?;
        Self::build("curve_4_14", TransformFamily::curve_stretch(weights)?, mesh, CoefficientField::scalar(|x| 0.25 + 0.1 * x[0]))
    }

    pub fn family(&self) -> &TransformFamily {
        &self.family
    }

    pub fn ref_mesh(&self) -> &Arc<Mesh> {
        &self.ref_mesh
    }

    pub fn poincare(&self) -> f64 {
        self.poincare
    }

    pub fn solve_full(&self, lambda: &[f64]) -> Result<VarDomainSolution> {
        solve_elliptic_vardomain(&self.a, &self.f, lambda, &self.family, &self.ref_mesh)
    }
}

fn mapped(u: &Element) -> Result<&VarDomainSolution> {
    match u {
        Element::Mapped(s) => Ok(s),
        _ => Err(Error::InvalidInput("expected a transported-mesh solution".into())),
    }
}

fn mapped_l2(s: &VarDomainSolution) -> Result<f64> {
    Ok(assemble_mass(&s.mesh, None)?.quadratic_form(s.values()).max(0.0).sqrt())
}

impl SolutionMap for VarDomainModel {
    fn name(&self) -> &str {
        self.name
    }

    fn param_dim(&self) -> usize {
        self.family.dim()
    }

    fn solve(&self, lambda: &[f64]) -> Result<Element> {
        Ok(Element::Mapped(self.solve_full(lambda)?))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        l2_distance_crossmesh(mapped(u)?, mapped(v)?)
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        mapped_l2(mapped(u)?)
    }

    fn param_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        ParamMetric::Euclidean.distance(x, y)
    }

    fn lipschitz(&self) -> f64 {
        self.constant
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.family.params.sample_one(rng)
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        Some(vec![("S", self.constant)])
    }
}

/// Variable coefficients on the deformable-hole domain:
/// `a = (3/2 + Σ μ^a_k φ^a_k) I`, `f = Σ μ^f_k φ^f_k`, parameters
/// `(μ^a, μ^f, λ)`.
#[derive(Debug, Clone)]
pub struct VarParamModel {
    k: usize,
    family: TransformFamily,
    ref_mesh: Arc<Mesh>,
    poincare: f64,
    constant: f64,
    params: ConvexSet,
}

const BUMP_RING: f64 = 2.2;

impl VarParamModel {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::InvalidInput(format!("basis size {k} outside 1..=4")));
        }
        let base = VarDomainModel::deformable_hole(n)?;
        let cp = base.poincare;
        let c1 = (cp * cp * 2.0).max(base.constant); // C_P² R / r² against C_vd, r = 1, R = 2
        let params = ConvexSet::product(vec![
            ConvexSet::ball(vec![0.0; k], 0.5)?,
            ConvexSet::ball(vec![0.0; k], 0.5)?,
            ConvexSet::Box { lo: vec![-0.5; 2], hi: vec![0.5; 2] },
        ]);
        Ok(Self { k, family: base.family, ref_mesh: base.ref_mesh, poincare: cp, constant: c1, params })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn poincare(&self) -> f64 {
        self.poincare
    }

    pub fn params(&self) -> &ConvexSet {
        &self.params
    }

    fn bump_center(k: usize, count: usize) -> [f64; 2] {
        let th = 2.0 * PI * k as f64 / count as f64;
        [BUMP_RING * th.cos(), BUMP_RING * th.sin()]
    }

    /// Unit-radius cone bumps on a ring, pairwise disjoint.
    pub fn bump(k: usize, count: usize, x: [f64; 2]) -> f64 {
        let c = Self::bump_center(k, count);
        (1.0 - ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt()).max(0.0)
    }

    /// `L²`-orthogonal modes with `Σ ‖φ^f_k‖² = 1`.
    pub fn load_mode(k: usize, count: usize, x: [f64; 2]) -> f64 {
        let c1 = |s: f64| (0.5 * s).cos();
        let s1 = |s: f64| s.sin();
        let v = match k {
            0 => c1(x[0]) * c1(x[1]),
            1 => s1(x[0]) * c1(x[1]),
            2 => c1(x[0]) * s1(x[1]),
            _ => s1(x[0]) * s1(x[1]),
        };
        v / (PI * (count as f64).sqrt())
    }

    pub fn fields(&self, eta: &[f64]) -> (CoefficientField, CoefficientField) {
        let k = self.k;
        let mu_a = eta[..k].to_vec();
        let mu_f = eta[k..2 * k].to_vec();
        let a = CoefficientField::isotropic(move |x| 1.5 + mu_a.iter().enumerate().map(|(i, m)| m * Self::bump(i, k, x)).sum::<f64>())
            .with_ellipticity(1.0, 2.0);
        let f = CoefficientField::scalar(move |x| mu_f.iter().enumerate().map(|(i, m)| m * Self::load_mode(i, k, x)).sum());
        (a, f)
    }
}

impl SolutionMap for VarParamModel {
    fn name(&self) -> &str {
        "varparam_4_17"
    }

    fn param_dim(&self) -> usize {
        2 * self.k + 2
    }

    fn solve(&self, eta: &[f64]) -> Result<Element> {
        if eta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: eta.len() });
        }
        let (a, f) = self.fields(eta);
        Ok(Element::Mapped(solve_elliptic_vardomain(&a, &f, &eta[2 * self.k..], &self.family, &self.ref_mesh)?))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        l2_distance_crossmesh(mapped(u)?, mapped(v)?)
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        mapped_l2(mapped(u)?)
    }

    /// `‖Δa‖_{L^∞(ℓ²)} + ‖Δf‖_{L²} + ‖Δλ‖₂`
    fn param_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let k = self.k;
        let da = max_abs_diff(&x[..k], &y[..k]);
        let df = (x[k..2 * k].iter().zip(&y[k..2 * k]).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / k as f64).sqrt();
        da + df + ParamMetric::Euclidean.distance(&x[2 * k..], &y[2 * k..])
    }

    fn lipschitz(&self) -> f64 {
        self.constant
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.params.sample_one(rng)
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        Some(vec![("S_Lambda", 3.0), ("S_0", self.constant)])
    }
}

#[derive(Debug, Clone)]
enum AdvectionParams {
    /// `c = φ₀ + Σ η_k φ_k`, `η ∈ [−1, 1]^K`
    Basis { phi0: PiecewiseLinear, phis: Vec<PiecewiseLinear> },
    /// `c` has nodal values `η ∈ [r, R]^m` on fixed nodes.
    Nodal { nodes: Vec<f64> },
}

/// Linear advection `u_t + c(x) u_x = 0` on `[0,1] × [−1,1]`, solution
/// measured in `L^p`.
#[derive(Debug, Clone)]
pub struct AdvectionModel {
    name: &'static str,
    params: AdvectionParams,
    r: f64,
    big_r: f64,
    p: f64,
    tol: f64,
}

impl AdvectionModel {
    /// `φ₀ ≡ 3/2`, `φ₁ = hat/4`, `φ₂ = x/5`; `r = 1`, `R = 2`, `L¹`.
    pub fn example_4_20() -> Self {
        let phi0 = PiecewiseLinear::constant(-1.0, 1.0, 1.5);
        let hat = PiecewiseLinear::new(vec![-1.0, 0.0, 1.0], vec![0.0, 0.25, 0.0]).expect("static nodes");
        let lin = PiecewiseLinear::new(vec![-1.0, 1.0], vec![-0.2, 0.2]).expect("static nodes");
        Self { name: "adv_l1_4_20", params: AdvectionParams::Basis { phi0, phis: vec![hat, lin] }, r: 1.0, big_r: 2.0, p: 1.0, tol: 1e-12 }
    }

    /// `φ₀ ≡ 2`, `φ₁ ≡ 1`; `r = 1`, `R = 3`, `L²`.
    pub fn example_4_22() -> Self {
        let phi0 = PiecewiseLinear::constant(-1.0, 1.0, 2.0);
        let phi1 = PiecewiseLinear::constant(-1.0, 1.0, 1.0);
        Self { name: "adv_l2_4_22", params: AdvectionParams::Basis { phi0, phis: vec![phi1] }, r: 1.0, big_r: 3.0, p: 2.0, tol: 1e-12 }
    }

    /// Piecewise-linear `c` with free nodal values in `[r, R]`.
    pub fn nodal(nodes: Vec<f64>, r: f64, big_r: f64, p: f64) -> Result<Self> {
        PiecewiseLinear::new(nodes.clone(), vec![r; nodes.len()])?;
        if nodes[0] > -1.0 || *nodes.last().unwrap() < 1.0 {
            return Err(Error::InvalidInput("nodes must cover [-1, 1]".into()));
        }
        Ok(Self { name: "advection_nodal", params: AdvectionParams::Nodal { nodes }, r, big_r, p, tol: 1e-12 })
    }

    pub fn with_exponent(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `‖φ_k‖_{L¹}` of the basis.
    pub fn basis_norms(&self) -> Vec<f64> {
        match &self.params {
            AdvectionParams::Basis { phis, .. } => phis.iter().map(|p| p.l1_norm()).collect(),
            AdvectionParams::Nodal { .. } => Vec::new(),
        }
    }

    pub fn coefficient(&self, eta: &[f64]) -> PiecewiseLinear {
        match &self.params {
            AdvectionParams::Basis { phi0, phis } => {
                let mut terms = vec![(1.0, phi0)];
                terms.extend(eta.iter().copied().zip(phis));
                PiecewiseLinear::combination(&terms)
            }
            AdvectionParams::Nodal { nodes } => PiecewiseLinear::new(nodes.clone(), eta.to_vec()).expect("validated nodes"),
        }
    }

    pub fn solve_exact(&self, eta: &[f64]) -> Result<AdvectionSolution> {
        solve_advection_pwl(&self.coefficient(eta), self.r, self.tol)
    }
}

fn breakthrough(u: &Element) -> Result<&AdvectionSolution> {
    match u {
        Element::Breakthrough(s) => Ok(s),
        _ => Err(Error::InvalidInput("expected an advection solution".into())),
    }
}

impl SolutionMap for AdvectionModel {
    fn name(&self) -> &str {
        self.name
    }

    fn param_dim(&self) -> usize {
        match &self.params {
            AdvectionParams::Basis { phis, .. } => phis.len(),
            AdvectionParams::Nodal { nodes } => nodes.len(),
        }
    }

    fn solve(&self, eta: &[f64]) -> Result<Element> {
        if eta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: eta.len() });
        }
        Ok(Element::Breakthrough(Arc::new(self.solve_exact(eta)?)))
    }

    fn distance(&self, u: &Element, v: &Element) -> Result<f64> {
        Ok(advection_distance(breakthrough(u)?, breakthrough(v)?, self.p))
    }

    fn norm(&self, u: &Element) -> Result<f64> {
        let s = breakthrough(u)?;
        let m = adaptive_simpson(|x| 1.0 - s.breakthrough(x).clamp(0.0, 1.0), -1.0, 1.0, 1e-12);
        Ok(m.max(0.0).powf(1.0 / self.p))
    }

    /// `‖c − c̄‖_{L¹([−1,1])}`
    fn param_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        self.coefficient(x).l1_distance(&self.coefficient(y))
    }

    /// `r^{−2/p}`
    fn lipschitz(&self) -> f64 {
        self.r.powf(-2.0 / self.p)
    }

    fn holder_exponent(&self) -> f64 {
        1.0 / self.p
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        match &self.params {
            AdvectionParams::Basis { phis, .. } => (0..phis.len()).map(|_| rng.random_range(-1.0..=1.0)).collect(),
            AdvectionParams::Nodal { nodes } => (0..nodes.len()).map(|_| rng.random_range(self.r..=self.big_r)).collect(),
        }
    }

    fn euclidean_factors(&self) -> Option<Vec<(&'static str, f64)>> {
        if self.p != 1.0 {
            return None;
        }
        let mus = self.basis_norms();
        if mus.is_empty() {
            return None;
        }
        Some(vec![("S_Lambda", mus.iter().map(|m| m * m).sum::<f64>().sqrt()), ("S_0", self.lipschitz())])
    }
}
