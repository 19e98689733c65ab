use crate::fem::quadrature::{map_point, GAUSS3};
use crate::fem::{assemble_advection_reaction, assemble_elliptic_at, assemble_load, CoefficientField, FemSpace, Mesh, Snapshot};
use crate::linalg::{bicgstab, sym2_eigenvalues, CsrMatrix, EnvelopeCholesky, DEFAULT_TOL};
use crate::{Error, Result};

/// Source or initial datum, either as a field or as its assembled load
/// vector `(∫ f φᵢ)ᵢ` over all nodes.
#[derive(Debug, Clone)]
pub enum Load {
    Field(CoefficientField),
    Assembled(Vec<f64>),
}

impl Load {
    fn time_dependent(&self) -> bool {
        matches!(self, Load::Field(f) if f.time_dependent())
    }

    fn vector(&self, mesh: &Mesh, t: f64) -> Result<Vec<f64>> {
        match self {
            Load::Field(f) => assemble_load(mesh, f, t),
            Load::Assembled(v) if v.len() == mesh.node_count() => Ok(v.clone()),
            Load::Assembled(v) => Err(Error::DimensionMismatch { expected: mesh.node_count(), got: v.len() }),
        }
    }
}

/// `u_t − ∇·(a∇u) + b·∇u + cu = f`, `u(0) = g`, `u = 0` on the pinned nodes.
#[derive(Debug, Clone)]
pub struct ParabolicProblem {
    pub a: CoefficientField,
    pub b: CoefficientField,
    pub c: CoefficientField,
    pub f: Load,
    pub g: Load,
}

/// Largest mesh Péclet number `‖b‖ h_T / (2 λ_min(a))` over quadrature points.
pub fn mesh_peclet(mesh: &Mesh, a: &CoefficientField, b: &CoefficientField, t: f64) -> f64 {
    if b.is_zero() {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for ti in 0..mesh.triangle_count() {
        let v = mesh.vertices(ti);
        let h = (0..3)
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % 3]);
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max);
        for (bary, _) in GAUSS3.iter() {
            let x = map_point(&v, bary);
            let bv = b.vector_at(x, t);
            let (lo, _) = sym2_eigenvalues(&a.matrix_at(x, t));
            worst = worst.max((bv[0] * bv[0] + bv[1] * bv[1]).sqrt() * h / (2.0 * lo));
        }
    }
    worst
}

enum StepSolver {
    Direct(EnvelopeCholesky),
    Iterative(CsrMatrix),
}

fn step_solver(space: &FemSpace, p: &ParabolicProblem, dt: f64, t: f64) -> Result<StepSolver> {
    let mesh = space.mesh();
    let pe = mesh_peclet(mesh, &p.a, &p.b, t);
    if pe >= 1.0 {
        return Err(Error::Peclet { peclet: pe });
    }
    let k = assemble_elliptic_at(mesh, &p.a, None, t)?;
    let br = assemble_advection_reaction(mesh, &p.b, &p.c, t)?;
    let full = CsrMatrix::linear_combination(&[(1.0 / dt, space.mass()), (1.0, &k), (1.0, &br)]);
    let red = space.dofs().reduce_matrix(&full);
    if p.b.is_zero() {
        Ok(StepSolver::Direct(EnvelopeCholesky::factor(&red)?))
    } else {
        Ok(StepSolver::Iterative(red))
    }
}

impl StepSolver {
    fn solve(&self, rhs: &[f64], guess: &[f64]) -> Result<Vec<f64>> {
        match self {
            StepSolver::Direct(ch) => Ok(ch.solve(rhs)),
            StepSolver::Iterative(m) => Ok(bicgstab(m, rhs, guess, DEFAULT_TOL, 20 * m.nrows() + 100)?.x),
        }
    }
}

/// Backward Euler with coefficients at the new time level; `u⁰` is the L²
/// projection of `g`. Returns `steps + 1` levels on the grid `kT/steps`.
pub fn solve_parabolic(space: &FemSpace, p: &ParabolicProblem, steps: usize, t_final: f64) -> Result<Snapshot> {
    if steps == 0 || !(t_final > 0.0) {
        return Err(Error::InvalidInput("need steps >= 1 and T > 0".into()));
    }
    let mesh = space.mesh();
    let dofs = space.dofs();
    let n = mesh.node_count();
    let dt = t_final / steps as f64;
    let coeffs_vary = p.a.time_dependent() || p.b.time_dependent() || p.c.time_dependent();

    let g = dofs.reduce(&p.g.vector(mesh, 0.0)?);
    let mut u = space.mass_factor()?.solve(&g);
    let mut values = Vec::with_capacity(n * (steps + 1));
    values.extend(dofs.reconstruct(&u));

    let f_static = if p.f.time_dependent() { None } else { Some(dofs.reduce(&p.f.vector(mesh, 0.0)?)) };
    let mut solver = if coeffs_vary { None } else { Some(step_solver(space, p, dt, 0.0)?) };
    let m_red = space.reduced_mass();
    for k in 1..=steps {
        let t = k as f64 * dt;
        if coeffs_vary {
            solver = Some(step_solver(space, p, dt, t)?);
        }
        let f = match &f_static {
            Some(f) => f.clone(),
            None => dofs.reduce(&p.f.vector(mesh, t)?),
        };
        let mu = m_red.mul_vec(&u);
        let rhs: Vec<f64> = mu.iter().zip(&f).map(|(m, f)| m / dt + f).collect();
        u = solver.as_ref().expect("step solver").solve(&rhs, &u)?;
        values.extend(dofs.reconstruct(&u));
    }
    let mut s = space.snapshot(values);
    s.time_grid = Some((0..=steps).map(|k| k as f64 * dt).collect());
    Ok(s)
}
