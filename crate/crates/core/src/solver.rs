//! Direct solution of the reduced saddle system and error norms against
//! closed-form solutions.

use std::fmt;

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::forms::quadrature::triangle_rule;
use crate::forms::{
    assemble_system, generalized_eigenvalues, AssembledSystem, CiEstimate, ExactSolution,
    FormsError, StokesProblem,
};
use crate::space::FeSpace;
use crate::sparse::CsrMatrix;

/// Required relative algebraic residual.
pub const RESIDUAL_TOL: f64 = 1e-9;
const MAX_REFINEMENT_STEPS: usize = 3;

/// Part of the saddle system an unknown belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Velocity,
    Pressure,
    MeanConstraint,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::Velocity => "velocity",
            Block::Pressure => "pressure",
            Block::MeanConstraint => "mean-constraint",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error("singular factorization in the {block} block: {detail}")]
    Singular { block: Block, detail: String },
    #[error("non-finite solution entries in the {block} block")]
    NonFinite { block: Block },
    #[error(
        "relative residual {residual:e} exceeds {RESIDUAL_TOL:e}, largest in the {block} block"
    )]
    Residual { residual: f64, block: Block },
    #[error("problem has no closed-form solution")]
    MissingExact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    /// `||M x - b|| / ||b||` (absolute when `b = 0`).
    pub residual: f64,
    pub refinement_steps: usize,
    /// Largest `|x_i|`, a cheap indicator of pivot breakdown.
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    /// Length `n_u`, zero on Dirichlet DOFs.
    pub velocity: Vec<f64>,
    /// Length `n_p`.
    pub pressure: Vec<f64>,
    /// Lagrange multiplier of the zero-mean constraint, if any.
    pub multiplier: Option<f64>,
    pub alpha: f64,
    pub ci: CiEstimate,
    pub diagnostics: SolveDiagnostics,
}

impl DiscreteSolution {
    /// Concatenated `(u_h, p_h)` indexed like the combined DOFs.
    pub fn combined(&self) -> Vec<f64> {
        let mut x = self.velocity.clone();
        x.extend_from_slice(&self.pressure);
        x
    }
}

fn block_of(system: &AssembledSystem, k: usize) -> Block {
    match system.free_dofs.get(k) {
        Some(&d) if d < system.n_u => Block::Velocity,
        Some(_) => Block::Pressure,
        None => Block::MeanConstraint,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(m: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    m.mul_vec(x).iter().zip(b).map(|(ax, b)| b - ax).collect()
}

/// Sparse LU with partial pivoting followed by iterative refinement.
pub fn solve(system: &AssembledSystem) -> Result<DiscreteSolution, SolverError> {
    let m = &system.reduced_matrix;
    let b = &system.reduced_rhs;
    let n = b.len();

    if let Some(k) = (0..n).find(|&k| m.row(k).all(|(_, v)| v == 0.0)) {
        return Err(SolverError::Singular {
            block: block_of(system, k),
            detail: format!("row {k} is empty"),
        });
    }
    let lu = m.to_faer().sp_lu().map_err(|e| {
        let block = match e {
            faer::sparse::linalg::LuError::SymbolicSingular { index } if index < n => {
                block_of(system, index)
            }
            _ => Block::Pressure,
        };
        SolverError::Singular {
            block,
            detail: format!("{e:?}"),
        }
    })?;

    let lu_solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(x.as_mut());
        (0..n).map(|i| x[(i, 0)]).collect()
    };

    let bnorm = norm(b);
    let relative = |r: &[f64]| {
        if bnorm > 0.0 {
            norm(r) / bnorm
        } else {
            norm(r)
        }
    };
    let mut x = lu_solve(b);
    if let Some(k) = x.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite {
            block: block_of(system, k),
        });
    }
    let mut r = residual(m, &x, b);
    let mut res = relative(&r);
    let mut steps = 0;
    while res > 0.0 && steps < MAX_REFINEMENT_STEPS {
        let dx = lu_solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let r_trial = residual(m, &trial, b);
        let res_trial = relative(&r_trial);
        if !(res_trial < res) {
            break;
        }
        x = trial;
        r = r_trial;
        res = res_trial;
        steps += 1;
    }
    if !res.is_finite() || res > RESIDUAL_TOL {
        let k = (0..n)
            .max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs()))
            .unwrap_or(0);
        return Err(SolverError::Residual {
            residual: res,
            block: block_of(system, k),
        });
    }

    let full = system.expand(&x[..system.n_free()]);
    let max_abs = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(DiscreteSolution {
        velocity: full[..system.n_u].to_vec(),
        pressure: full[system.n_u..].to_vec(),
        multiplier: system.mean_constraint.as_ref().map(|_| x[n - 1]),
        alpha: system.alpha,
        ci: system.ci,
        diagnostics: SolveDiagnostics {
            residual: res,
            refinement_steps: steps,
            max_abs,
        },
    })
}

/// Assembles and solves in one step.
pub fn solve_problem(
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<DiscreteSolution, SolverError> {
    solve(&assemble_system(space, problem)?)
}

/// `||D(u - u_h)||_0`, `||u - u_h||_1` and `||p - p_h||_0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub strain_l2: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
}

impl ErrorNorms {
    /// `||u - u_h||_1 + ||p - p_h||_0`.
    pub fn combined(&self) -> f64 {
        self.velocity_h1 + self.pressure_l2
    }
}

/// Squared per-element errors `[||D e_u||^2, ||e_u||_1^2, ||e_p||^2]`.
///
/// Without a Neumann boundary the pressure is compared modulo constants:
/// the exact pressure is shifted to the mean of `p_h`.
pub fn element_errors(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<Vec<[f64; 3]>, SolverError> {
    let exact = problem.exact.as_ref().ok_or(SolverError::MissingExact)?;
    let mesh = space.mesh();
    let rule = triangle_rule(problem.quadrature_for(space.pair()).error)?;
    let shift = if mesh.has_neumann() {
        0.0
    } else {
        pressure_mean_gap(solution, space, exact.as_ref(), &rule.points, &rule.weights)
    };
    let mut out = Vec::with_capacity(mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let basis = space.eval_basis(t, &rule.points);
        let origin = mesh.vertex(mesh.triangle(t)[0]);
        let mut e = [0.0; 3];
        for (q, &xi) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * basis.geometry.det.abs();
            let x = basis.geometry.map(origin, xi);
            let uh = space.velocity_at(&solution.velocity, t, &basis.velocity, q);
            let ph = space.pressure_at(&solution.pressure, t, &basis.pressure, q);
            let u = exact.velocity(x);
            let gu = exact.velocity_gradient(x);
            let ev = [u[0] - uh.value[0], u[1] - uh.value[1]];
            let mut g = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    g[i][j] = gu[i][j] - uh.grad[i][j];
                }
            }
            let d01 = 0.5 * (g[0][1] + g[1][0]);
            e[0] += w * (g[0][0] * g[0][0] + 2.0 * d01 * d01 + g[1][1] * g[1][1]);
            let grad2: f64 = g.iter().flatten().map(|v| v * v).sum();
            e[1] += w * (ev[0] * ev[0] + ev[1] * ev[1] + grad2);
            let ep = exact.pressure(x) + shift - ph.value;
            e[2] += w * ep * ep;
        }
        out.push(e);
    }
    Ok(out)
}

/// `mean(p_h) - mean(p)` over the domain.
fn pressure_mean_gap(
    solution: &DiscreteSolution,
    space: &FeSpace,
    exact: &dyn ExactSolution,
    points: &[[f64; 2]],
    weights: &[f64],
) -> f64 {
    let mesh = space.mesh();
    let mut gap = 0.0;
    for t in 0..mesh.n_triangles() {
        let basis = space.eval_basis(t, points);
        let origin = mesh.vertex(mesh.triangle(t)[0]);
        for (q, &xi) in points.iter().enumerate() {
            let w = weights[q] * basis.geometry.det.abs();
            let ph = space
                .pressure_at(&solution.pressure, t, &basis.pressure, q)
                .value;
            gap += w * (ph - exact.pressure(basis.geometry.map(origin, xi)));
        }
    }
    gap / mesh.total_area()
}

pub fn functional_norms(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<ErrorNorms, SolverError> {
    let per = element_errors(solution, space, problem)?;
    let sum = |i: usize| per.iter().map(|e| e[i]).sum::<f64>().sqrt();
    Ok(ErrorNorms {
        strain_l2: sum(0),
        velocity_h1: sum(1),
        pressure_l2: sum(2),
    })
}

/// Mesh-dependent pressure seminorm `(sum_K h_K^2 ||grad p_h||_K^2)^{1/2}`.
pub fn pressure_seminorm(space: &FeSpace, pressure: &[f64]) -> f64 {
    let mesh = space.mesh();
    let centroid = [[1.0 / 3.0, 1.0 / 3.0]];
    let mut s = 0.0;
    for t in 0..mesh.n_triangles() {
        let basis = space.eval_basis(t, &centroid);
        let g = space.pressure_at(pressure, t, &basis.pressure, 0).grad;
        s += basis.geometry.diameter.powi(2) * basis.geometry.area * (g[0] * g[0] + g[1] * g[1]);
    }
    s.sqrt()
}

/// Smallest relevant eigenvalue of the pressure Schur complement
/// `S = -M_pp + M_up^T M_uu^{-1} M_up` of the reduced system, measured
/// against the pressure mass matrix. Without a Neumann boundary the
/// constant pressure is in the kernel and the zero eigenvalue is skipped.
pub fn inf_sup_probe(system: &AssembledSystem, space: &FeSpace) -> Result<f64, SolverError> {
    let (vel, pre): (Vec<usize>, Vec<usize>) =
        (0..system.n_free()).partition(|&k| system.free_dofs[k] < system.n_u);
    let m = &system.reduced_matrix;
    let m_uu = m.extract(&vel, &vel);
    let m_up = m.extract(&vel, &pre);
    let m_pp = m.extract(&pre, &pre);
    let lu = m_uu.to_faer().sp_lu().map_err(|e| SolverError::Singular {
        block: Block::Velocity,
        detail: format!("{e:?}"),
    })?;
    let np = pre.len();
    let mut x = Mat::<f64>::zeros(vel.len(), np);
    for (r, c, v) in m_up.triplets() {
        x[(r, c)] = v;
    }
    lu.solve_in_place(x.as_mut());
    let mut s = Mat::<f64>::zeros(np, np);
    for (r, c, v) in m_pp.triplets() {
        s[(r, c)] -= v;
    }
    for (r, i, v) in m_up.triplets() {
        for j in 0..np {
            s[(i, j)] += v * x[(r, j)];
        }
    }
    if (0..np).any(|i| (0..np).any(|j| !s[(i, j)].is_finite())) {
        return Err(SolverError::NonFinite {
            block: Block::Pressure,
        });
    }
    let mass = crate::forms::pressure_mass(space);
    let mut mp = Mat::<f64>::zeros(np, np);
    for (r, c, v) in mass.triplets() {
        mp[(r, c)] = v;
    }
    let eig = generalized_eigenvalues(&s, &mp, 0.0);
    let skip = usize::from(system.mean_constraint.is_some());
    Ok(eig.get(skip).copied().unwrap_or(f64::NAN))
}
