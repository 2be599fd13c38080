use crate::mesh::{BoundaryTag, Point};
use crate::space::{BasisEval, FeSpace};
use crate::sparse::CsrMatrix;

use super::inverse::{estimate_ci, CiEstimate};
use super::problem::{Alpha, StokesProblem};
use super::quadrature::{interval_rule, triangle_rule, QuadratureRule};
use super::FormsError;

/// Default stabilization for P1P1, where the inverse inequality is vacuous.
pub const DEFAULT_ALPHA_P1: f64 = 0.1;
/// Default alpha for higher-order velocity, as a fraction of C_I.
pub const DEFAULT_ALPHA_CI_FRACTION: f64 = 0.25;

/// Combined-system indices of the local DOFs of element `t`: velocity
/// `(node a, component c)` at `2a + c`, then the three pressures.
fn local_dofs(space: &FeSpace, t: usize) -> Vec<usize> {
    let mut dofs: Vec<usize> = space
        .velocity_nodes(t)
        .iter()
        .flat_map(|&n| [2 * n, 2 * n + 1])
        .collect();
    dofs.extend_from_slice(&space.pressure_dofs(t));
    dofs
}

/// `-A v + grad q` for every local basis function at quadrature point `q`.
/// For `v = phi e_c`: `A v = (lap phi e_c + grad d_c phi) / 2`.
fn local_residuals(vel: &BasisEval, pre: &BasisEval, q: usize) -> Vec<[f64; 2]> {
    let mut r = Vec::with_capacity(2 * vel.n_basis + pre.n_basis);
    for a in 0..vel.n_basis {
        let h = vel.hessian(q, a);
        let lap = h[0][0] + h[1][1];
        for c in 0..2 {
            let mut v = [-0.5 * h[0][c], -0.5 * h[1][c]];
            v[c] -= 0.5 * lap;
            r.push(v);
        }
    }
    for j in 0..pre.n_basis {
        r.push(pre.gradient(q, j));
    }
    r
}

fn rule(degree: usize) -> QuadratureRule {
    triangle_rule(degree).expect("configured quadrature degree is supported")
}

fn scatter(triplets: &mut Vec<(usize, usize, f64)>, dofs: &[usize], local: &[f64]) {
    let n = dofs.len();
    for i in 0..n {
        for j in 0..n {
            let v = local[i * n + j];
            if v != 0.0 {
                triplets.push((dofs[i], dofs[j], v));
            }
        }
    }
}

/// Local matrix of `B(w, r; v, q) = (D(w), D(v)) - (div v, r) - (div w, q)`
/// with rows indexed by test functions.
pub(crate) fn local_b(vel: &BasisEval, pre: &BasisEval, weights: &[f64]) -> Vec<f64> {
    let nv = 2 * vel.n_basis;
    let n = nv + pre.n_basis;
    let mut m = vec![0.0; n * n];
    for (q, &w) in weights.iter().enumerate() {
        for b in 0..vel.n_basis {
            let gb = vel.gradient(q, b);
            for a in 0..vel.n_basis {
                let ga = vel.gradient(q, a);
                let dot = ga[0] * gb[0] + ga[1] * gb[1];
                for d in 0..2 {
                    for c in 0..2 {
                        // (D(phi_a e_c), D(phi_b e_d)) = (delta_cd grad a . grad b + d_d a d_c b) / 2
                        let delta = if c == d { dot } else { 0.0 };
                        m[(2 * b + d) * n + 2 * a + c] += w * 0.5 * (delta + ga[d] * gb[c]);
                    }
                }
            }
            for j in 0..pre.n_basis {
                let psi = pre.value(q, j);
                for d in 0..2 {
                    let v = -w * gb[d] * psi;
                    m[(2 * b + d) * n + nv + j] += v;
                    m[(nv + j) * n + 2 * b + d] += v;
                }
            }
        }
    }
    m
}

/// Local matrix of `sum_K h_K^2 (-A w + grad r, -A v + grad q)_K`.
pub(crate) fn local_sh(vel: &BasisEval, pre: &BasisEval, weights: &[f64], h2: f64) -> Vec<f64> {
    let n = 2 * vel.n_basis + pre.n_basis;
    let mut m = vec![0.0; n * n];
    for (q, &w) in weights.iter().enumerate() {
        let r = local_residuals(vel, pre, q);
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] += w * h2 * (r[i][0] * r[j][0] + r[i][1] * r[j][1]);
            }
        }
    }
    m
}

fn scaled_weights(rule: &QuadratureRule, det: f64) -> Vec<f64> {
    rule.weights.iter().map(|w| w * det.abs()).collect()
}

/// The bilinear form B over all DOFs (no boundary conditions applied).
pub fn assemble_b(space: &FeSpace) -> CsrMatrix {
    let rule = rule(2 * space.velocity_degree());
    let mut triplets = Vec::new();
    for t in 0..space.mesh().n_triangles() {
        let basis = space.eval_basis(t, &rule.points);
        let w = scaled_weights(&rule, basis.geometry.det);
        let local = local_b(&basis.velocity, &basis.pressure, &w);
        scatter(&mut triplets, &local_dofs(space, t), &local);
    }
    CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets)
}

/// The stabilization form S_h over all DOFs.
pub fn assemble_sh(space: &FeSpace) -> CsrMatrix {
    let rule = rule(2 * space.velocity_degree());
    let mut triplets = Vec::new();
    for t in 0..space.mesh().n_triangles() {
        let basis = space.eval_basis(t, &rule.points);
        let w = scaled_weights(&rule, basis.geometry.det);
        let h2 = basis.geometry.diameter.powi(2);
        let local = local_sh(&basis.velocity, &basis.pressure, &w, h2);
        scatter(&mut triplets, &local_dofs(space, t), &local);
    }
    CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets)
}

/// `F(v, q) = (f, v) + <t, v>_{Gamma_N} - (g, q)`.
pub fn assemble_f(space: &FeSpace, problem: &StokesProblem) -> Vec<f64> {
    let quad = problem.quadrature_for(space.pair());
    let mesh = space.mesh();
    let mut rhs = vec![0.0; space.n_dofs()];
    let load = rule(quad.load);
    let div = rule(quad.divergence);
    for t in 0..mesh.n_triangles() {
        let origin = mesh.vertex(mesh.triangle(t)[0]);
        let nodes = space.velocity_nodes(t);

        let basis = space.eval_basis(t, &load.points);
        for (q, &xi) in load.points.iter().enumerate() {
            let w = load.weights[q] * basis.geometry.det.abs();
            let f = (problem.body_force)(basis.geometry.map(origin, xi));
            for (a, &node) in nodes.iter().enumerate() {
                let phi = basis.velocity.value(q, a);
                rhs[2 * node] += w * f[0] * phi;
                rhs[2 * node + 1] += w * f[1] * phi;
            }
        }

        let basis = space.eval_basis(t, &div.points);
        let pdofs = space.pressure_dofs(t);
        for (q, &xi) in div.points.iter().enumerate() {
            let w = div.weights[q] * basis.geometry.det.abs();
            let g = (problem.divergence)(basis.geometry.map(origin, xi));
            for (j, &dof) in pdofs.iter().enumerate() {
                rhs[dof] -= w * g * basis.pressure.value(q, j);
            }
        }
    }

    let (s_nodes, s_weights) = interval_rule(quad.load);
    for_each_boundary_edge(
        space,
        BoundaryTag::Neumann,
        |t, local_edge, ref_points| {
            let basis = space.eval_basis(t, ref_points);
            let geo = basis.geometry;
            let len = geo.edge_lengths[local_edge];
            let normal = geo.normals[local_edge];
            let origin = mesh.vertex(mesh.triangle(t)[0]);
            for (q, &xi) in ref_points.iter().enumerate() {
                let w = s_weights[q] * len;
                let traction = (problem.traction)(geo.map(origin, xi), normal);
                for (a, &node) in space.velocity_nodes(t).iter().enumerate() {
                    let phi = basis.velocity.value(q, a);
                    rhs[2 * node] += w * traction[0] * phi;
                    rhs[2 * node + 1] += w * traction[1] * phi;
                }
            }
        },
        &s_nodes,
    );
    rhs
}

/// Calls `visit(triangle, local edge, reference points)` for every boundary
/// edge carrying `tag`; the points are the images of `params` in `[0, 1]`
/// along the edge from its first to its second vertex.
pub(crate) fn for_each_boundary_edge(
    space: &FeSpace,
    tag: BoundaryTag,
    mut visit: impl FnMut(usize, usize, &[Point]),
    params: &[f64],
) {
    let mesh = space.mesh();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.tag != Some(tag) {
            continue;
        }
        let t = edge.triangles[0];
        let local = mesh
            .triangle_edges(t)
            .iter()
            .position(|&x| x == e)
            .expect("edge of its triangle");
        let pts = edge_reference_points(mesh.triangle(t), edge.vertices, params);
        visit(t, local, &pts);
    }
}

/// Reference coordinates on triangle `tri` of points `(1 - s) a + s b`
/// along the edge from global vertex `a` to `b`.
pub(crate) fn edge_reference_points(
    tri: [usize; 3],
    [a, b]: [usize; 2],
    params: &[f64],
) -> Vec<Point> {
    const CORNERS: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let la = tri
        .iter()
        .position(|&v| v == a)
        .expect("vertex of triangle");
    let lb = tri
        .iter()
        .position(|&v| v == b)
        .expect("vertex of triangle");
    let (pa, pb) = (CORNERS[la], CORNERS[lb]);
    params
        .iter()
        .map(|&s| [(1.0 - s) * pa[0] + s * pb[0], (1.0 - s) * pa[1] + s * pb[1]])
        .collect()
}

/// `L_h(v, q) = sum_K h_K^2 (f, -A v + grad q)_K`.
pub fn assemble_lh(space: &FeSpace, problem: &StokesProblem) -> Vec<f64> {
    let quad = problem.quadrature_for(space.pair());
    let mesh = space.mesh();
    let rule = rule(quad.load);
    let mut rhs = vec![0.0; space.n_dofs()];
    for t in 0..mesh.n_triangles() {
        let origin = mesh.vertex(mesh.triangle(t)[0]);
        let basis = space.eval_basis(t, &rule.points);
        let h2 = basis.geometry.diameter.powi(2);
        let dofs = local_dofs(space, t);
        for (q, &xi) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * basis.geometry.det.abs();
            let f = (problem.body_force)(basis.geometry.map(origin, xi));
            let r = local_residuals(&basis.velocity, &basis.pressure, q);
            for (i, &dof) in dofs.iter().enumerate() {
                rhs[dof] += w * h2 * (f[0] * r[i][0] + f[1] * r[i][1]);
            }
        }
    }
    rhs
}

/// Resolves `Alpha::Auto` and checks `0 <= alpha < C_I`.
///
/// `alpha = 0` is accepted and gives the unstabilized mixed method.
pub fn resolve_alpha(space: &FeSpace, alpha: Alpha) -> Result<(f64, CiEstimate), FormsError> {
    let ci = estimate_ci(space);
    let value = match alpha {
        Alpha::Auto => match ci {
            CiEstimate::Unbounded => DEFAULT_ALPHA_P1,
            CiEstimate::Finite(c) => DEFAULT_ALPHA_CI_FRACTION * c,
        },
        Alpha::Value(v) => v,
    };
    if !value.is_finite() || value < 0.0 {
        return Err(FormsError::InvalidAlpha(value));
    }
    if let CiEstimate::Finite(c) = ci {
        if value >= c {
            return Err(FormsError::InadmissibleAlpha {
                alpha: value,
                ci: c,
            });
        }
    }
    Ok((value, ci))
}

/// `B_h = B - alpha S_h` and `F_h = F - alpha L_h` with homogeneous
/// Dirichlet DOFs removed and, without a Neumann boundary, a bordered
/// zero-mean pressure constraint.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// B_h over all DOFs.
    pub matrix: CsrMatrix,
    /// F_h over all DOFs.
    pub rhs: Vec<f64>,
    /// Combined-system DOF of each reduced unknown (the multiplier excluded).
    pub free_dofs: Vec<usize>,
    pub reduced_matrix: CsrMatrix,
    pub reduced_rhs: Vec<f64>,
    /// `int_Omega psi_j` for each pressure basis function when the mean is constrained.
    pub mean_constraint: Option<Vec<f64>>,
    pub n_u: usize,
    pub n_p: usize,
    pub alpha: f64,
    pub ci: CiEstimate,
}

impl AssembledSystem {
    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// Expands a reduced vector to all DOFs, with zeros on Dirichlet DOFs.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_u + self.n_p];
        for (k, &dof) in self.free_dofs.iter().enumerate() {
            full[dof] = reduced[k];
        }
        full
    }
}

pub fn assemble_system(
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<AssembledSystem, FormsError> {
    let (alpha, ci) = resolve_alpha(space, problem.alpha)?;
    let b = assemble_b(space);
    let rhs_f = assemble_f(space, problem);
    let (matrix, rhs) = if alpha == 0.0 {
        (b, rhs_f)
    } else {
        let s = assemble_sh(space);
        let l = assemble_lh(space, problem);
        let rhs = rhs_f.iter().zip(&l).map(|(f, l)| f - alpha * l).collect();
        (b.add_scaled(-alpha, &s), rhs)
    };

    let mut is_dirichlet = vec![false; space.n_dofs()];
    for &d in space.dirichlet_dofs() {
        is_dirichlet[d] = true;
    }
    let free_dofs: Vec<usize> = (0..space.n_dofs()).filter(|&d| !is_dirichlet[d]).collect();
    let reduced = matrix.extract(&free_dofs, &free_dofs);
    let mut reduced_rhs: Vec<f64> = free_dofs.iter().map(|&d| rhs[d]).collect();

    let (reduced_matrix, mean_constraint) = if space.mesh().has_neumann() {
        (reduced, None)
    } else {
        let weights = pressure_means(space);
        let n = free_dofs.len();
        let border = n;
        let mut t: Vec<_> = reduced.triplets().collect();
        for (k, &dof) in free_dofs.iter().enumerate() {
            if dof >= space.n_u() {
                let m = weights[dof - space.n_u()];
                t.push((border, k, m));
                t.push((k, border, m));
            }
        }
        reduced_rhs.push(0.0);
        (CsrMatrix::from_triplets(n + 1, n + 1, t), Some(weights))
    };

    Ok(AssembledSystem {
        matrix,
        rhs,
        free_dofs,
        reduced_matrix,
        reduced_rhs,
        mean_constraint,
        n_u: space.n_u(),
        n_p: space.n_p(),
        alpha,
        ci,
    })
}

/// `int_Omega psi_j` for each P1 pressure basis function.
pub fn pressure_means(space: &FeSpace) -> Vec<f64> {
    let mesh = space.mesh();
    let mut m = vec![0.0; space.n_p()];
    for t in 0..mesh.n_triangles() {
        let area = mesh.geometry(t).area;
        for v in mesh.triangle(t) {
            m[v] += area / 3.0;
        }
    }
    m
}

/// Pressure mass matrix `(psi_i, psi_j)`, size `n_p`.
pub fn pressure_mass(space: &FeSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let mut t = Vec::new();
    for k in 0..mesh.n_triangles() {
        let area = mesh.geometry(k).area;
        let tri = mesh.triangle(k);
        for i in 0..3 {
            for j in 0..3 {
                let v = if i == j { area / 6.0 } else { area / 12.0 };
                t.push((tri[i], tri[j], v));
            }
        }
    }
    CsrMatrix::from_triplets(space.n_p(), space.n_p(), t)
}
