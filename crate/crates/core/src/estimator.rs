//! Residual a posteriori error estimation, data oscillation and
//! effectivity accounting.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::forms::quadrature::{interval_rule, triangle_rule};
use crate::forms::{edge_reference_points, strain_divergence, stress_times_normal, StokesProblem};
use crate::mesh::{BoundaryTag, Point};
use crate::solver::{element_errors, functional_norms, DiscreteSolution, ErrorNorms, SolverError};
use crate::space::FeSpace;
use crate::sparse::CsrMatrix;

/// Below this, estimator and error are both treated as zero.
pub const ZERO_GUARD: f64 = 1e-9;

/// How `f_h` is obtained for the data oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// L2 projection onto the continuous velocity space.
    #[default]
    Global,
    /// Independent L2 projections onto `P_k(K)` on each element.
    Elementwise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// `eta_K` per triangle.
    pub eta_k: Vec<f64>,
    /// `eta_E` per edge; zero on Dirichlet edges.
    pub eta_e: Vec<f64>,
    /// `osc_K(f)` per triangle.
    pub osc_k: Vec<f64>,
    /// `osc_E(t)` per edge; zero off the Neumann boundary.
    pub osc_e: Vec<f64>,
    pub eta: f64,
    pub osc_f: f64,
    pub osc_t: f64,
    pub true_errors: Option<ErrorNorms>,
    /// `eta / (||u - u_h||_1 + ||p - p_h||_0)`, 1 when both vanish.
    pub effectivity: Option<f64>,
}

impl ErrorReport {
    /// `eta_K^2` plus half of `eta_E^2` for each interior edge of `K` and
    /// all of it for each boundary edge, so the indicators sum to `eta^2`.
    pub fn marking_indicators(&self, space: &FeSpace) -> Vec<f64> {
        let mesh = space.mesh();
        (0..mesh.n_triangles())
            .map(|t| {
                let edges: f64 = mesh
                    .triangle_edges(t)
                    .iter()
                    .map(|&e| {
                        let share = if mesh.edge(e).is_boundary() { 1.0 } else { 0.5 };
                        share * self.eta_e[e].powi(2)
                    })
                    .sum();
                self.eta_k[t].powi(2) + edges
            })
            .collect()
    }
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `eta_K^2 = h_K^2 ||A u_h - grad p_h + f||_K^2 + ||div u_h - g||_K^2`.
pub fn element_estimator(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
    t: usize,
) -> f64 {
    let rule =
        triangle_rule(problem.quadrature_for(space.pair()).estimator).expect("supported degree");
    let mesh = space.mesh();
    let basis = space.eval_basis(t, &rule.points);
    let origin = mesh.vertex(mesh.triangle(t)[0]);
    let h2 = basis.geometry.diameter.powi(2);
    let mut s = 0.0;
    for (q, &xi) in rule.points.iter().enumerate() {
        let w = rule.weights[q] * basis.geometry.det.abs();
        let x = basis.geometry.map(origin, xi);
        let u = space.velocity_at(&solution.velocity, t, &basis.velocity, q);
        let p = space.pressure_at(&solution.pressure, t, &basis.pressure, q);
        let au = strain_divergence(u.hess);
        let f = (problem.body_force)(x);
        let r = [au[0] - p.grad[0] + f[0], au[1] - p.grad[1] + f[1]];
        let d = u.grad[0][0] + u.grad[1][1] - (problem.divergence)(x);
        s += w * (h2 * (r[0] * r[0] + r[1] * r[1]) + d * d);
    }
    s.sqrt()
}

/// `(D(u_h) - p_h I) n` evaluated from triangle `t` at edge parameters
/// `params` running from `vertices[0]` to `vertices[1]`.
fn edge_traction(
    solution: &DiscreteSolution,
    space: &FeSpace,
    t: usize,
    vertices: [usize; 2],
    params: &[f64],
    normal: [f64; 2],
) -> Vec<[f64; 2]> {
    let pts = edge_reference_points(space.mesh().triangle(t), vertices, params);
    let basis = space.eval_basis(t, &pts);
    (0..pts.len())
        .map(|q| {
            let u = space.velocity_at(&solution.velocity, t, &basis.velocity, q);
            let p = space.pressure_at(&solution.pressure, t, &basis.pressure, q);
            stress_times_normal(u.grad, p.value, normal)
        })
        .collect()
}

/// `[[(D(u_h) - p_h I) n]] = (sigma|_from - sigma|_other) n` at the edge
/// parameters, for a fixed unit normal `n`. Swapping the two sides flips
/// the sign. Returns `None` for boundary edges.
pub fn traction_jump(
    solution: &DiscreteSolution,
    space: &FeSpace,
    e: usize,
    from: usize,
    params: &[f64],
    normal: [f64; 2],
) -> Option<Vec<[f64; 2]>> {
    let edge = space.mesh().edge(e);
    let other = edge.neighbor(from)?;
    let a = edge_traction(solution, space, from, edge.vertices, params, normal);
    let b = edge_traction(solution, space, other, edge.vertices, params, normal);
    Some(
        a.iter()
            .zip(&b)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
            .collect(),
    )
}

fn local_edge(space: &FeSpace, t: usize, e: usize) -> usize {
    space
        .mesh()
        .triangle_edges(t)
        .iter()
        .position(|&x| x == e)
        .expect("edge of its triangle")
}

fn edge_point(space: &FeSpace, vertices: [usize; 2], s: f64) -> Point {
    let (a, b) = (
        space.mesh().vertex(vertices[0]),
        space.mesh().vertex(vertices[1]),
    );
    [(1.0 - s) * a[0] + s * b[0], (1.0 - s) * a[1] + s * b[1]]
}

/// `eta_E^2 = h_E ||[[sigma n]]||_E^2` inside, `h_E ||sigma n - t||_E^2` on
/// the Neumann boundary, zero on the Dirichlet boundary.
pub fn edge_estimator(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
    e: usize,
) -> f64 {
    let mesh = space.mesh();
    let edge = mesh.edge(e);
    let (params, weights) = interval_rule(problem.quadrature_for(space.pair()).estimator_edge);
    let t = edge.triangles[0];
    let geo = mesh.geometry(t);
    let li = local_edge(space, t, e);
    let (h_e, normal) = (geo.edge_lengths[li], geo.normals[li]);
    let residual: Vec<[f64; 2]> = match edge.tag {
        Some(BoundaryTag::Dirichlet) => return 0.0,
        Some(BoundaryTag::Neumann) => {
            let sigma = edge_traction(solution, space, t, edge.vertices, &params, normal);
            params
                .iter()
                .zip(&sigma)
                .map(|(&s, sn)| {
                    let tr = (problem.traction)(edge_point(space, edge.vertices, s), normal);
                    [sn[0] - tr[0], sn[1] - tr[1]]
                })
                .collect()
        }
        None => traction_jump(solution, space, e, t, &params, normal).expect("interior edge"),
    };
    let integral: f64 = residual
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * h_e * (r[0] * r[0] + r[1] * r[1]))
        .sum();
    (h_e * integral).sqrt()
}

/// Data oscillation `osc_K(f) = h_K ||f - f_h||_K` per triangle and
/// `osc_E(t) = h_E^{1/2} ||t - t_h||_E` per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Oscillations {
    pub element: Vec<f64>,
    pub edge: Vec<f64>,
}

pub fn oscillations(
    problem: &StokesProblem,
    space: &FeSpace,
    projection: Projection,
) -> Oscillations {
    let quad = problem.quadrature_for(space.pair());
    Oscillations {
        element: body_force_oscillation(problem, space, projection, quad.load, quad.estimator),
        edge: traction_oscillation(problem, space, quad.load),
    }
}

fn scalar_mass(space: &FeSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let rule = triangle_rule(2 * space.velocity_degree()).expect("supported degree");
    let mut t = Vec::new();
    for k in 0..mesh.n_triangles() {
        let basis = space.eval_basis(k, &rule.points);
        let nodes = space.velocity_nodes(k);
        for (q, w) in rule.weights.iter().enumerate() {
            let w = w * basis.geometry.det.abs();
            for (a, &na) in nodes.iter().enumerate() {
                for (b, &nb) in nodes.iter().enumerate() {
                    t.push((
                        na,
                        nb,
                        w * basis.velocity.value(q, a) * basis.velocity.value(q, b),
                    ));
                }
            }
        }
    }
    let n = space.n_velocity_nodes();
    CsrMatrix::from_triplets(n, n, t)
}

fn cholesky_solve(m: &CsrMatrix, rhs: Mat<f64>) -> Mat<f64> {
    let llt = m
        .to_faer()
        .sp_cholesky(Side::Lower)
        .expect("mass matrix is positive definite");
    let mut x = rhs;
    llt.solve_in_place(x.as_mut());
    x
}

fn body_force_oscillation(
    problem: &StokesProblem,
    space: &FeSpace,
    projection: Projection,
    load_degree: usize,
    error_degree: usize,
) -> Vec<f64> {
    let mesh = space.mesh();
    let load = triangle_rule(load_degree).expect("supported degree");
    let nb = space.n_local();

    // per-element load moments (f_c, phi_a)_K
    let moments: Vec<Vec<[f64; 2]>> = (0..mesh.n_triangles())
        .map(|t| {
            let basis = space.eval_basis(t, &load.points);
            let origin = mesh.vertex(mesh.triangle(t)[0]);
            let mut m = vec![[0.0; 2]; nb];
            for (q, &xi) in load.points.iter().enumerate() {
                let w = load.weights[q] * basis.geometry.det.abs();
                let f = (problem.body_force)(basis.geometry.map(origin, xi));
                for (a, ma) in m.iter_mut().enumerate() {
                    let phi = basis.velocity.value(q, a);
                    ma[0] += w * f[0] * phi;
                    ma[1] += w * f[1] * phi;
                }
            }
            m
        })
        .collect();

    // coefficients of f_h per element, local ordering
    let local_coeffs: Vec<Vec<[f64; 2]>> = match projection {
        Projection::Global => {
            let n = space.n_velocity_nodes();
            let mut rhs = Mat::<f64>::zeros(n, 2);
            for (t, m) in moments.iter().enumerate() {
                for (a, &node) in space.velocity_nodes(t).iter().enumerate() {
                    rhs[(node, 0)] += m[a][0];
                    rhs[(node, 1)] += m[a][1];
                }
            }
            let x = cholesky_solve(&scalar_mass(space), rhs);
            (0..mesh.n_triangles())
                .map(|t| {
                    space
                        .velocity_nodes(t)
                        .iter()
                        .map(|&n| [x[(n, 0)], x[(n, 1)]])
                        .collect()
                })
                .collect()
        }
        Projection::Elementwise => {
            let rule = triangle_rule(2 * space.velocity_degree()).expect("supported degree");
            (0..mesh.n_triangles())
                .map(|t| {
                    let basis = space.eval_basis(t, &rule.points);
                    let mut mass = Mat::<f64>::zeros(nb, nb);
                    for (q, w) in rule.weights.iter().enumerate() {
                        let w = w * basis.geometry.det.abs();
                        for a in 0..nb {
                            for b in 0..nb {
                                mass[(a, b)] +=
                                    w * basis.velocity.value(q, a) * basis.velocity.value(q, b);
                            }
                        }
                    }
                    let mut rhs = Mat::<f64>::from_fn(nb, 2, |a, c| moments[t][a][c]);
                    mass.llt(Side::Lower)
                        .expect("local mass is positive definite")
                        .solve_in_place(rhs.as_mut());
                    (0..nb).map(|a| [rhs[(a, 0)], rhs[(a, 1)]]).collect()
                })
                .collect()
        }
    };

    let rule = triangle_rule(error_degree).expect("supported degree");
    (0..mesh.n_triangles())
        .map(|t| {
            let basis = space.eval_basis(t, &rule.points);
            let origin = mesh.vertex(mesh.triangle(t)[0]);
            let mut s = 0.0;
            for (q, &xi) in rule.points.iter().enumerate() {
                let w = rule.weights[q] * basis.geometry.det.abs();
                let f = (problem.body_force)(basis.geometry.map(origin, xi));
                let mut fh = [0.0; 2];
                for (a, c) in local_coeffs[t].iter().enumerate() {
                    let phi = basis.velocity.value(q, a);
                    fh[0] += c[0] * phi;
                    fh[1] += c[1] * phi;
                }
                s += w * ((f[0] - fh[0]).powi(2) + (f[1] - fh[1]).powi(2));
            }
            basis.geometry.diameter * s.sqrt()
        })
        .collect()
}

/// 1D Lagrange basis on `[0, 1]` ordered as (start, end, midpoint).
fn trace_basis(degree: usize, s: f64) -> Vec<f64> {
    match degree {
        1 => vec![1.0 - s, s],
        _ => vec![
            (1.0 - s) * (1.0 - 2.0 * s),
            s * (2.0 * s - 1.0),
            4.0 * s * (1.0 - s),
        ],
    }
}

fn traction_oscillation(problem: &StokesProblem, space: &FeSpace, load_degree: usize) -> Vec<f64> {
    let mesh = space.mesh();
    let mut osc = vec![0.0; mesh.n_edges()];
    let neumann: Vec<usize> = (0..mesh.n_edges())
        .filter(|&e| mesh.edge(e).tag == Some(BoundaryTag::Neumann))
        .collect();
    if neumann.is_empty() {
        return osc;
    }
    let degree = space.velocity_degree();
    let n_v = mesh.n_vertices();
    let edge_nodes = |e: usize| -> Vec<usize> {
        let [a, b] = mesh.edge(e).vertices;
        if degree == 1 {
            vec![a, b]
        } else {
            vec![a, b, n_v + e]
        }
    };
    let mut index = std::collections::BTreeMap::new();
    for &e in &neumann {
        for node in edge_nodes(e) {
            let next = index.len();
            index.entry(node).or_insert(next);
        }
    }
    let n = index.len();
    let (params, weights) = interval_rule(load_degree);
    let normal_of = |e: usize| {
        let t = mesh.edge(e).triangles[0];
        let geo = mesh.geometry(t);
        let li = local_edge(space, t, e);
        (geo.edge_lengths[li], geo.normals[li])
    };

    let mut mass = Vec::new();
    let mut rhs = Mat::<f64>::zeros(n, 2);
    for &e in &neumann {
        let (len, normal) = normal_of(e);
        let nodes: Vec<usize> = edge_nodes(e).iter().map(|k| index[k]).collect();
        for (&s, &w) in params.iter().zip(&weights) {
            let phi = trace_basis(degree, s);
            let tr = (problem.traction)(edge_point(space, mesh.edge(e).vertices, s), normal);
            for (i, &ni) in nodes.iter().enumerate() {
                rhs[(ni, 0)] += w * len * tr[0] * phi[i];
                rhs[(ni, 1)] += w * len * tr[1] * phi[i];
                for (j, &nj) in nodes.iter().enumerate() {
                    mass.push((ni, nj, w * len * phi[i] * phi[j]));
                }
            }
        }
    }
    let x = cholesky_solve(&CsrMatrix::from_triplets(n, n, mass), rhs);

    for &e in &neumann {
        let (len, normal) = normal_of(e);
        let nodes: Vec<usize> = edge_nodes(e).iter().map(|k| index[k]).collect();
        let mut s2 = 0.0;
        for (&s, &w) in params.iter().zip(&weights) {
            let phi = trace_basis(degree, s);
            let tr = (problem.traction)(edge_point(space, mesh.edge(e).vertices, s), normal);
            let mut th = [0.0; 2];
            for (i, &ni) in nodes.iter().enumerate() {
                th[0] += x[(ni, 0)] * phi[i];
                th[1] += x[(ni, 1)] * phi[i];
            }
            s2 += w * len * ((tr[0] - th[0]).powi(2) + (tr[1] - th[1]).powi(2));
        }
        osc[e] = len.sqrt() * s2.sqrt();
    }
    osc
}

/// `eta / err` with the 0/0 case reported as 1.
pub fn guarded_ratio(eta: f64, err: f64) -> f64 {
    if eta <= ZERO_GUARD && err <= ZERO_GUARD {
        1.0
    } else {
        eta / err
    }
}

pub fn global_report(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<ErrorReport, SolverError> {
    global_report_with(solution, space, problem, Projection::Global)
}

pub fn global_report_with(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
    projection: Projection,
) -> Result<ErrorReport, SolverError> {
    let mesh = space.mesh();
    let eta_k: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| element_estimator(solution, space, problem, t))
        .collect();
    let eta_e: Vec<f64> = (0..mesh.n_edges())
        .map(|e| edge_estimator(solution, space, problem, e))
        .collect();
    let osc = oscillations(problem, space, projection);
    let eta = (sum_sq(&eta_k) + sum_sq(&eta_e)).sqrt();
    let true_errors = match problem.exact {
        Some(_) => Some(functional_norms(solution, space, problem)?),
        None => None,
    };
    Ok(ErrorReport {
        effectivity: true_errors.map(|n| guarded_ratio(eta, n.combined())),
        osc_f: sum_sq(&osc.element).sqrt(),
        osc_t: sum_sq(&osc.edge).sqrt(),
        eta_k,
        eta_e,
        osc_k: osc.element,
        osc_e: osc.edge,
        eta,
        true_errors,
    })
}

/// Per-element ratios `eta_K / (||D(u - u_h)||_w + ||p - p_h||_w + osc_w)`
/// over the patch `w` of `K` and its edge neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyAudit {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
}

pub fn efficiency_audit(
    solution: &DiscreteSolution,
    space: &FeSpace,
    problem: &StokesProblem,
) -> Result<EfficiencyAudit, SolverError> {
    let mesh = space.mesh();
    let errors = element_errors(solution, space, problem)?;
    let osc = oscillations(problem, space, Projection::Global);
    let ratios: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| {
            let mut patch = vec![t];
            for &e in &mesh.triangle_edges(t) {
                patch.extend(mesh.edge(e).neighbor(t));
            }
            let (mut strain, mut pressure, mut osc2) = (0.0, 0.0, 0.0);
            for &k in &patch {
                strain += errors[k][0];
                pressure += errors[k][2];
                osc2 += osc.element[k].powi(2);
                osc2 += mesh
                    .triangle_edges(k)
                    .iter()
                    .map(|&e| osc.edge[e].powi(2))
                    .sum::<f64>();
            }
            let denom = strain.sqrt() + pressure.sqrt() + osc2.sqrt();
            guarded_ratio(element_estimator(solution, space, problem, t), denom)
        })
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
    Ok(EfficiencyAudit {
        max: sorted.last().copied().unwrap_or(0.0),
        mean: ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
        median: pick(0.5),
        p90: pick(0.9),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::forms::CiEstimate;
    use crate::mesh::{generate_structured, BoundarySpec, Domain, Side, TriMesh};
    use crate::solver::{solve_problem, SolveDiagnostics};
    use crate::space::{interpolate, ElementPair};

    fn square(n: usize, spec: BoundarySpec) -> Arc<TriMesh> {
        Arc::new(generate_structured(Domain::UnitSquare, n, spec).unwrap())
    }

    fn discrete(space: &FeSpace, u: Vec<f64>, p: Vec<f64>) -> DiscreteSolution {
        assert_eq!((u.len(), p.len()), (space.n_u(), space.n_p()));
        DiscreteSolution {
            velocity: u,
            pressure: p,
            multiplier: None,
            alpha: 0.0,
            ci: CiEstimate::Unbounded,
            diagnostics: SolveDiagnostics {
                residual: 0.0,
                refinement_steps: 0,
                max_abs: 0.0,
            },
        }
    }

    #[test]
    fn zero_solution_with_constant_force() {
        let space = FeSpace::new(square(2, BoundarySpec::all_dirichlet()), ElementPair::P1P1);
        let problem = StokesProblem::new(
            Arc::new(|_| [2.0, -1.0]),
            Arc::new(|_| 0.0),
            Arc::new(|_, _| [0.0, 0.0]),
        );
        let sol = discrete(&space, vec![0.0; space.n_u()], vec![0.0; space.n_p()]);
        for t in 0..space.mesh().n_triangles() {
            let g = space.mesh().geometry(t);
            let expect = (g.diameter.powi(2) * 5.0 * g.area).sqrt();
            assert!((element_estimator(&sol, &space, &problem, t) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_fields_have_no_interior_jumps() {
        let space = FeSpace::new(square(3, BoundarySpec::all_dirichlet()), ElementPair::P1P1);
        let (u, p) = interpolate(
            &space,
            |x| [x[0] + 2.0 * x[1], -x[1]],
            |x| 1.0 - x[0] + x[1],
        );
        let sol = discrete(&space, u, p);
        let problem = StokesProblem::homogeneous();
        for (e, edge) in space.mesh().edges().iter().enumerate() {
            if !edge.is_boundary() {
                assert!(edge_estimator(&sol, &space, &problem, e) < 1e-13);
            }
        }
    }

    #[test]
    fn diagonal_kink_jump() {
        // u = (max(x + y - 1, 0), 0) on the two-triangle square: the upper
        // triangle has grad u_1 = (1, 1), the lower one zero
        let mesh = square(1, BoundarySpec::all_dirichlet());
        let space = FeSpace::new(mesh.clone(), ElementPair::P1P1);
        let (u, p) = interpolate(&space, |x| [(x[0] + x[1] - 1.0).max(0.0), 0.0], |_| 0.0);
        let sol = discrete(&space, u, p);
        let e = (0..mesh.n_edges())
            .find(|&e| !mesh.edge(e).is_boundary())
            .unwrap();
        // D = [[1, 1/2], [1/2, 0]], n = (1, 1)/sqrt2: D n = (3/2, 1/2)/sqrt2,
        // |jump|^2 = 5/4, h_E = sqrt2, eta_E^2 = h_E * |E| * 5/4 = 5/2
        let eta = edge_estimator(&sol, &space, &StokesProblem::homogeneous(), e);
        assert!((eta * eta - 2.5).abs() < 1e-13, "{eta}");

        let n = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        let [a, b] = mesh.edge(e).triangles;
        let ja = traction_jump(&sol, &space, e, a, &[0.3], n).unwrap();
        let jb = traction_jump(&sol, &space, e, b, &[0.3], n).unwrap();
        assert!((ja[0][0] + jb[0][0]).abs() < 1e-15 && (ja[0][1] + jb[0][1]).abs() < 1e-15);
    }

    #[test]
    fn polynomial_data_has_no_oscillation() {
        let space = FeSpace::new(
            square(3, BoundarySpec::with_neumann(&[Side::Right, Side::Top])),
            ElementPair::P2P1,
        );
        let problem = StokesProblem::new(
            Arc::new(|x| [x[0] * x[1], 1.0 - x[1] * x[1]]),
            Arc::new(|_| 0.0),
            Arc::new(|x, _| [x[1] * x[1], x[0] - x[0] * x[1]]),
        );
        for projection in [Projection::Global, Projection::Elementwise] {
            let osc = oscillations(&problem, &space, projection);
            assert!(osc.element.iter().all(|&v| v < 1e-12), "{projection:?}");
            assert!(osc.edge.iter().all(|&v| v < 1e-12));
        }
    }

    #[test]
    fn report_sums_components() {
        let space = FeSpace::new(
            square(4, BoundarySpec::with_neumann(&[Side::Right])),
            ElementPair::P1P1,
        );
        let problem = StokesProblem::new(
            Arc::new(|x| [(3.0 * x[0]).sin(), x[1]]),
            Arc::new(|_| 0.0),
            Arc::new(|_, n| [n[0], 0.0]),
        );
        let sol = solve_problem(&space, &problem).unwrap();
        let r = global_report(&sol, &space, &problem).unwrap();
        let total = sum_sq(&r.eta_k) + sum_sq(&r.eta_e);
        assert_eq!(r.eta, total.sqrt());
        assert!(r.eta > 0.0 && r.true_errors.is_none() && r.effectivity.is_none());
        for (e, edge) in space.mesh().edges().iter().enumerate() {
            if edge.tag == Some(BoundaryTag::Dirichlet) {
                assert_eq!(r.eta_e[e], 0.0);
            }
        }
        let marked: f64 = r.marking_indicators(&space).iter().sum();
        assert!((marked - total).abs() < 1e-12 * total);
    }

    #[test]
    fn guarded_ratio_sentinel() {
        assert_eq!(guarded_ratio(0.0, 0.0), 1.0);
        assert_eq!(guarded_ratio(1e-10, 1e-12), 1.0);
        assert_eq!(guarded_ratio(2.0, 1.0), 2.0);
    }
}
