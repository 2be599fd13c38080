#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_stab::forms::quadrature::triangle_rule;
use stokes_stab::mesh::{generate_structured, BoundarySpec, Domain, Side, TriMesh};
use stokes_stab::space::{ElementPair, FeSpace};

pub const PAIRS: [ElementPair; 2] = [ElementPair::P1P1, ElementPair::P2P1];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn square(n: usize) -> Arc<TriMesh> {
    Arc::new(generate_structured(Domain::UnitSquare, n, BoundarySpec::all_dirichlet()).unwrap())
}

/// Unit square clamped on `x = 0` only.
pub fn clamped_left(n: usize) -> Arc<TriMesh> {
    let spec = BoundarySpec::with_neumann(&[Side::Right, Side::Bottom, Side::Top]);
    Arc::new(generate_structured(Domain::UnitSquare, n, spec).unwrap())
}

pub fn space(mesh: &Arc<TriMesh>, pair: ElementPair) -> FeSpace {
    FeSpace::new(mesh.clone(), pair)
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random velocity/pressure pair with zero Dirichlet values.
pub fn random_pair(rng: &mut impl Rng, space: &FeSpace) -> (Vec<f64>, Vec<f64>) {
    let mut w = random_vec(rng, space.n_u());
    for &d in space.dirichlet_dofs() {
        w[d] = 0.0;
    }
    (w, random_vec(rng, space.n_p()))
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Quadrature oracle for `||D w||^2`, `sum_K h_K^2 ||A w||_K^2` and
/// `sum_K h_K^2 ||grad r||_K^2`, computed pointwise from the discrete
/// fields rather than from assembled matrices.
pub fn energy_terms(space: &FeSpace, w: &[f64], r: &[f64]) -> (f64, f64, f64) {
    let mesh = space.mesh();
    let rule = triangle_rule(2 * space.velocity_degree() + 2).unwrap();
    let (mut strain, mut residual, mut grad_p) = (0.0, 0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let basis = space.eval_basis(t, &rule.points);
        let h2 = basis.geometry.diameter.powi(2);
        for (q, weight) in rule.weights.iter().enumerate() {
            let dx = weight * basis.geometry.det.abs();
            let u = space.velocity_at(w, t, &basis.velocity, q);
            let g = u.grad;
            let off = 0.5 * (g[0][1] + g[1][0]);
            strain += dx * (g[0][0].powi(2) + 2.0 * off * off + g[1][1].powi(2));
            // (A w)_i = 0.5 * sum_j (d_j d_j w_i + d_i d_j w_j)
            let h = u.hess;
            let a: Vec<f64> = (0..2)
                .map(|i| 0.5 * ((h[i][0][0] + h[i][1][1]) + (h[0][0][i] + h[1][1][i])))
                .collect();
            residual += dx * h2 * (a[0] * a[0] + a[1] * a[1]);
            let p = space.pressure_at(r, t, &basis.pressure, q);
            grad_p += dx * h2 * (p.grad[0].powi(2) + p.grad[1].powi(2));
        }
    }
    (strain, residual, grad_p)
}

/// `(w, r)` concatenated in the combined DOF layout.
pub fn combined(w: &[f64], r: &[f64]) -> Vec<f64> {
    let mut x = w.to_vec();
    x.extend_from_slice(r);
    x
}
