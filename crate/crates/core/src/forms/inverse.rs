//! The inverse-inequality constant `C_I` of the velocity space:
//! `C_I sum_K h_K^2 ||A v||_K^2 <= ||D(v)||^2` for all discrete `v`.

use std::fmt;

use faer::{Mat, Side};

use crate::space::{BasisEval, FeSpace};

use super::quadrature::triangle_rule;

/// Relative threshold below which an eigenvalue of the local strain
/// matrix is treated as part of its rigid-motion kernel.
const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiEstimate {
    /// `A v = 0` on every element (P1 velocity): any `alpha > 0` is admissible.
    Unbounded,
    Finite(f64),
}

impl CiEstimate {
    pub fn value(self) -> Option<f64> {
        match self {
            CiEstimate::Unbounded => None,
            CiEstimate::Finite(c) => Some(c),
        }
    }
}

impl fmt::Display for CiEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CiEstimate::Unbounded => f.write_str("unbounded"),
            CiEstimate::Finite(c) => write!(f, "{c}"),
        }
    }
}

/// Local matrices of `||D(v)||_K^2` and `h_K^2 ||A v||_K^2` over the
/// velocity basis of one element, row-major with `n = 2 * n_basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPencil {
    pub n: usize,
    pub strain: Vec<f64>,
    pub stabilization: Vec<f64>,
}

impl LocalPencil {
    pub fn new(space: &FeSpace, t: usize) -> Self {
        let rule = triangle_rule(2 * space.velocity_degree()).expect("supported degree");
        let basis = space.eval_basis(t, &rule.points);
        let vel = &basis.velocity;
        let det = basis.geometry.det.abs();
        let h2 = basis.geometry.diameter.powi(2);
        let n = 2 * vel.n_basis;
        let mut strain = vec![0.0; n * n];
        let mut stabilization = vec![0.0; n * n];
        for (q, &w) in rule.weights.iter().enumerate() {
            let w = w * det;
            let av = strain_divergences(vel, q);
            for a in 0..vel.n_basis {
                let ga = vel.gradient(q, a);
                for b in 0..vel.n_basis {
                    let gb = vel.gradient(q, b);
                    let dot = ga[0] * gb[0] + ga[1] * gb[1];
                    for c in 0..2 {
                        for d in 0..2 {
                            let delta = if c == d { dot } else { 0.0 };
                            strain[(2 * a + c) * n + 2 * b + d] +=
                                w * 0.5 * (delta + ga[d] * gb[c]);
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    stabilization[i * n + j] +=
                        w * h2 * (av[i][0] * av[j][0] + av[i][1] * av[j][1]);
                }
            }
        }
        LocalPencil {
            n,
            strain,
            stabilization,
        }
    }

    /// `(h_K^2 ||A v||^2, ||D(v)||^2)` for local coefficients `v`.
    pub fn quotient_parts(&self, v: &[f64]) -> (f64, f64) {
        let form = |m: &[f64]| -> f64 {
            (0..self.n)
                .map(|i| v[i] * (0..self.n).map(|j| m[i * self.n + j] * v[j]).sum::<f64>())
                .sum()
        };
        (form(&self.stabilization), form(&self.strain))
    }

    /// Largest ratio over the complement of the strain kernel.
    pub fn max_ratio(&self) -> f64 {
        let to_mat = |m: &[f64]| Mat::<f64>::from_fn(self.n, self.n, |i, j| m[i * self.n + j]);
        generalized_eigenvalues(
            &to_mat(&self.stabilization),
            &to_mat(&self.strain),
            KERNEL_TOL,
        )
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Largest `h_K^2 ||A v||_K^2 / ||D(v)||_K^2` on element `t`.
pub fn local_ratio(space: &FeSpace, t: usize) -> f64 {
    LocalPencil::new(space, t).max_ratio()
}

/// Eigenvalues of the symmetric pencil `(a, b)` with `b` semidefinite,
/// restricted to the span of eigenvectors of `b` above `kernel_tol`
/// times its largest eigenvalue. Ascending.
pub(crate) fn generalized_eigenvalues(a: &Mat<f64>, b: &Mat<f64>, kernel_tol: f64) -> Vec<f64> {
    let n = b.nrows();
    let eig = b
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigenproblem");
    let s = eig.S().column_vector();
    let u = eig.U();
    let top = (0..n).map(|i| s[i]).fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..n).filter(|&i| s[i] > kernel_tol * top).collect();
    let w = Mat::<f64>::from_fn(n, keep.len(), |r, k| u[(r, keep[k])] / s[keep[k]].sqrt());
    let reduced = w.transpose() * a * &w;
    let reduced = Mat::<f64>::from_fn(keep.len(), keep.len(), |i, j| {
        0.5 * (reduced[(i, j)] + reduced[(j, i)])
    });
    reduced
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigenproblem")
}

/// `A (phi_a e_c)` for every local velocity basis function.
fn strain_divergences(vel: &BasisEval, q: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(2 * vel.n_basis);
    for a in 0..vel.n_basis {
        let h = vel.hessian(q, a);
        let lap = h[0][0] + h[1][1];
        for c in 0..2 {
            let mut v = [0.5 * h[0][c], 0.5 * h[1][c]];
            v[c] += 0.5 * lap;
            out.push(v);
        }
    }
    out
}

/// `C_I = 1 / max_K local_ratio(K)`; unbounded when every ratio vanishes.
pub fn estimate_ci(space: &FeSpace) -> CiEstimate {
    if space.velocity_degree() == 1 {
        return CiEstimate::Unbounded;
    }
    let worst = (0..space.mesh().n_triangles())
        .map(|t| local_ratio(space, t))
        .fold(0.0, f64::max);
    if worst <= 0.0 {
        CiEstimate::Unbounded
    } else {
        CiEstimate::Finite(1.0 / worst)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{generate_structured, refine_uniform, BoundarySpec, Domain};
    use crate::space::ElementPair;

    #[test]
    fn p1_is_unbounded() {
        let mesh = Arc::new(
            generate_structured(Domain::UnitSquare, 2, BoundarySpec::all_dirichlet()).unwrap(),
        );
        let space = FeSpace::new(mesh, ElementPair::P1P1);
        assert_eq!(estimate_ci(&space), CiEstimate::Unbounded);
        assert_eq!(local_ratio(&space, 0), 0.0);
    }

    #[test]
    fn p2_is_scale_invariant() {
        let coarse =
            generate_structured(Domain::UnitSquare, 2, BoundarySpec::all_dirichlet()).unwrap();
        let fine = refine_uniform(&coarse);
        let a = estimate_ci(&FeSpace::new(Arc::new(coarse), ElementPair::P2P1))
            .value()
            .unwrap();
        let b = estimate_ci(&FeSpace::new(Arc::new(fine), ElementPair::P2P1))
            .value()
            .unwrap();
        assert!(a > 0.0 && a.is_finite());
        assert!((a - b).abs() < 1e-9 * a, "{a} vs {b}");
    }
}
