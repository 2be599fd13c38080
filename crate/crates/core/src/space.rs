//! Continuous Lagrange spaces: vector P1 or P2 velocity, scalar P1 pressure.
//!
//! Global numbering: scalar velocity nodes are the mesh vertices followed
//! (for P2) by the edge midpoints in edge order. Velocity DOF `2 * node + c`
//! is component `c` at `node`. In the combined system all `n_u` velocity
//! DOFs come first, then the `n_p` pressure DOFs (one per vertex).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::mesh::{BoundaryTag, ElemGeometry, Point, TriMesh};

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("unsupported element pair: velocity degree {velocity}, pressure degree {pressure}")]
    UnsupportedPair { velocity: usize, pressure: usize },
    #[error("unknown element pair `{0}` (expected P1P1 or P2P1)")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementPair {
    P1P1,
    P2P1,
}

impl ElementPair {
    pub fn from_degrees(velocity: usize, pressure: usize) -> Result<Self, SpaceError> {
        match (velocity, pressure) {
            (1, 1) => Ok(ElementPair::P1P1),
            (2, 1) => Ok(ElementPair::P2P1),
            _ => Err(SpaceError::UnsupportedPair { velocity, pressure }),
        }
    }

    pub fn velocity_degree(self) -> usize {
        match self {
            ElementPair::P1P1 => 1,
            ElementPair::P2P1 => 2,
        }
    }

    pub fn pressure_degree(self) -> usize {
        1
    }

    pub fn label(self) -> &'static str {
        match self {
            ElementPair::P1P1 => "P1P1",
            ElementPair::P2P1 => "P2P1",
        }
    }
}

impl fmt::Display for ElementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ElementPair {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1P1" => Ok(ElementPair::P1P1),
            "P2P1" => Ok(ElementPair::P2P1),
            other => Err(SpaceError::UnknownLabel(other.to_string())),
        }
    }
}

/// Reference coordinates of the local scalar nodes for a given degree.
pub fn reference_nodes(degree: usize) -> &'static [Point] {
    const P1: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    const P2: [Point; 6] = [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [0.5, 0.0],
        [0.5, 0.5],
        [0.0, 0.5],
    ];
    if degree == 1 {
        &P1
    } else {
        &P2
    }
}

/// Values, gradients and Hessians of the reference Lagrange basis at `xi`.
///
/// P2 ordering: the three vertex functions, then edge functions for
/// edges (0,1), (1,2), (2,0).
pub fn reference_basis(degree: usize, xi: Point) -> (Vec<f64>, Vec<[f64; 2]>, Vec<[[f64; 2]; 2]>) {
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dl: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match degree {
        1 => (l.to_vec(), dl.to_vec(), vec![[[0.0; 2]; 2]; 3]),
        2 => {
            let outer =
                |a: [f64; 2], b: [f64; 2]| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
            let mut v = Vec::with_capacity(6);
            let mut g = Vec::with_capacity(6);
            let mut h = Vec::with_capacity(6);
            for i in 0..3 {
                v.push(l[i] * (2.0 * l[i] - 1.0));
                let s = 4.0 * l[i] - 1.0;
                g.push([s * dl[i][0], s * dl[i][1]]);
                let o = outer(dl[i], dl[i]);
                h.push([
                    [4.0 * o[0][0], 4.0 * o[0][1]],
                    [4.0 * o[1][0], 4.0 * o[1][1]],
                ]);
            }
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                v.push(4.0 * l[i] * l[j]);
                g.push([
                    4.0 * (l[j] * dl[i][0] + l[i] * dl[j][0]),
                    4.0 * (l[j] * dl[i][1] + l[i] * dl[j][1]),
                ]);
                let a = outer(dl[i], dl[j]);
                let b = outer(dl[j], dl[i]);
                h.push([
                    [4.0 * (a[0][0] + b[0][0]), 4.0 * (a[0][1] + b[0][1])],
                    [4.0 * (a[1][0] + b[1][0]), 4.0 * (a[1][1] + b[1][1])],
                ]);
            }
            (v, g, h)
        }
        _ => panic!("unsupported polynomial degree {degree}"),
    }
}

/// Physical basis data at a set of points: index `[q * n_basis + i]`.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub n_points: usize,
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

impl BasisEval {
    pub fn new(degree: usize, geometry: &ElemGeometry, points: &[Point]) -> Self {
        let n_basis = if degree == 1 { 3 } else { 6 };
        let mut values = Vec::with_capacity(points.len() * n_basis);
        let mut gradients = Vec::with_capacity(points.len() * n_basis);
        let mut hessians = Vec::with_capacity(points.len() * n_basis);
        let g = geometry.inv_jacobian_t;
        for &xi in points {
            let (v, dv, hv) = reference_basis(degree, xi);
            values.extend_from_slice(&v);
            for d in dv {
                gradients.push([
                    g[0][0] * d[0] + g[0][1] * d[1],
                    g[1][0] * d[0] + g[1][1] * d[1],
                ]);
            }
            for h in hv {
                // G H G^T with G = J^{-T}
                let mut gh = [[0.0; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        gh[r][c] = g[r][0] * h[0][c] + g[r][1] * h[1][c];
                    }
                }
                let mut out = [[0.0; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        out[r][c] = gh[r][0] * g[c][0] + gh[r][1] * g[c][1];
                    }
                }
                hessians.push(out);
            }
        }
        BasisEval {
            n_points: points.len(),
            n_basis,
            values,
            gradients,
            hessians,
        }
    }

    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.n_basis + i]
    }

    pub fn gradient(&self, q: usize, i: usize) -> [f64; 2] {
        self.gradients[q * self.n_basis + i]
    }

    pub fn hessian(&self, q: usize, i: usize) -> [[f64; 2]; 2] {
        self.hessians[q * self.n_basis + i]
    }
}

/// Velocity (scalar) and pressure bases on one element.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    pub geometry: ElemGeometry,
    pub velocity: BasisEval,
    pub pressure: BasisEval,
}

/// Discrete velocity at one point: value, gradient `grad[i][j] = d_j u_i`
/// and Hessian `hess[i][j][k] = d_j d_k u_i`.
#[derive(Debug, Clone, Copy, Default)]
pub struct VelocitySample {
    pub value: [f64; 2],
    pub grad: [[f64; 2]; 2],
    pub hess: [[[f64; 2]; 2]; 2],
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PressureSample {
    pub value: f64,
    pub grad: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<TriMesh>,
    pair: ElementPair,
    n_nodes: usize,
    n_local: usize,
    /// Flattened element-to-node table, stride `n_local`.
    elem_nodes: Vec<usize>,
    dirichlet_node: Vec<bool>,
    dirichlet_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<TriMesh>, pair: ElementPair) -> Self {
        let n_v = mesh.n_vertices();
        let degree = pair.velocity_degree();
        let n_local = if degree == 1 { 3 } else { 6 };
        let n_nodes = if degree == 1 {
            n_v
        } else {
            n_v + mesh.n_edges()
        };

        let mut elem_nodes = Vec::with_capacity(mesh.n_triangles() * n_local);
        for t in 0..mesh.n_triangles() {
            elem_nodes.extend_from_slice(&mesh.triangle(t));
            if degree == 2 {
                let te = mesh.triangle_edges(t);
                // local edge nodes (0,1), (1,2), (2,0) are opposite vertices 2, 0, 1
                elem_nodes.extend_from_slice(&[n_v + te[2], n_v + te[0], n_v + te[1]]);
            }
        }

        let mut dirichlet_node = vec![false; n_nodes];
        for (e, edge) in mesh.edges().iter().enumerate() {
            if edge.tag == Some(BoundaryTag::Dirichlet) {
                dirichlet_node[edge.vertices[0]] = true;
                dirichlet_node[edge.vertices[1]] = true;
                if degree == 2 {
                    dirichlet_node[n_v + e] = true;
                }
            }
        }
        let dirichlet_dofs = dirichlet_node
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .flat_map(|(n, _)| [2 * n, 2 * n + 1])
            .collect();

        FeSpace {
            mesh,
            pair,
            n_nodes,
            n_local,
            elem_nodes,
            dirichlet_node,
            dirichlet_dofs,
        }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn pair(&self) -> ElementPair {
        self.pair
    }

    pub fn velocity_degree(&self) -> usize {
        self.pair.velocity_degree()
    }

    /// Number of scalar velocity nodes.
    pub fn n_velocity_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Local scalar velocity nodes per element.
    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn n_u(&self) -> usize {
        2 * self.n_nodes
    }

    pub fn n_p(&self) -> usize {
        self.mesh.n_vertices()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_u() + self.n_p()
    }

    pub fn velocity_nodes(&self, t: usize) -> &[usize] {
        &self.elem_nodes[t * self.n_local..(t + 1) * self.n_local]
    }

    /// Combined-system indices of the pressure DOFs of element `t`.
    pub fn pressure_dofs(&self, t: usize) -> [usize; 3] {
        let tri = self.mesh.triangle(t);
        let off = self.n_u();
        [off + tri[0], off + tri[1], off + tri[2]]
    }

    pub fn node_coords(&self, node: usize) -> Point {
        let n_v = self.mesh.n_vertices();
        if node < n_v {
            self.mesh.vertex(node)
        } else {
            let e = self.mesh.edge(node - n_v);
            let a = self.mesh.vertex(e.vertices[0]);
            let b = self.mesh.vertex(e.vertices[1]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }
    }

    pub fn is_dirichlet_node(&self, node: usize) -> bool {
        self.dirichlet_node[node]
    }

    /// Velocity DOFs on the Dirichlet boundary, ascending.
    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    pub fn eval_basis(&self, t: usize, points: &[Point]) -> ElementBasis {
        eval_basis(self, t, points)
    }

    /// Evaluates a discrete velocity field on element `t`.
    pub fn velocity_at(
        &self,
        coeffs: &[f64],
        t: usize,
        basis: &BasisEval,
        q: usize,
    ) -> VelocitySample {
        let mut s = VelocitySample::default();
        for (a, &node) in self.velocity_nodes(t).iter().enumerate() {
            let v = basis.value(q, a);
            let g = basis.gradient(q, a);
            let h = basis.hessian(q, a);
            for c in 0..2 {
                let u = coeffs[2 * node + c];
                s.value[c] += u * v;
                s.grad[c][0] += u * g[0];
                s.grad[c][1] += u * g[1];
                for j in 0..2 {
                    for k in 0..2 {
                        s.hess[c][j][k] += u * h[j][k];
                    }
                }
            }
        }
        s
    }

    /// Evaluates a discrete pressure (length `n_p`) on element `t`.
    pub fn pressure_at(
        &self,
        coeffs: &[f64],
        t: usize,
        basis: &BasisEval,
        q: usize,
    ) -> PressureSample {
        let tri = self.mesh.triangle(t);
        let mut s = PressureSample::default();
        for (j, &v) in tri.iter().enumerate() {
            let p = coeffs[v];
            s.value += p * basis.value(q, j);
            let g = basis.gradient(q, j);
            s.grad[0] += p * g[0];
            s.grad[1] += p * g[1];
        }
        s
    }
}

/// Maps the reference bases of element `t` to physical coordinates.
pub fn eval_basis(space: &FeSpace, t: usize, points: &[Point]) -> ElementBasis {
    let geometry = space.mesh().geometry(t);
    ElementBasis {
        velocity: BasisEval::new(space.velocity_degree(), &geometry, points),
        pressure: BasisEval::new(space.pair.pressure_degree(), &geometry, points),
        geometry,
    }
}

/// Nodal interpolation of closed-form velocity and pressure fields.
pub fn interpolate(
    space: &FeSpace,
    velocity: impl Fn(Point) -> [f64; 2],
    pressure: impl Fn(Point) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; space.n_u()];
    for node in 0..space.n_velocity_nodes() {
        let v = velocity(space.node_coords(node));
        u[2 * node] = v[0];
        u[2 * node + 1] = v[1];
    }
    let p = space
        .mesh()
        .vertices()
        .iter()
        .map(|&x| pressure(x))
        .collect();
    (u, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured, BoundarySpec, Domain};

    fn square(n: usize) -> Arc<TriMesh> {
        Arc::new(generate_structured(Domain::UnitSquare, n, BoundarySpec::all_dirichlet()).unwrap())
    }

    #[test]
    fn dof_counts() {
        let s = FeSpace::new(square(1), ElementPair::P1P1);
        assert_eq!((s.n_u(), s.n_p()), (8, 4));
        assert_eq!(s.dirichlet_dofs().len(), 8);
        let s = FeSpace::new(square(1), ElementPair::P2P1);
        assert_eq!((s.n_u(), s.n_p()), (18, 4));
        // only the diagonal midpoint is interior
        assert_eq!(s.dirichlet_dofs().len(), 16);
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        assert!(ElementPair::from_degrees(3, 1).is_err());
        assert!(ElementPair::from_degrees(2, 2).is_err());
        assert!("P1P0".parse::<ElementPair>().is_err());
        assert_eq!("P2P1".parse::<ElementPair>(), Ok(ElementPair::P2P1));
    }

    #[test]
    fn lagrange_property_at_nodes() {
        for degree in [1, 2] {
            for (k, &xi) in reference_nodes(degree).iter().enumerate() {
                let (v, _, _) = reference_basis(degree, xi);
                for (i, &vi) in v.iter().enumerate() {
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert!((vi - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn p1_hessians_vanish() {
        let (_, _, h) = reference_basis(1, [0.2, 0.3]);
        assert!(h.iter().flatten().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn p2_vertex_function_hessian() {
        // (1 - x - y)(1 - 2x - 2y) has constant Hessian [[4, 4], [4, 4]]
        let phi = |x: f64, y: f64| (1.0 - x - y) * (1.0 - 2.0 * x - 2.0 * y);
        for xi in [[0.2, 0.3], [0.1, 0.1], [0.5, 0.25]] {
            let (v, _, h) = reference_basis(2, xi);
            assert!((v[0] - phi(xi[0], xi[1])).abs() < 1e-15);
            assert_eq!(h[0], [[4.0, 4.0], [4.0, 4.0]]);
            let s = 1e-4;
            let fd_xx =
                (phi(xi[0] + s, xi[1]) - 2.0 * phi(xi[0], xi[1]) + phi(xi[0] - s, xi[1])) / (s * s);
            let fd_xy =
                (phi(xi[0] + s, xi[1] + s) - phi(xi[0] + s, xi[1] - s) - phi(xi[0] - s, xi[1] + s)
                    + phi(xi[0] - s, xi[1] - s))
                    / (4.0 * s * s);
            assert!((fd_xx - 4.0).abs() < 1e-6);
            assert!((fd_xy - 4.0).abs() < 1e-6);
        }
    }

    #[test]
    fn linear_fields_are_reproduced() {
        let mesh = square(3);
        let space = FeSpace::new(mesh.clone(), ElementPair::P1P1);
        let (u, p) = interpolate(&space, |x| [x[0], x[1]], |x| x[0]);
        let pts = [[0.2, 0.2], [0.6, 0.1], [0.1, 0.7]];
        for t in 0..mesh.n_triangles() {
            let b = space.eval_basis(t, &pts);
            for q in 0..pts.len() {
                let x = b.geometry.map(mesh.vertex(mesh.triangle(t)[0]), pts[q]);
                let us = space.velocity_at(&u, t, &b.velocity, q);
                let ps = space.pressure_at(&p, t, &b.pressure, q);
                assert!((us.value[0] - x[0]).abs() < 1e-14);
                assert!((us.value[1] - x[1]).abs() < 1e-14);
                assert!((ps.value - x[0]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quadratic_fields_are_reproduced_by_p2() {
        let mesh = square(2);
        let space = FeSpace::new(mesh.clone(), ElementPair::P2P1);
        let f = |x: Point| [x[0] * x[1] - x[1] * x[1], 3.0 * x[0] * x[0] + 1.0];
        let (u, _) = interpolate(&space, f, |_| 0.0);
        let pts = [[0.2, 0.2], [0.6, 0.1], [0.1, 0.7]];
        for t in 0..mesh.n_triangles() {
            let b = space.eval_basis(t, &pts);
            for q in 0..pts.len() {
                let x = b.geometry.map(mesh.vertex(mesh.triangle(t)[0]), pts[q]);
                let us = space.velocity_at(&u, t, &b.velocity, q);
                let e = f(x);
                assert!((us.value[0] - e[0]).abs() < 1e-13);
                assert!((us.value[1] - e[1]).abs() < 1e-13);
                // second derivatives of the first component: d_xy = 1, d_yy = -2
                assert!((us.hess[0][0][1] - 1.0).abs() < 1e-10);
                assert!((us.hess[0][1][1] + 2.0).abs() < 1e-10);
            }
        }
    }
}
