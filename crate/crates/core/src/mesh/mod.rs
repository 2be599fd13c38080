//! Conforming 2D triangulations with tagged boundaries.
//!
//! Triangles are stored counterclockwise and rotated so that the edge
//! opposite local vertex 0 is the refinement edge used by newest-vertex
//! bisection. Local edge `i` of a triangle is always the edge opposite
//! local vertex `i`.

mod audit;
mod generate;
mod io;
mod refine;

use std::collections::HashMap;

pub use audit::{audit, AuditConfig, AuditReport, Check, CheckResult};
pub use generate::{generate_structured, BoundarySpec, Domain, Side};
pub use io::{read_mesh, read_mesh_file, write_mesh, write_mesh_file};
pub use refine::{refine_marked, refine_uniform};

use thiserror::Error;

pub type Point = [f64; 2];

/// Sentinel for a missing second triangle on a boundary edge.
pub const NO_TRIANGLE: usize = usize::MAX;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(
        "triangle {triangle} references vertex {vertex}, but the mesh has {n_vertices} vertices"
    )]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        n_vertices: usize,
    },
    #[error("triangle {0} repeats a vertex")]
    DegenerateTriangle(usize),
    #[error("boundary entry ({0}, {1}) is not an edge of the triangulation")]
    UnknownBoundaryEdge(usize, usize),
    #[error("l_shape requires an even subdivision count, got {0}")]
    OddLShape(usize),
    #[error("subdivision count must be at least 1")]
    ZeroSubdivisions,
    #[error("marked triangle {0} is out of range")]
    MarkedOutOfRange(usize),
    #[error("mesh failed audit: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

impl BoundaryTag {
    pub fn code(self) -> char {
        match self {
            BoundaryTag::Dirichlet => 'D',
            BoundaryTag::Neumann => 'N',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Incident triangles; the second is [`NO_TRIANGLE`] on the boundary.
    pub triangles: [usize; 2],
    pub tag: Option<BoundaryTag>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1] == NO_TRIANGLE
    }

    /// The triangle across this edge from `t`, if any.
    pub fn neighbor(&self, t: usize) -> Option<usize> {
        let other = if self.triangles[0] == t {
            self.triangles[1]
        } else {
            self.triangles[0]
        };
        (other != NO_TRIANGLE).then_some(other)
    }
}

/// Per-element geometric quantities for the affine map
/// `x = p0 + J * xi` from the reference triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElemGeometry {
    pub area: f64,
    /// Element diameter h_K (longest edge).
    pub diameter: f64,
    /// Length of local edge `i` (opposite vertex `i`).
    pub edge_lengths: [f64; 3],
    /// Outward unit normal of local edge `i`.
    pub normals: [[f64; 2]; 3],
    /// `jacobian[r][c] = d x_r / d xi_c`.
    pub jacobian: [[f64; 2]; 2],
    pub inv_jacobian_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElemGeometry {
    pub fn new(p: [Point; 3]) -> Self {
        let jacobian = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let inv_jacobian_t = [
            [jacobian[1][1] / det, -jacobian[1][0] / det],
            [-jacobian[0][1] / det, jacobian[0][0] / det],
        ];
        let mut edge_lengths = [0.0; 3];
        let mut normals = [[0.0; 2]; 3];
        let sign = if det >= 0.0 { 1.0 } else { -1.0 };
        for i in 0..3 {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            let d = [b[0] - a[0], b[1] - a[1]];
            let len = d[0].hypot(d[1]);
            edge_lengths[i] = len;
            // right-hand normal of a CCW boundary traversal points outward
            normals[i] = [sign * d[1] / len, -sign * d[0] / len];
        }
        let diameter = edge_lengths.iter().cloned().fold(0.0, f64::max);
        ElemGeometry {
            area: 0.5 * det.abs(),
            diameter,
            edge_lengths,
            normals,
            jacobian,
            inv_jacobian_t,
            det,
        }
    }

    /// Physical coordinates of a reference point.
    pub fn map(&self, origin: Point, xi: Point) -> Point {
        [
            origin[0] + self.jacobian[0][0] * xi[0] + self.jacobian[0][1] * xi[1],
            origin[1] + self.jacobian[1][0] * xi[0] + self.jacobian[1][1] * xi[1],
        ]
    }
}

/// A triangulation with boundary tags and refinement bookkeeping.
///
/// Immutable once built; refinement returns a new mesh.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    parent: Vec<Option<usize>>,
    /// Edges with more than two incident triangles.
    overshared_edges: Vec<usize>,
    /// Boundary entries that name an interior edge or repeat a tag.
    bad_tags: Vec<[usize; 2]>,
}

impl TriMesh {
    /// Builds a mesh and requires it to pass [`audit`] with default settings.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<(usize, usize, BoundaryTag)>,
    ) -> Result<Self, MeshError> {
        let mesh = Self::from_raw(vertices, triangles, boundary)?;
        let report = audit(&mesh, &AuditConfig::default());
        if !report.passed() {
            return Err(MeshError::Invalid(report.summary()));
        }
        Ok(mesh)
    }

    /// Builds the topology without geometric validation, so that broken
    /// meshes can still be audited. Each triangle is rotated so that its
    /// longest edge becomes the refinement edge.
    pub fn from_raw(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<(usize, usize, BoundaryTag)>,
    ) -> Result<Self, MeshError> {
        let triangles = triangles
            .into_iter()
            .map(|t| rotate_longest_first(&vertices, t))
            .collect::<Vec<_>>();
        let parent = vec![None; triangles.len()];
        Self::assemble(vertices, triangles, boundary, parent)
    }

    pub(crate) fn assemble(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<(usize, usize, BoundaryTag)>,
        parent: Vec<Option<usize>>,
    ) -> Result<Self, MeshError> {
        let n_vertices = vertices.len();
        let mut lookup: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 2);
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut overshared_edges = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n_vertices {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        n_vertices,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle(t));
            }
            let mut local = [0usize; 3];
            for (i, slot) in local.iter_mut().enumerate() {
                let key = edge_key(tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        triangles: [NO_TRIANGLE, NO_TRIANGLE],
                        tag: None,
                    });
                    edges.len() - 1
                });
                let edge = &mut edges[e];
                if edge.triangles[0] == NO_TRIANGLE {
                    edge.triangles[0] = t;
                } else if edge.triangles[1] == NO_TRIANGLE {
                    edge.triangles[1] = t;
                } else if !overshared_edges.contains(&e) {
                    overshared_edges.push(e);
                }
                *slot = e;
            }
            tri_edges.push(local);
        }

        let mut bad_tags = Vec::new();
        for (a, b, tag) in boundary {
            let key = edge_key(a, b);
            let e = *lookup
                .get(&key)
                .ok_or(MeshError::UnknownBoundaryEdge(a, b))?;
            let edge = &mut edges[e];
            if !edge.is_boundary() || edge.tag.is_some() {
                bad_tags.push([a, b]);
            } else {
                edge.tag = Some(tag);
            }
        }

        Ok(TriMesh {
            vertices,
            triangles,
            edges,
            tri_edges,
            parent,
            overshared_edges,
            bad_tags,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Global edge indices of triangle `t`; entry `i` is opposite vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    /// The edge bisected next by newest-vertex bisection.
    pub fn refinement_edge(&self, t: usize) -> [usize; 2] {
        let tri = self.triangles[t];
        [tri[1], tri[2]]
    }

    /// Index of the triangle this one was refined from, if any.
    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn geometry(&self, t: usize) -> ElemGeometry {
        ElemGeometry::new(self.corners(t))
    }

    pub fn centroid(&self, t: usize) -> Point {
        let c = self.corners(t);
        [
            (c[0][0] + c[1][0] + c[2][0]) / 3.0,
            (c[0][1] + c[1][1] + c[2][1]) / 3.0,
        ]
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| self.geometry(t).diameter)
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.geometry(t).area).sum()
    }

    /// Tagged boundary edges as `(a, b, tag)` in edge order.
    pub fn boundary_entries(&self) -> Vec<(usize, usize, BoundaryTag)> {
        self.edges
            .iter()
            .filter_map(|e| e.tag.map(|tag| (e.vertices[0], e.vertices[1], tag)))
            .collect()
    }

    pub fn has_neumann(&self) -> bool {
        self.edges
            .iter()
            .any(|e| e.tag == Some(BoundaryTag::Neumann))
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| min_angle_of(self.corners(t)))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn overshared_edges(&self) -> &[usize] {
        &self.overshared_edges
    }

    pub(crate) fn bad_tags(&self) -> &[[usize; 2]] {
        &self.bad_tags
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn min_angle_of(p: [Point; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let o = p[i];
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            let u = [a[0] - o[0], a[1] - o[1]];
            let v = [b[0] - o[0], b[1] - o[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            cross.abs().atan2(dot)
        })
        .fold(f64::INFINITY, f64::min)
}

fn rotate_longest_first(vertices: &[Point], t: [usize; 3]) -> [usize; 3] {
    if t.iter().any(|&v| v >= vertices.len()) {
        return t;
    }
    let len = |i: usize| {
        let a = vertices[t[(i + 1) % 3]];
        let b = vertices[t[(i + 2) % 3]];
        (b[0] - a[0]).hypot(b[1] - a[1])
    };
    let mut best = 0;
    for i in 1..3 {
        if len(i) > len(best) * (1.0 + 1e-12) {
            best = i;
        }
    }
    [t[best], t[(best + 1) % 3], t[(best + 2) % 3]]
}
