use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{BoundaryTag, MeshError, Point, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[0, 1]^2`
    UnitSquare,
    /// `[-1/2, 1/2]^2` without the upper-right quadrant; the reentrant
    /// corner sits at the origin.
    LShape,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::UnitSquare => "unit_square",
            Domain::LShape => "l_shape",
        })
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit_square" => Ok(Domain::UnitSquare),
            "l_shape" => Ok(Domain::LShape),
            other => Err(format!("unknown domain `{other}`")),
        }
    }
}

/// Boundary sides, identified by the direction of the outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    fn of_normal(n: [f64; 2]) -> Side {
        if n[0].abs() >= n[1].abs() {
            if n[0] < 0.0 {
                Side::Left
            } else {
                Side::Right
            }
        } else if n[1] < 0.0 {
            Side::Bottom
        } else {
            Side::Top
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Tag assignment for each side of a generated domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec {
    tags: [BoundaryTag; 4],
}

impl BoundarySpec {
    pub fn all_dirichlet() -> Self {
        BoundarySpec {
            tags: [BoundaryTag::Dirichlet; 4],
        }
    }

    /// All sides Dirichlet except the listed ones.
    pub fn with_neumann(sides: &[Side]) -> Self {
        let mut spec = Self::all_dirichlet();
        for &s in sides {
            spec.tags[s.index()] = BoundaryTag::Neumann;
        }
        spec
    }

    pub fn tag(&self, side: Side) -> BoundaryTag {
        self.tags[side.index()]
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self::all_dirichlet()
    }
}

/// Structured triangulation of `domain` with `n` cells per unit-length
/// side of the bounding square, each cell split along its SW-NE diagonal.
pub fn generate_structured(
    domain: Domain,
    n: usize,
    boundary: BoundarySpec,
) -> Result<TriMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ZeroSubdivisions);
    }
    let (origin, keep): (Point, Box<dyn Fn(usize, usize) -> bool>) = match domain {
        Domain::UnitSquare => ([0.0, 0.0], Box::new(|_, _| true)),
        Domain::LShape => {
            if !n.is_multiple_of(2) {
                return Err(MeshError::OddLShape(n));
            }
            let half = n / 2;
            (
                [-0.5, -0.5],
                Box::new(move |i, j| !(i >= half && j >= half)),
            )
        }
    };
    let h = 1.0 / n as f64;

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut used = vec![false; (n + 1) * (n + 1)];
    for j in 0..n {
        for i in 0..n {
            if keep(i, j) {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    used[(j + dj) * (n + 1) + i + di] = true;
                }
            }
        }
    }
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if used[j * (n + 1) + i] {
                index.insert((i, j), vertices.len());
                vertices.push([origin[0] + i as f64 * h, origin[1] + j as f64 * h]);
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            if !keep(i, j) {
                continue;
            }
            let sw = index[&(i, j)];
            let se = index[&(i + 1, j)];
            let ne = index[&(i + 1, j + 1)];
            let nw = index[&(i, j + 1)];
            // diagonal sw-ne is the refinement edge of both halves
            triangles.push([se, ne, sw]);
            triangles.push([nw, sw, ne]);
        }
    }

    let untagged = TriMesh::assemble(
        vertices.clone(),
        triangles.clone(),
        Vec::new(),
        vec![None; triangles.len()],
    )?;
    let mut tags = Vec::new();
    for (ei, e) in untagged.edges().iter().enumerate() {
        if !e.is_boundary() {
            continue;
        }
        let t = e.triangles[0];
        let local = untagged
            .triangle_edges(t)
            .iter()
            .position(|&x| x == ei)
            .expect("edge belongs to its triangle");
        let normal = untagged.geometry(t).normals[local];
        tags.push((
            e.vertices[0],
            e.vertices[1],
            boundary.tag(Side::of_normal(normal)),
        ));
    }
    let parent = vec![None; triangles.len()];
    TriMesh::assemble(vertices, triangles, tags, parent)
}
