//! Plain-text mesh format:
//!
//! ```text
//! trimesh v1
//! vertices N
//! x y            (N lines)
//! triangles M
//! i j k          (M lines, 0-based, counterclockwise)
//! boundary B
//! i j TAG        (B lines, TAG is D or N)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{BoundaryTag, MeshError, TriMesh};

const HEADER: &str = "trimesh v1";

pub fn write_mesh(mesh: &TriMesh) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "vertices {}", mesh.n_vertices()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{} {}", p[0], p[1]).unwrap();
    }
    writeln!(out, "triangles {}", mesh.n_triangles()).unwrap();
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    let boundary = mesh.boundary_entries();
    writeln!(out, "boundary {}", boundary.len()).unwrap();
    for (a, b, tag) in boundary {
        writeln!(out, "{a} {b} {}", tag.code()).unwrap();
    }
    out
}

pub fn write_mesh_file(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    fs::write(path, write_mesh(mesh))?;
    Ok(())
}

/// Parses the text format. The result is not audited; use
/// [`super::audit`] or [`TriMesh::new`] for validation.
pub fn read_mesh(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    let (n, header) = lines.next_line()?;
    if header != HEADER {
        return Err(parse_err(n, format!("expected `{HEADER}`")));
    }

    let n_vertices = lines.section("vertices")?;
    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (n, line) = lines.next_line()?;
        let [x, y] = fields::<2>(n, line)?;
        vertices.push([parse_f64(n, x)?, parse_f64(n, y)?]);
    }

    let n_triangles = lines.section("triangles")?;
    let mut triangles = Vec::with_capacity(n_triangles);
    for _ in 0..n_triangles {
        let (n, line) = lines.next_line()?;
        let [a, b, c] = fields::<3>(n, line)?;
        let tri = [parse_index(n, a)?, parse_index(n, b)?, parse_index(n, c)?];
        if let Some(&v) = tri.iter().find(|&&v| v >= n_vertices) {
            return Err(parse_err(n, format!("vertex index {v} out of range")));
        }
        triangles.push(tri);
    }

    let n_boundary = lines.section("boundary")?;
    let mut boundary = Vec::with_capacity(n_boundary);
    for _ in 0..n_boundary {
        let (n, line) = lines.next_line()?;
        let [a, b, tag] = fields::<3>(n, line)?;
        let tag = match tag {
            "D" => BoundaryTag::Dirichlet,
            "N" => BoundaryTag::Neumann,
            other => return Err(parse_err(n, format!("unknown boundary tag `{other}`"))),
        };
        boundary.push((parse_index(n, a)?, parse_index(n, b)?, tag));
    }

    if let Some((i, _)) = lines.inner.next() {
        return Err(parse_err(
            i + 1,
            "unexpected content after boundary section".to_string(),
        ));
    }

    TriMesh::from_raw(vertices, triangles, boundary).map_err(|e| match e {
        MeshError::UnknownBoundaryEdge(..) | MeshError::DegenerateTriangle(_) => {
            parse_err(lines.last, e.to_string())
        }
        other => other,
    })
}

pub fn read_mesh_file(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    read_mesh(&fs::read_to_string(path)?)
}

struct Lines<'a, I: Iterator<Item = (usize, &'a str)>> {
    inner: I,
    last: usize,
}

impl<'a, I: Iterator<Item = (usize, &'a str)>> Lines<'a, I> {
    fn next_line(&mut self) -> Result<(usize, &'a str), MeshError> {
        match self.inner.next() {
            Some((i, line)) => {
                self.last = i + 1;
                Ok((i + 1, line))
            }
            None => Err(parse_err(
                self.last + 1,
                "unexpected end of file".to_string(),
            )),
        }
    }

    fn section(&mut self, name: &str) -> Result<usize, MeshError> {
        let (n, line) = self.next_line()?;
        let [key, count] = fields::<2>(n, line)?;
        if key != name {
            return Err(parse_err(n, format!("expected `{name} <count>`")));
        }
        parse_index(n, count)
    }
}

fn parse_err(line: usize, message: String) -> MeshError {
    MeshError::Parse { line, message }
}

fn fields<const K: usize>(n: usize, line: &str) -> Result<[&str; K], MeshError> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != K || parts.iter().any(|p| p.is_empty()) {
        return Err(parse_err(n, format!("expected {K} space-separated fields")));
    }
    Ok(std::array::from_fn(|i| parts[i]))
}

fn parse_f64(n: usize, s: &str) -> Result<f64, MeshError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_err(n, format!("invalid coordinate `{s}`"))),
    }
}

fn parse_index(n: usize, s: &str) -> Result<usize, MeshError> {
    s.parse::<usize>()
        .map_err(|_| parse_err(n, format!("invalid integer `{s}`")))
}
