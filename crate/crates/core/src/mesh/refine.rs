use std::collections::HashMap;

use super::{edge_key, MeshError, TriMesh};

/// Red refinement: every triangle is split into four similar children
/// through its edge midpoints.
pub fn refine_uniform(mesh: &TriMesh) -> TriMesh {
    let n_v = mesh.n_vertices();
    let mut vertices = mesh.vertices().to_vec();
    for e in mesh.edges() {
        let a = mesh.vertex(e.vertices[0]);
        let b = mesh.vertex(e.vertices[1]);
        vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }

    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    let mut parent = Vec::with_capacity(4 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let [v0, v1, v2] = mesh.triangle(t);
        let te = mesh.triangle_edges(t);
        // midpoints of (v1,v2), (v2,v0), (v0,v1)
        let m12 = n_v + te[0];
        let m20 = n_v + te[1];
        let m01 = n_v + te[2];
        // each child keeps the vertex roles of its parent, so the refinement
        // edge stays parallel to the parent's
        triangles.push([v0, m01, m20]);
        triangles.push([m01, v1, m12]);
        triangles.push([m20, m12, v2]);
        triangles.push([m12, m20, m01]);
        parent.extend([Some(t); 4]);
    }

    let mut boundary = Vec::new();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if let Some(tag) = edge.tag {
            let m = n_v + e;
            boundary.push((edge.vertices[0], m, tag));
            boundary.push((m, edge.vertices[1], tag));
        }
    }
    TriMesh::assemble(vertices, triangles, boundary, parent)
        .expect("red refinement preserves topology")
}

/// Newest-vertex bisection of the marked triangles, closed so that the
/// result has no hanging vertices.
pub fn refine_marked(mesh: &TriMesh, marked: &[usize]) -> Result<TriMesh, MeshError> {
    let mut edge_marked = vec![false; mesh.n_edges()];
    let mut work = Vec::new();
    for &t in marked {
        if t >= mesh.n_triangles() {
            return Err(MeshError::MarkedOutOfRange(t));
        }
        let e = mesh.triangle_edges(t)[0];
        if !edge_marked[e] {
            edge_marked[e] = true;
            work.push(e);
        }
    }
    // closure: a triangle with any marked edge must have its refinement edge marked
    while let Some(e) = work.pop() {
        for &t in &mesh.edge(e).triangles {
            if t == super::NO_TRIANGLE {
                continue;
            }
            let r = mesh.triangle_edges(t)[0];
            if !edge_marked[r] {
                edge_marked[r] = true;
                work.push(r);
            }
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge_marked[e] {
            let a = mesh.vertex(edge.vertices[0]);
            let b = mesh.vertex(edge.vertices[1]);
            midpoint.insert((edge.vertices[0], edge.vertices[1]), vertices.len());
            vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        }
    }

    let mut triangles = Vec::with_capacity(mesh.n_triangles() + 2 * midpoint.len());
    let mut parent = Vec::with_capacity(triangles.capacity());
    for t in 0..mesh.n_triangles() {
        let before = triangles.len();
        bisect(mesh.triangle(t), &midpoint, &mut triangles);
        parent.extend(std::iter::repeat_n(Some(t), triangles.len() - before));
    }

    let mut boundary = Vec::new();
    for edge in mesh.edges() {
        if let Some(tag) = edge.tag {
            let [a, b] = edge.vertices;
            match midpoint.get(&(a, b)) {
                Some(&m) => {
                    boundary.push((a, m, tag));
                    boundary.push((m, b, tag));
                }
                None => boundary.push((a, b, tag)),
            }
        }
    }
    TriMesh::assemble(vertices, triangles, boundary, parent)
}

fn bisect(tri: [usize; 3], midpoint: &HashMap<(usize, usize), usize>, out: &mut Vec<[usize; 3]>) {
    let [v0, v1, v2] = tri;
    match midpoint.get(&edge_key(v1, v2)) {
        Some(&m) => {
            bisect([m, v0, v1], midpoint, out);
            bisect([m, v2, v0], midpoint, out);
        }
        None => out.push(tri),
    }
}
