use std::collections::HashMap;
use std::fmt;

use super::{min_angle_of, BoundaryTag, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Orientation,
    Conformity,
    BoundaryTags,
    DirichletNonempty,
    ShapeRegularity,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Orientation => "orientation",
            Check::Conformity => "conformity",
            Check::BoundaryTags => "boundary-tags",
            Check::DirichletNonempty => "dirichlet-nonempty",
            Check::ShapeRegularity => "shape-regularity",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    /// Offending triangles, edges or vertices, depending on the check.
    pub offenders: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Smallest admissible interior angle, in degrees.
    pub min_angle_deg: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { min_angle_deg: 5.0 }
    }
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub checks: Vec<CheckResult>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn result(&self, check: Check) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.check == check)
            .expect("every check is run")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One-line description of the failed checks.
    pub fn summary(&self) -> String {
        if self.passed() {
            return "all checks passed".to_string();
        }
        self.failures()
            .map(|c| format!("{} failed: {}", c.check, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {}: {}", c.check, c.detail)?;
        }
        Ok(())
    }
}

/// Verifies the mesh invariants and reports offending entities.
pub fn audit(mesh: &TriMesh, config: &AuditConfig) -> AuditReport {
    AuditReport {
        checks: vec![
            check_orientation(mesh),
            check_conformity(mesh),
            check_tags(mesh),
            check_dirichlet(mesh),
            check_shape(mesh, config),
        ],
    }
}

fn result(check: Check, offenders: Vec<usize>, what: &str) -> CheckResult {
    let passed = offenders.is_empty();
    let detail = if passed {
        "ok".to_string()
    } else {
        let shown: Vec<String> = offenders.iter().take(8).map(|o| o.to_string()).collect();
        let more = if offenders.len() > 8 { ", ..." } else { "" };
        format!("{} {what} [{}{more}]", offenders.len(), shown.join(", "))
    };
    CheckResult {
        check,
        passed,
        offenders,
        detail,
    }
}

fn check_orientation(mesh: &TriMesh) -> CheckResult {
    let bad = (0..mesh.n_triangles())
        .filter(|&t| mesh.geometry(t).det <= 0.0)
        .collect();
    result(Check::Orientation, bad, "triangles not counterclockwise")
}

fn check_conformity(mesh: &TriMesh) -> CheckResult {
    let mut problems = Vec::new();
    let mut details = Vec::new();

    if !mesh.overshared_edges().is_empty() {
        details.push(format!(
            "{} edges shared by more than two triangles",
            mesh.overshared_edges().len()
        ));
        problems.extend_from_slice(mesh.overshared_edges());
    }

    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    let mut duplicated = Vec::new();
    for (v, p) in mesh.vertices().iter().enumerate() {
        let key = ((p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits());
        if seen.insert(key, v).is_some() {
            duplicated.push(v);
        }
    }
    if !duplicated.is_empty() {
        details.push(format!(
            "duplicated vertices {:?}",
            &duplicated[..duplicated.len().min(8)]
        ));
        problems.extend_from_slice(&duplicated);
    }

    // a hanging vertex lies strictly inside an edge that has only one
    // incident triangle
    let boundary: Vec<usize> = (0..mesh.n_edges())
        .filter(|&e| mesh.edge(e).is_boundary())
        .collect();
    let mut on_boundary: Vec<usize> = boundary
        .iter()
        .flat_map(|&e| mesh.edge(e).vertices)
        .collect();
    on_boundary.sort_unstable();
    on_boundary.dedup();
    let mut hanging = Vec::new();
    for &e in &boundary {
        let [a, b] = mesh.edge(e).vertices;
        let pa = mesh.vertex(a);
        let pb = mesh.vertex(b);
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        for &v in &on_boundary {
            if v == a || v == b {
                continue;
            }
            let p = mesh.vertex(v);
            let w = [p[0] - pa[0], p[1] - pa[1]];
            let s = (w[0] * d[0] + w[1] * d[1]) / len2;
            let cross = w[0] * d[1] - w[1] * d[0];
            if s > 1e-12 && s < 1.0 - 1e-12 && cross.abs() <= 1e-12 * len2 {
                hanging.push(v);
            }
        }
    }
    hanging.sort_unstable();
    hanging.dedup();
    if !hanging.is_empty() {
        details.push(format!(
            "hanging vertices {:?}",
            &hanging[..hanging.len().min(8)]
        ));
        problems.extend_from_slice(&hanging);
    }

    CheckResult {
        check: Check::Conformity,
        passed: problems.is_empty(),
        offenders: problems,
        detail: if details.is_empty() {
            "ok".to_string()
        } else {
            details.join(", ")
        },
    }
}

fn check_tags(mesh: &TriMesh) -> CheckResult {
    let mut bad: Vec<usize> = (0..mesh.n_edges())
        .filter(|&e| mesh.edge(e).is_boundary() && mesh.edge(e).tag.is_none())
        .collect();
    let mut detail = Vec::new();
    if !bad.is_empty() {
        detail.push(format!(
            "{} untagged boundary edges {:?}",
            bad.len(),
            &bad[..bad.len().min(8)]
        ));
    }
    if !mesh.bad_tags().is_empty() {
        detail.push(format!(
            "{} tags on interior or already tagged edges {:?}",
            mesh.bad_tags().len(),
            &mesh.bad_tags()[..mesh.bad_tags().len().min(8)]
        ));
        bad.extend(mesh.bad_tags().iter().map(|p| p[0]));
    }
    CheckResult {
        check: Check::BoundaryTags,
        passed: bad.is_empty(),
        offenders: bad,
        detail: if detail.is_empty() {
            "ok".to_string()
        } else {
            detail.join(", ")
        },
    }
}

fn check_dirichlet(mesh: &TriMesh) -> CheckResult {
    let any = mesh
        .edges()
        .iter()
        .any(|e| e.tag == Some(BoundaryTag::Dirichlet));
    CheckResult {
        check: Check::DirichletNonempty,
        passed: any,
        offenders: Vec::new(),
        detail: if any {
            "ok".to_string()
        } else {
            "no Dirichlet edge".to_string()
        },
    }
}

fn check_shape(mesh: &TriMesh, config: &AuditConfig) -> CheckResult {
    let threshold = config.min_angle_deg.to_radians();
    let bad = (0..mesh.n_triangles())
        .filter(|&t| min_angle_of(mesh.corners(t)) < threshold)
        .collect();
    result(
        Check::ShapeRegularity,
        bad,
        "triangles below the minimum angle",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured, BoundarySpec, Domain};

    #[test]
    fn generated_meshes_pass() {
        for (d, n) in [
            (Domain::UnitSquare, 1),
            (Domain::UnitSquare, 5),
            (Domain::LShape, 4),
        ] {
            let m = generate_structured(d, n, BoundarySpec::all_dirichlet()).unwrap();
            let r = audit(&m, &AuditConfig::default());
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn clockwise_triangle_is_named() {
        let m = generate_structured(Domain::UnitSquare, 2, BoundarySpec::all_dirichlet()).unwrap();
        let mut tris = m.triangles().to_vec();
        tris[3].swap(1, 2);
        let bad = TriMesh::from_raw(m.vertices().to_vec(), tris, m.boundary_entries()).unwrap();
        let r = audit(&bad, &AuditConfig::default());
        let o = r.result(Check::Orientation);
        assert!(!o.passed);
        assert_eq!(o.offenders, vec![3]);
    }

    #[test]
    fn hanging_node_fails_conformity() {
        // unit square split along the diagonal; the lower triangle is split
        // again at the diagonal midpoint, the upper one is not
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let triangles = vec![[0, 1, 4], [1, 2, 4], [0, 2, 3]];
        let boundary = vec![
            (0, 1, BoundaryTag::Dirichlet),
            (1, 2, BoundaryTag::Dirichlet),
            (2, 3, BoundaryTag::Dirichlet),
            (3, 0, BoundaryTag::Dirichlet),
        ];
        let m = TriMesh::from_raw(vertices, triangles, boundary).unwrap();
        let r = audit(&m, &AuditConfig::default());
        let c = r.result(Check::Conformity);
        assert!(!c.passed);
        assert!(c.offenders.contains(&4));
        assert!(r.summary().contains("conformity"));
    }

    #[test]
    fn duplicated_vertex_fails_conformity() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 4, 3]];
        let m = TriMesh::from_raw(vertices, triangles, Vec::new()).unwrap();
        let r = audit(&m, &AuditConfig::default());
        assert!(!r.result(Check::Conformity).passed);
        assert!(!r.result(Check::BoundaryTags).passed);
    }

    #[test]
    fn pure_neumann_is_rejected() {
        use crate::mesh::Side;
        let spec = BoundarySpec::with_neumann(&[Side::Left, Side::Right, Side::Top, Side::Bottom]);
        let m = generate_structured(Domain::UnitSquare, 2, spec).unwrap();
        assert!(
            !audit(&m, &AuditConfig::default())
                .result(Check::DirichletNonempty)
                .passed
        );
        assert!(TriMesh::new(
            m.vertices().to_vec(),
            m.triangles().to_vec(),
            m.boundary_entries()
        )
        .is_err());
    }
}
