use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use crate::estimator::ErrorReport;
use crate::solver::DiscreteSolution;
use crate::space::FeSpace;

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Legacy ASCII unstructured grid on the mesh vertices. Velocity and
/// pressure are the nodal values at the vertices; `eta_K` is per cell.
pub fn vtk_string(
    space: &FeSpace,
    solution: &DiscreteSolution,
    report: &ErrorReport,
    title: &str,
) -> String {
    let mesh = space.mesh();
    let (nv, nt) = (mesh.n_vertices(), mesh.n_triangles());
    let mut s = String::new();
    let mut line = |args: std::fmt::Arguments<'_>| {
        s.write_fmt(args).expect("writing to a String");
        s.push('\n');
    };
    line(format_args!("# vtk DataFile Version 3.0"));
    line(format_args!("{title}"));
    line(format_args!("ASCII"));
    line(format_args!("DATASET UNSTRUCTURED_GRID"));
    line(format_args!("POINTS {nv} double"));
    for v in mesh.vertices() {
        line(format_args!("{} {} 0", v[0], v[1]));
    }
    line(format_args!("CELLS {nt} {}", 4 * nt));
    for t in mesh.triangles() {
        line(format_args!("3 {} {} {}", t[0], t[1], t[2]));
    }
    line(format_args!("CELL_TYPES {nt}"));
    for _ in 0..nt {
        line(format_args!("5"));
    }
    line(format_args!("POINT_DATA {nv}"));
    line(format_args!("VECTORS velocity double"));
    // Vertex v is velocity node v for both pairs.
    for v in 0..nv {
        line(format_args!(
            "{} {} 0",
            solution.velocity[2 * v],
            solution.velocity[2 * v + 1]
        ));
    }
    line(format_args!("SCALARS pressure double 1"));
    line(format_args!("LOOKUP_TABLE default"));
    for p in &solution.pressure {
        line(format_args!("{p}"));
    }
    line(format_args!("CELL_DATA {nt}"));
    line(format_args!("SCALARS eta_K double 1"));
    line(format_args!("LOOKUP_TABLE default"));
    for e in &report.eta_k {
        line(format_args!("{e}"));
    }
    s
}

/// Ordered `key = value` lines.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# stokes-stab run manifest\n");
        for (k, v) in &self.entries {
            writeln!(s, "{k} = {v}").expect("writing to a String");
        }
        s
    }
}
