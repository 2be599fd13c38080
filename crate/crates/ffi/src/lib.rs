//! C ABI over `stokes-stab`.
//!
//! Meshes and solutions are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`StokesStatus`]; on failure the message is available from
//! [`stokes_last_error_message`] until the next failing call on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use stokes_stab::estimator::{global_report, ErrorReport};
use stokes_stab::forms::Alpha;
use stokes_stab::mesh::{
    audit, generate_structured, read_mesh_file, refine_marked, refine_uniform, write_mesh_file,
    AuditConfig, TriMesh,
};
use stokes_stab::solver::{solve_problem, DiscreteSolution, SolverError};
use stokes_stab::space::{ElementPair, FeSpace};
use stokes_stab::study::{CaseId, ManufacturedCase};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StokesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Mesh = 3,
    Solver = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StokesPair {
    P1P1 = 0,
    P2P1 = 1,
}

impl From<StokesPair> for ElementPair {
    fn from(p: StokesPair) -> Self {
        match p {
            StokesPair::P1P1 => ElementPair::P1P1,
            StokesPair::P2P1 => ElementPair::P2P1,
        }
    }
}

/// Opaque triangulation.
pub struct StokesMesh {
    mesh: Arc<TriMesh>,
}

/// Opaque discrete solution with its estimator report.
pub struct StokesSolution {
    space: FeSpace,
    solution: DiscreteSolution,
    report: ErrorReport,
}

/// Scalar results of a solve. Unavailable quantities are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StokesSummary {
    pub alpha: f64,
    /// Inverse-inequality constant; NaN when unbounded.
    pub ci: f64,
    pub eta: f64,
    pub osc_f: f64,
    pub osc_t: f64,
    pub err_h1_u: f64,
    pub err_l2_p: f64,
    pub effectivity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(StokesStatus, String);

impl Failure {
    fn new(status: StokesStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StokesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StokesStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            StokesStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or valid for reads of `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: caller contract.
    unsafe { p.as_ref() }
        .ok_or_else(|| Failure::new(StokesStatus::NullPointer, format!("{what} is null")))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(
            StokesStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    // SAFETY: non-null and NUL-terminated per the caller contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        Failure::new(
            StokesStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(
            StokesStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    // SAFETY: non-null and writable per the caller contract.
    unsafe { out.write(value) };
    Ok(())
}

fn parse_case(name: &str) -> Result<ManufacturedCase, Failure> {
    name.parse::<CaseId>()
        .map(ManufacturedCase::new)
        .map_err(|e| Failure::new(StokesStatus::InvalidArgument, e))
}

fn mesh_failure(e: impl ToString) -> Failure {
    Failure::new(StokesStatus::Mesh, e)
}

fn boxed_mesh(mesh: TriMesh) -> *mut StokesMesh {
    Box::into_raw(Box::new(StokesMesh {
        mesh: Arc::new(mesh),
    }))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn stokes_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stokes_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Structured mesh of a built-in case (`SMOOTH_SQUARE`, `NEUMANN_STRIP`,
/// `NONZERO_G`, `LSHAPE_PEAK`) with `n` subdivisions.
///
/// # Safety
/// `case_name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_for_case(
    case_name: *const c_char,
    n: usize,
    out: *mut *mut StokesMesh,
) -> StokesStatus {
    guard(|| {
        let case = parse_case(unsafe { c_str(case_name, "case_name") }?)?;
        let mesh = generate_structured(case.domain, n, case.boundary).map_err(mesh_failure)?;
        unsafe { put(out, boxed_mesh(mesh), "out") }
    })
}

/// Reads a mesh in the plain-text format. The mesh is not audited.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_read(
    path: *const c_char,
    out: *mut *mut StokesMesh,
) -> StokesStatus {
    guard(|| {
        let path = unsafe { c_str(path, "path") }?;
        let mesh = read_mesh_file(Path::new(path)).map_err(|e| match e {
            stokes_stab::mesh::MeshError::Io(io) => {
                Failure::new(StokesStatus::Io, format!("{path}: {io}"))
            }
            other => mesh_failure(format!("{path}: {other}")),
        })?;
        unsafe { put(out, boxed_mesh(mesh), "out") }
    })
}

/// # Safety
/// `mesh` is a live handle; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_write(
    mesh: *const StokesMesh,
    path: *const c_char,
) -> StokesStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let path = unsafe { c_str(path, "path") }?;
        write_mesh_file(&mesh.mesh, Path::new(path))
            .map_err(|e| Failure::new(StokesStatus::Io, format!("{path}: {e}")))
    })
}

/// New mesh with every triangle split into four.
///
/// # Safety
/// `mesh` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_refine_uniform(
    mesh: *const StokesMesh,
    out: *mut *mut StokesMesh,
) -> StokesStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        unsafe { put(out, boxed_mesh(refine_uniform(&mesh.mesh)), "out") }
    })
}

/// New mesh after newest-vertex bisection of the `n_marked` listed
/// triangles and their conforming closure.
///
/// # Safety
/// `mesh` is a live handle; `marked` is readable for `n_marked` entries
/// (may be null when `n_marked` is 0); `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_refine_marked(
    mesh: *const StokesMesh,
    marked: *const usize,
    n_marked: usize,
    out: *mut *mut StokesMesh,
) -> StokesStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let marked: &[usize] = if n_marked == 0 {
            &[]
        } else if marked.is_null() {
            return Err(Failure::new(StokesStatus::NullPointer, "marked is null"));
        } else {
            // SAFETY: readable for n_marked entries per the caller contract.
            unsafe { std::slice::from_raw_parts(marked, n_marked) }
        };
        let refined = refine_marked(&mesh.mesh, marked)
            .map_err(|e| Failure::new(StokesStatus::InvalidArgument, e))?;
        unsafe { put(out, boxed_mesh(refined), "out") }
    })
}

/// # Safety
/// `mesh` is a live handle; each output pointer is null or writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_counts(
    mesh: *const StokesMesh,
    n_vertices: *mut usize,
    n_triangles: *mut usize,
    n_edges: *mut usize,
) -> StokesStatus {
    guard(|| {
        let m = &unsafe { deref(mesh, "mesh") }?.mesh;
        // SAFETY: each pointer is null or writable per the caller contract.
        unsafe {
            if let Some(p) = n_vertices.as_mut() {
                *p = m.n_vertices();
            }
            if let Some(p) = n_triangles.as_mut() {
                *p = m.n_triangles();
            }
            if let Some(p) = n_edges.as_mut() {
                *p = m.n_edges();
            }
        }
        Ok(())
    })
}

/// Runs the mesh audit with the given minimum angle in degrees. Returns
/// `Ok` when the checks pass and `Mesh` otherwise, with the failed checks
/// in the last error message.
///
/// # Safety
/// `mesh` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_audit(
    mesh: *const StokesMesh,
    min_angle_deg: f64,
) -> StokesStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        if !(min_angle_deg > 0.0 && min_angle_deg < 60.0) {
            return Err(Failure::new(
                StokesStatus::InvalidArgument,
                "min_angle_deg must lie in (0, 60)",
            ));
        }
        let report = audit(&mesh.mesh, &AuditConfig { min_angle_deg });
        if report.passed() {
            Ok(())
        } else {
            Err(mesh_failure(report.summary()))
        }
    })
}

/// # Safety
/// `mesh` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stokes_mesh_free(mesh: *mut StokesMesh) {
    if !mesh.is_null() {
        // SAFETY: produced by Box::into_raw in this crate and not yet freed.
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// Solves a built-in case on `mesh`. `alpha` NaN selects the default
/// stabilization parameter.
///
/// # Safety
/// `mesh` is a live handle; `case_name` is a NUL-terminated string; `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_solve_case(
    mesh: *const StokesMesh,
    case_name: *const c_char,
    pair: StokesPair,
    alpha: f64,
    out: *mut *mut StokesSolution,
) -> StokesStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let case = parse_case(unsafe { c_str(case_name, "case_name") }?)?;
        let alpha = if alpha.is_nan() {
            Alpha::Auto
        } else {
            Alpha::Value(alpha)
        };
        let audit_report = audit(&mesh.mesh, &AuditConfig::default());
        if !audit_report.passed() {
            return Err(mesh_failure(audit_report.summary()));
        }
        let problem = case.problem().with_alpha(alpha);
        let space = FeSpace::new(mesh.mesh.clone(), pair.into());
        let solver_failure = |e: SolverError| match e {
            SolverError::Forms(f) => Failure::new(StokesStatus::InvalidArgument, f),
            other => Failure::new(StokesStatus::Solver, other),
        };
        let solution = solve_problem(&space, &problem).map_err(solver_failure)?;
        let report = global_report(&solution, &space, &problem).map_err(solver_failure)?;
        let handle = Box::into_raw(Box::new(StokesSolution {
            space,
            solution,
            report,
        }));
        unsafe { put(out, handle, "out") }
    })
}

/// # Safety
/// `solution` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_summary(
    solution: *const StokesSolution,
    out: *mut StokesSummary,
) -> StokesStatus {
    guard(|| {
        let s = unsafe { deref(solution, "solution") }?;
        let errors = s.report.true_errors;
        let summary = StokesSummary {
            alpha: s.solution.alpha,
            ci: s.solution.ci.value().unwrap_or(f64::NAN),
            eta: s.report.eta,
            osc_f: s.report.osc_f,
            osc_t: s.report.osc_t,
            err_h1_u: errors.map_or(f64::NAN, |e| e.velocity_h1),
            err_l2_p: errors.map_or(f64::NAN, |e| e.pressure_l2),
            effectivity: s.report.effectivity.unwrap_or(f64::NAN),
        };
        unsafe { put(out, summary, "out") }
    })
}

/// # Safety
/// `buf` is writable for `capacity` entries or null with `capacity` 0;
/// `written` is null or writable.
unsafe fn copy_out(
    values: &[f64],
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> Result<(), Failure> {
    // SAFETY: null or writable per the caller contract.
    if let Some(w) = unsafe { written.as_mut() } {
        *w = values.len();
    }
    if capacity < values.len() {
        return Err(Failure::new(
            StokesStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(Failure::new(StokesStatus::NullPointer, "buf is null"));
    }
    // SAFETY: buf is writable for capacity >= values.len() entries.
    unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    Ok(())
}

/// Velocity coefficients, interleaved `(x, y)` per node: vertices first,
/// then edge midpoints for `P2P1`. `written` receives the required length
/// even when the buffer is too small.
///
/// # Safety
/// `solution` is a live handle; `buf` is writable for `capacity` values or
/// null with `capacity` 0; `written` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_velocity(
    solution: *const StokesSolution,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StokesStatus {
    guard(|| {
        let s = unsafe { deref(solution, "solution") }?;
        unsafe { copy_out(&s.solution.velocity, buf, capacity, written) }
    })
}

/// Pressure per mesh vertex.
///
/// # Safety
/// As [`stokes_solution_velocity`].
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_pressure(
    solution: *const StokesSolution,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StokesStatus {
    guard(|| {
        let s = unsafe { deref(solution, "solution") }?;
        unsafe { copy_out(&s.solution.pressure, buf, capacity, written) }
    })
}

/// Element indicators `eta_K` per triangle.
///
/// # Safety
/// As [`stokes_solution_velocity`].
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_eta(
    solution: *const StokesSolution,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StokesStatus {
    guard(|| {
        let s = unsafe { deref(solution, "solution") }?;
        unsafe { copy_out(&s.report.eta_k, buf, capacity, written) }
    })
}

/// Marking indicators per triangle; they sum to `eta^2`.
///
/// # Safety
/// As [`stokes_solution_velocity`].
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_marking_indicators(
    solution: *const StokesSolution,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StokesStatus {
    guard(|| {
        let s = unsafe { deref(solution, "solution") }?;
        let indicators = s.report.marking_indicators(&s.space);
        unsafe { copy_out(&indicators, buf, capacity, written) }
    })
}

/// # Safety
/// `solution` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stokes_solution_free(solution: *mut StokesSolution) {
    if !solution.is_null() {
        // SAFETY: produced by Box::into_raw in this crate and not yet freed.
        drop(unsafe { Box::from_raw(solution) });
    }
}
