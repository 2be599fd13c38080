//! Manufactured cases, uniform convergence studies and the adaptive loop.

mod adaptive;
mod cases;
mod table;
mod uniform;

use std::sync::Arc;

pub use adaptive::{
    adaptive_study, adaptive_study_from, dorfler_mark, AdaptiveLog, AdaptiveOptions, AdaptiveStep,
};
pub use cases::{
    builtin_cases, peak_force, CaseId, ManufacturedCase, NonzeroDivergence, PolynomialSolution,
    Regularity, SmoothSquare, PEAK_AMPLITUDE, PEAK_CENTER, PEAK_WIDTH,
};
pub use table::{ConvergenceTable, LevelRecord, RateKind, CSV_HEADER};
pub use uniform::{uniform_study, uniform_study_from, StudyOptions};

use crate::estimator::{efficiency_audit, global_report_with, ErrorReport, Projection};
use crate::forms::{assemble_system, StokesProblem};
use crate::mesh::{MeshError, TriMesh};
use crate::solver::{solve, DiscreteSolution, SolverError};
use crate::space::{ElementPair, FeSpace};

#[derive(Debug, thiserror::Error)]
pub enum StudyError {
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("level {level}: {source}")]
    Solve {
        level: usize,
        #[source]
        source: SolverError,
    },
    #[error("writing level output: {0}")]
    Output(#[from] std::io::Error),
}

/// Everything computed on one mesh, handed to per-level callbacks.
#[derive(Debug)]
pub struct LevelOutput<'a> {
    pub level: usize,
    pub space: &'a FeSpace,
    pub solution: &'a DiscreteSolution,
    pub report: &'a ErrorReport,
    pub record: &'a LevelRecord,
}

/// Solves on `mesh` and evaluates the estimator and, when available, the
/// true errors.
pub(crate) fn solve_level(
    level: usize,
    mesh: Arc<TriMesh>,
    pair: ElementPair,
    problem: &StokesProblem,
    projection: Projection,
    audit: bool,
) -> Result<(FeSpace, DiscreteSolution, ErrorReport, LevelRecord), StudyError> {
    let wrap = |source| StudyError::Solve { level, source };
    let space = FeSpace::new(mesh, pair);
    let system = assemble_system(&space, problem).map_err(|e| wrap(e.into()))?;
    let solution = solve(&system).map_err(wrap)?;
    let report = global_report_with(&solution, &space, problem, projection).map_err(wrap)?;
    let efficiency_max = if audit && problem.exact.is_some() {
        Some(
            efficiency_audit(&solution, &space, problem)
                .map_err(wrap)?
                .max,
        )
    } else {
        None
    };
    let record = LevelRecord {
        level,
        h: space.mesh().max_diameter(),
        n_triangles: space.mesh().n_triangles(),
        n_u: space.n_u(),
        n_p: space.n_p(),
        errors: report.true_errors,
        eta: report.eta,
        osc_f: report.osc_f,
        osc_t: report.osc_t,
        effectivity: report.effectivity,
        efficiency_max,
    };
    Ok((space, solution, report, record))
}
