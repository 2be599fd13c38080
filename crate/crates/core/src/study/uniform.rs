use std::sync::Arc;

use crate::estimator::Projection;
use crate::forms::Alpha;
use crate::mesh::{generate_structured, refine_uniform, TriMesh};
use crate::space::ElementPair;

use super::{solve_level, ConvergenceTable, LevelOutput, ManufacturedCase, RateKind, StudyError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub pair: ElementPair,
    pub alpha: Alpha,
    pub levels: usize,
    /// Subdivisions of the coarsest structured mesh.
    pub initial_n: usize,
    pub projection: Projection,
    /// Run the per-element efficiency audit on every level.
    pub efficiency: bool,
}

impl StudyOptions {
    pub fn new(pair: ElementPair, levels: usize) -> Self {
        StudyOptions {
            pair,
            alpha: Alpha::Auto,
            levels,
            initial_n: 4,
            projection: Projection::Global,
            efficiency: false,
        }
    }
}

/// Solves on `levels` successively red-refined meshes, starting from the
/// structured mesh of the case with `initial_n` subdivisions.
pub fn uniform_study(
    case: &ManufacturedCase,
    options: &StudyOptions,
    on_level: impl FnMut(LevelOutput<'_>) -> std::io::Result<()>,
) -> Result<ConvergenceTable, StudyError> {
    let mesh = generate_structured(case.domain, options.initial_n, case.boundary)?;
    uniform_study_from(case, mesh, options, on_level)
}

/// As [`uniform_study`], starting from a given mesh.
pub fn uniform_study_from(
    case: &ManufacturedCase,
    initial: TriMesh,
    options: &StudyOptions,
    mut on_level: impl FnMut(LevelOutput<'_>) -> std::io::Result<()>,
) -> Result<ConvergenceTable, StudyError> {
    if options.levels < 3 {
        return Err(StudyError::Config(format!(
            "levels must be at least 3, got {}",
            options.levels
        )));
    }
    let problem = case.problem().with_alpha(options.alpha);
    let mut mesh = Arc::new(initial);
    let mut rows = Vec::with_capacity(options.levels);
    let mut alpha = 0.0;
    for level in 0..options.levels {
        if level > 0 {
            mesh = Arc::new(refine_uniform(&mesh));
        }
        let (space, solution, report, record) = solve_level(
            level,
            mesh.clone(),
            options.pair,
            &problem,
            options.projection,
            options.efficiency,
        )?;
        alpha = solution.alpha;
        on_level(LevelOutput {
            level,
            space: &space,
            solution: &solution,
            report: &report,
            record: &record,
        })?;
        rows.push(record);
    }
    Ok(ConvergenceTable {
        rows,
        rate_kind: RateKind::Halving,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::CaseId;

    #[test]
    fn too_few_levels_rejected() {
        let case = ManufacturedCase::new(CaseId::SmoothSquare);
        let r = uniform_study(&case, &StudyOptions::new(ElementPair::P1P1, 2), |_| Ok(()));
        assert!(matches!(r, Err(StudyError::Config(_))));
    }

    #[test]
    fn h_halves_and_callback_sees_every_level() {
        let case = ManufacturedCase::new(CaseId::SmoothSquare);
        let mut opts = StudyOptions::new(ElementPair::P1P1, 3);
        opts.initial_n = 2;
        let mut seen = Vec::new();
        let table = uniform_study(&case, &opts, |out| {
            seen.push(out.level);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, vec![0, 1, 2]);
        assert_eq!(table.rates().len(), 2);
        for w in table.rows.windows(2) {
            assert_eq!(w[1].h, 0.5 * w[0].h);
        }
    }
}
