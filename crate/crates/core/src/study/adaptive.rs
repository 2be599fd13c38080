use std::sync::Arc;

use crate::estimator::Projection;
use crate::forms::Alpha;
use crate::mesh::{generate_structured, refine_marked, Point, TriMesh};
use crate::space::ElementPair;

use super::{
    solve_level, ConvergenceTable, LevelOutput, LevelRecord, ManufacturedCase, RateKind, StudyError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub pair: ElementPair,
    pub alpha: Alpha,
    /// Dörfler parameter in `(0, 1]`.
    pub theta: f64,
    /// Number of solves.
    pub max_iters: usize,
    /// Stop once `eta` falls to this value.
    pub target_eta: Option<f64>,
    pub initial_n: usize,
    pub projection: Projection,
}

impl AdaptiveOptions {
    pub fn new(pair: ElementPair, max_iters: usize) -> Self {
        AdaptiveOptions {
            pair,
            alpha: Alpha::Auto,
            theta: 0.5,
            max_iters,
            target_eta: None,
            initial_n: 4,
            projection: Projection::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveStep {
    pub record: LevelRecord,
    /// Triangles marked on this iteration's mesh (empty on the last one).
    pub marked: Vec<usize>,
    pub marked_centroids: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveLog {
    pub steps: Vec<AdaptiveStep>,
    pub alpha: f64,
}

impl AdaptiveLog {
    pub fn to_table(&self) -> ConvergenceTable {
        ConvergenceTable {
            rows: self.steps.iter().map(|s| s.record.clone()).collect(),
            rate_kind: RateKind::Dofs,
            alpha: self.alpha,
        }
    }

    /// Fraction of the triangles marked during the first `iterations`
    /// iterations whose centroid lies within `radius` of one of `centers`.
    pub fn marked_fraction_near(&self, centers: &[Point], radius: f64, iterations: usize) -> f64 {
        let centroids: Vec<&Point> = self
            .steps
            .iter()
            .take(iterations)
            .flat_map(|s| &s.marked_centroids)
            .collect();
        if centroids.is_empty() {
            return 0.0;
        }
        let near = centroids
            .iter()
            .filter(|c| {
                centers
                    .iter()
                    .any(|z| (c[0] - z[0]).hypot(c[1] - z[1]) <= radius)
            })
            .count();
        near as f64 / centroids.len() as f64
    }
}

/// Smallest set of triangles, taken in decreasing indicator order, whose
/// indicators sum to at least `theta^2` times the total. Ties keep index
/// order.
pub fn dorfler_mark(indicators: &[f64], theta: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]));
    let total: f64 = order.iter().map(|&t| indicators[t]).sum();
    let target = theta * theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for t in order {
        if acc >= target && !marked.is_empty() {
            break;
        }
        acc += indicators[t];
        marked.push(t);
    }
    marked.sort_unstable();
    marked
}

/// Solve, estimate, mark and bisect until `max_iters` solves or the target,
/// starting from the structured mesh of the case.
pub fn adaptive_study(
    case: &ManufacturedCase,
    options: &AdaptiveOptions,
    on_step: impl FnMut(LevelOutput<'_>) -> std::io::Result<()>,
) -> Result<AdaptiveLog, StudyError> {
    let mesh = generate_structured(case.domain, options.initial_n, case.boundary)?;
    adaptive_study_from(case, mesh, options, on_step)
}

/// As [`adaptive_study`], starting from a given mesh.
pub fn adaptive_study_from(
    case: &ManufacturedCase,
    initial: TriMesh,
    options: &AdaptiveOptions,
    mut on_step: impl FnMut(LevelOutput<'_>) -> std::io::Result<()>,
) -> Result<AdaptiveLog, StudyError> {
    if !(options.theta > 0.0 && options.theta <= 1.0) {
        return Err(StudyError::Config(format!(
            "theta must lie in (0, 1], got {}",
            options.theta
        )));
    }
    if options.max_iters == 0 {
        return Err(StudyError::Config("max_iters must be positive".into()));
    }
    let problem = case.problem().with_alpha(options.alpha);
    let mut mesh = Arc::new(initial);
    let mut steps = Vec::new();
    let mut alpha = 0.0;
    for it in 0..options.max_iters {
        let (space, solution, report, record) = solve_level(
            it,
            mesh.clone(),
            options.pair,
            &problem,
            options.projection,
            false,
        )?;
        alpha = solution.alpha;
        on_step(LevelOutput {
            level: it,
            space: &space,
            solution: &solution,
            report: &report,
            record: &record,
        })?;
        let done =
            it + 1 == options.max_iters || options.target_eta.is_some_and(|t| report.eta <= t);
        let marked = if done {
            Vec::new()
        } else {
            dorfler_mark(&report.marking_indicators(&space), options.theta)
        };
        let marked_centroids = marked.iter().map(|&t| mesh.centroid(t)).collect();
        if !done {
            mesh = Arc::new(refine_marked(&mesh, &marked)?);
        }
        steps.push(AdaptiveStep {
            record,
            marked,
            marked_centroids,
        });
        if done {
            break;
        }
    }
    Ok(AdaptiveLog { steps, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::CaseId;

    #[test]
    fn dorfler_takes_largest_first() {
        assert_eq!(dorfler_mark(&[1.0, 4.0, 2.0, 3.0], 0.5), vec![1]);
        // theta^2 = 0.64 of 10: 4 + 3 = 7
        assert_eq!(dorfler_mark(&[1.0, 4.0, 2.0, 3.0], 0.8), vec![1, 3]);
        assert_eq!(dorfler_mark(&[1.0, 4.0, 2.0, 3.0], 1.0), vec![0, 1, 2, 3]);
        assert_eq!(dorfler_mark(&[0.0, 0.0], 0.5), vec![0]);
    }

    #[test]
    fn invalid_theta_rejected() {
        let case = ManufacturedCase::new(CaseId::SmoothSquare);
        let mut opts = AdaptiveOptions::new(ElementPair::P1P1, 2);
        opts.theta = 0.0;
        assert!(matches!(
            adaptive_study(&case, &opts, |_| Ok(())),
            Err(StudyError::Config(_))
        ));
    }

    #[test]
    fn log_records_every_iteration() {
        let case = ManufacturedCase::new(CaseId::SmoothSquare);
        let mut opts = AdaptiveOptions::new(ElementPair::P1P1, 3);
        opts.initial_n = 2;
        let log = adaptive_study(&case, &opts, |_| Ok(())).unwrap();
        assert_eq!(log.steps.len(), 3);
        assert!(log.steps[2].marked.is_empty());
        for w in log.steps.windows(2) {
            assert!(w[1].record.n_triangles > w[0].record.n_triangles);
        }
        assert_eq!(log.to_table().rates().len(), 2);
    }
}
