use std::sync::Arc;

use proptest::prelude::*;
use stokes_stab::estimator::{edge_estimator, element_estimator, global_report, traction_jump};
use stokes_stab::forms::quadrature::interval_rule;
use stokes_stab::forms::{Alpha, ExactSolution, StokesProblem};
use stokes_stab::mesh::Point;
use stokes_stab::solver::{element_errors, solve_problem};
use stokes_stab::space::ElementPair;
use stokes_stab::study::{CaseId, ManufacturedCase, PolynomialSolution, SmoothSquare};

mod common;

/// An exact solution with the pressure shifted by a constant.
struct Shifted<E>(E, f64);

impl<E: ExactSolution> ExactSolution for Shifted<E> {
    fn velocity(&self, x: Point) -> [f64; 2] {
        self.0.velocity(x)
    }
    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
        self.0.velocity_gradient(x)
    }
    fn velocity_hessian(&self, x: Point) -> [[[f64; 2]; 2]; 2] {
        self.0.velocity_hessian(x)
    }
    fn pressure(&self, x: Point) -> f64 {
        self.0.pressure(x) + self.1
    }
    fn pressure_gradient(&self, x: Point) -> [f64; 2] {
        self.0.pressure_gradient(x)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solution_scales_with_data(s in -5.0f64..5.0, n in 2usize..5, p2 in any::<bool>()) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let case = ManufacturedCase::new(CaseId::NeumannStrip);
        let mesh = Arc::new(stokes_stab::mesh::generate_structured(case.domain, n, case.boundary).unwrap());
        let space = common::space(&mesh, pair);
        let problem = case.problem();
        let base = solve_problem(&space, &problem).unwrap().combined();
        let scaled = solve_problem(&space, &problem.scaled(s)).unwrap().combined();
        let norm = base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!((s * a - b).abs() <= 1e-10 * norm * s.abs().max(1.0));
        }
    }

    #[test]
    fn exact_discrete_solutions_have_no_estimate(seed in any::<u64>(), n in 1usize..4, p2 in any::<bool>()) {
        use rand::Rng;
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let mut rng = common::rng(seed);
        let mut c = || rng.random_range(-2.0..2.0);
        let exact = match pair {
            ElementPair::P1P1 => PolynomialSolution::linear_vanishing_on_left([c(), c()], [c(), c(), c()]),
            ElementPair::P2P1 => PolynomialSolution::vanishing_on_left([[c(), c(), c()], [c(), c(), c()]], [c(), c(), c()]),
        };
        let space = common::space(&common::clamped_left(n), pair);
        let problem = StokesProblem::from_exact(Arc::new(exact));
        let sol = solve_problem(&space, &problem).unwrap();
        let report = global_report(&sol, &space, &problem).unwrap();
        let scale = sol.combined().iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(report.eta <= 1e-8 * scale.max(1.0), "eta = {}", report.eta);
    }

    #[test]
    fn jumps_are_antisymmetric(seed in any::<u64>(), p2 in any::<bool>()) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let space = common::space(&common::clamped_left(3), pair);
        let problem = StokesProblem::homogeneous();
        let mut sol = solve_problem(&space, &problem).unwrap();
        let mut rng = common::rng(seed);
        sol.velocity = common::random_vec(&mut rng, space.n_u());
        sol.pressure = common::random_vec(&mut rng, space.n_p());
        let (params, _) = interval_rule(4);
        let normal = [0.6, 0.8];
        for (e, edge) in space.mesh().edges().iter().enumerate() {
            if edge.is_boundary() {
                continue;
            }
            let [k, k2] = edge.triangles;
            let a = traction_jump(&sol, &space, e, k, &params, normal).unwrap();
            let b = traction_jump(&sol, &space, e, k2, &params, normal).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x[0] + y[0]).abs() <= 1e-12 && (x[1] + y[1]).abs() <= 1e-12);
            }
            let flipped = traction_jump(&sol, &space, e, k2, &params, [-normal[0], -normal[1]]).unwrap();
            for (x, y) in a.iter().zip(&flipped) {
                prop_assert!((x[0] - y[0]).abs() <= 1e-12 && (x[1] - y[1]).abs() <= 1e-12);
            }
        }
    }

    /// Shifting `p` by a constant, and `t` with it, moves `p_h` by the same
    /// constant and leaves the velocity error and the residuals unchanged.
    #[test]
    fn pressure_gauge_does_not_change_estimates(shift in -10.0f64..10.0, p2 in any::<bool>()) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let case = ManufacturedCase::new(CaseId::NeumannStrip);
        let mesh = Arc::new(stokes_stab::mesh::generate_structured(case.domain, 4, case.boundary).unwrap());
        let space = common::space(&mesh, pair);
        let base = StokesProblem::from_exact(Arc::new(SmoothSquare));
        let moved = StokesProblem::from_exact(Arc::new(Shifted(SmoothSquare, shift)));
        let s0 = solve_problem(&space, &base).unwrap();
        let s1 = solve_problem(&space, &moved).unwrap();
        for (p0, p1) in s0.pressure.iter().zip(&s1.pressure) {
            prop_assert!((p1 - p0 - shift).abs() <= 1e-10 * (1.0 + shift.abs()));
        }
        let e0 = element_errors(&s0, &space, &base).unwrap();
        let e1 = element_errors(&s1, &space, &moved).unwrap();
        for (a, b) in e0.iter().zip(&e1) {
            prop_assert!((a[0].sqrt() - b[0].sqrt()).abs() <= 1e-10);
        }
        for t in 0..mesh.n_triangles() {
            let d = element_estimator(&s0, &space, &base, t) - element_estimator(&s1, &space, &moved, t);
            prop_assert!(d.abs() <= 1e-10);
        }
        for (e, edge) in mesh.edges().iter().enumerate() {
            if !edge.is_boundary() {
                let d = edge_estimator(&s0, &space, &base, e) - edge_estimator(&s1, &space, &moved, e);
                prop_assert!(d.abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn repeated_solves_are_bit_identical() {
    for case in [
        CaseId::SmoothSquare,
        CaseId::NeumannStrip,
        CaseId::LShapePeak,
    ] {
        let case = ManufacturedCase::new(case);
        for pair in common::PAIRS {
            let n = if case.id == CaseId::LShapePeak { 4 } else { 3 };
            let mesh = Arc::new(
                stokes_stab::mesh::generate_structured(case.domain, n, case.boundary).unwrap(),
            );
            let space = common::space(&mesh, pair);
            let problem = case.problem().with_alpha(Alpha::Auto);
            let a = solve_problem(&space, &problem).unwrap();
            let b = solve_problem(&space, &problem).unwrap();
            let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
            assert_eq!(bits(a.combined()), bits(b.combined()));
            assert_eq!(
                a.multiplier.map(f64::to_bits),
                b.multiplier.map(f64::to_bits)
            );
        }
    }
}
