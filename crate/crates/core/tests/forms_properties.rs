use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use stokes_stab::forms::{
    assemble_b, assemble_f, assemble_lh, assemble_sh, assemble_system, estimate_ci, Alpha,
    StokesProblem,
};
use stokes_stab::space::{interpolate, ElementPair, FeSpace};
use stokes_stab::study::PolynomialSolution;

mod common;

fn polynomial(rng: &mut impl Rng, pair: ElementPair) -> PolynomialSolution {
    let mut c = || rng.random_range(-2.0..2.0);
    let p = [c(), c(), c()];
    match pair {
        ElementPair::P1P1 => PolynomialSolution::linear_vanishing_on_left([c(), c()], p),
        ElementPair::P2P1 => {
            PolynomialSolution::vanishing_on_left([[c(), c(), c()], [c(), c(), c()]], p)
        }
    }
}

fn exact_dofs(space: &FeSpace, exact: &PolynomialSolution) -> Vec<f64> {
    use stokes_stab::forms::ExactSolution;
    let (u, p) = interpolate(space, |x| exact.velocity(x), |x| exact.pressure(x));
    common::combined(&u, &p)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// `B_h(u, p; v, q) = F_h(v, q)` for every test pair vanishing on the
    /// clamped side, and `S_h(u, p; v, q) = L_h(v, q)` for every basis pair.
    #[test]
    fn exact_polynomials_satisfy_the_discrete_equations(seed in any::<u64>(), n in 1usize..4, p2 in any::<bool>()) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let mut rng = common::rng(seed);
        let exact = polynomial(&mut rng, pair);
        let mesh = common::clamped_left(n);
        let space = common::space(&mesh, pair);
        let problem = StokesProblem::from_exact(Arc::new(exact));
        let x = exact_dofs(&space, &exact);

        let system = assemble_system(&space, &problem).unwrap();
        let residual = system.matrix.mul_vec(&x);
        let scale = max_abs(system.rhs.iter().copied()).max(1.0);
        for &d in &system.free_dofs {
            prop_assert!((residual[d] - system.rhs[d]).abs() <= 1e-10 * scale, "dof {d}");
        }

        let sh = assemble_sh(&space).mul_vec(&x);
        let lh = assemble_lh(&space, &problem);
        let scale = max_abs(lh.iter().copied()).max(1.0);
        for (d, (s, l)) in sh.iter().zip(&lh).enumerate() {
            prop_assert!((s - l).abs() <= 1e-10 * scale, "dof {d}");
        }
    }

    #[test]
    fn pressure_block_of_sh_is_the_mesh_seminorm(seed in any::<u64>(), n in 1usize..5, p2 in any::<bool>()) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let space = common::space(&common::square(n), pair);
        let sh = assemble_sh(&space);
        let mut rng = common::rng(seed);
        for _ in 0..10 {
            let r = common::random_vec(&mut rng, space.n_p());
            let x = common::combined(&vec![0.0; space.n_u()], &r);
            let (_, _, oracle) = common::energy_terms(&space, &vec![0.0; space.n_u()], &r);
            prop_assert!(common::relative_gap(sh.bilinear(&x, &x), oracle) <= 1e-12);
        }
    }

    /// `B_h(w, r; w, -r) >= (1 - alpha / C_I) ||D w||^2 + alpha sum h^2 ||grad r||^2`.
    #[test]
    fn stabilized_form_is_coercive(seed in any::<u64>(), n in 1usize..4, p2 in any::<bool>(), fraction in 0.0f64..0.99) {
        let pair = if p2 { ElementPair::P2P1 } else { ElementPair::P1P1 };
        let space = common::space(&common::square(n), pair);
        let ci = estimate_ci(&space).value();
        let alpha = ci.map_or(fraction, |c| fraction * c);
        let problem = StokesProblem::homogeneous().with_alpha(Alpha::Value(alpha));
        let system = assemble_system(&space, &problem).unwrap();
        let mut rng = common::rng(seed);
        let (w, r) = common::random_pair(&mut rng, &space);
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let lhs = system.matrix.bilinear(&common::combined(&w, &neg), &common::combined(&w, &r));
        let (strain, _, grad_p) = common::energy_terms(&space, &w, &r);
        let factor = ci.map_or(1.0, |c| 1.0 - alpha / c);
        prop_assert!(lhs >= factor * strain + alpha * grad_p - 1e-10, "{lhs} < {}", factor * strain + alpha * grad_p);
    }
}

#[test]
fn assembly_is_affine_in_alpha() {
    for pair in common::PAIRS {
        let space = common::space(&common::clamped_left(3), pair);
        let base = estimate_ci(&space).value().map_or(0.1, |c| 0.2 * c);
        let problem = |a: f64| StokesProblem::homogeneous().with_alpha(Alpha::Value(a));
        let m1 = assemble_system(&space, &problem(base)).unwrap().matrix;
        let m2 = assemble_system(&space, &problem(2.0 * base))
            .unwrap()
            .matrix;
        let extrapolated = m1.add_scaled(1.0, &m1).add_scaled(-1.0, &m2);
        let b = assemble_b(&space);
        let diff = extrapolated.add_scaled(-1.0, &b);
        assert!(
            diff.max_abs() <= 1e-13 * b.max_abs(),
            "{pair}: {}",
            diff.max_abs()
        );
        let zero = assemble_system(&space, &problem(0.0)).unwrap().matrix;
        assert_eq!(zero.add_scaled(-1.0, &b).max_abs(), 0.0);
    }
}

#[test]
fn right_hand_side_is_affine_in_alpha() {
    let exact = PolynomialSolution::vanishing_on_left(
        [[1.0, -0.5, 0.25], [0.5, 1.0, -1.0]],
        [0.3, -1.0, 2.0],
    );
    for pair in common::PAIRS {
        let space = common::space(&common::clamped_left(2), pair);
        let alpha = estimate_ci(&space).value().map_or(0.1, |c| 0.2 * c);
        let problem = StokesProblem::from_exact(Arc::new(exact)).with_alpha(Alpha::Value(alpha));
        let rhs = assemble_system(&space, &problem).unwrap().rhs;
        let f = assemble_f(&space, &problem);
        let l = assemble_lh(&space, &problem);
        for i in 0..rhs.len() {
            assert!((rhs[i] - (f[i] - alpha * l[i])).abs() <= 1e-14 * (1.0 + f[i].abs()));
        }
    }
}
