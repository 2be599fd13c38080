use proptest::prelude::*;
use stokes_stab::space::{reference_basis, ElementPair, FeSpace};

mod common;

fn reference_point() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b)| {
        if a + b <= 1.0 {
            [a, b]
        } else {
            [1.0 - a, 1.0 - b]
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn partition_of_unity(xi in reference_point()) {
        for degree in [1, 2] {
            let (v, g, h) = reference_basis(degree, xi);
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for d in 0..2 {
                prop_assert!(g.iter().map(|g| g[d]).sum::<f64>().abs() <= 1e-12);
                for e in 0..2 {
                    prop_assert!(h.iter().map(|h| h[d][e]).sum::<f64>().abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn hessians_match_gradient_differences(xi in reference_point()) {
        let step = 1e-5;
        for degree in [1, 2] {
            let (_, _, h) = reference_basis(degree, xi);
            for d in 0..2 {
                let mut plus = xi;
                let mut minus = xi;
                plus[d] += step;
                minus[d] -= step;
                let (_, gp, _) = reference_basis(degree, plus);
                let (_, gm, _) = reference_basis(degree, minus);
                for i in 0..h.len() {
                    for c in 0..2 {
                        let fd = (gp[i][c] - gm[i][c]) / (2.0 * step);
                        prop_assert!((fd - h[i][c][d]).abs() <= 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn gradients_match_value_differences(xi in reference_point()) {
        let step = 1e-6;
        for degree in [1, 2] {
            let (_, g, _) = reference_basis(degree, xi);
            for d in 0..2 {
                let mut plus = xi;
                let mut minus = xi;
                plus[d] += step;
                minus[d] -= step;
                let (vp, _, _) = reference_basis(degree, plus);
                let (vm, _, _) = reference_basis(degree, minus);
                for i in 0..g.len() {
                    prop_assert!(((vp[i] - vm[i]) / (2.0 * step) - g[i][d]).abs() <= 1e-8);
                }
            }
        }
    }
}

/// Reference coordinates of `x` in element `t`.
fn to_reference(space: &FeSpace, t: usize, x: [f64; 2]) -> [f64; 2] {
    let mesh = space.mesh();
    let [a, b, c] = mesh.corners(t);
    let j = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let r = [x[0] - a[0], x[1] - a[1]];
    [
        (j[1][1] * r[0] - j[0][1] * r[1]) / det,
        (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
    ]
}

#[test]
fn discrete_fields_are_continuous_across_edges() {
    let mut rng = common::rng(7);
    let mesh = common::square(3);
    let refined =
        std::sync::Arc::new(stokes_stab::mesh::refine_marked(&mesh, &[0, 5, 11]).unwrap());
    for mesh in [mesh, refined] {
        for pair in common::PAIRS {
            let space = FeSpace::new(mesh.clone(), pair);
            for _ in 0..100 {
                let u = common::random_vec(&mut rng, space.n_u());
                let p = common::random_vec(&mut rng, space.n_p());
                for edge in mesh.edges().iter().filter(|e| !e.is_boundary()) {
                    let [a, b] = edge.vertices.map(|v| mesh.vertex(v));
                    for s in [0.2113, 0.5, 0.7887] {
                        let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                        let values: Vec<([f64; 2], f64)> = edge
                            .triangles
                            .iter()
                            .map(|&t| {
                                let basis = space.eval_basis(t, &[to_reference(&space, t, x)]);
                                (
                                    space.velocity_at(&u, t, &basis.velocity, 0).value,
                                    space.pressure_at(&p, t, &basis.pressure, 0).value,
                                )
                            })
                            .collect();
                        for c in 0..2 {
                            assert!((values[0].0[c] - values[1].0[c]).abs() <= 1e-12);
                        }
                        assert!((values[0].1 - values[1].1).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn quadratics_are_reproduced_by_p2_interpolation() {
    let mesh = common::square(2);
    let space = FeSpace::new(mesh, ElementPair::P2P1);
    let f = |x: [f64; 2]| {
        [
            1.0 + x[0] - 2.0 * x[1] * x[1],
            x[0] * x[1] - 0.5 * x[0] * x[0],
        ]
    };
    let (u, _) = stokes_stab::space::interpolate(&space, f, |_| 0.0);
    let pts = [[0.1, 0.2], [0.3, 0.3], [0.6, 0.1]];
    for t in 0..space.mesh().n_triangles() {
        let basis = space.eval_basis(t, &pts);
        let origin = space.mesh().vertex(space.mesh().triangle(t)[0]);
        for (q, &xi) in pts.iter().enumerate() {
            let x = basis.geometry.map(origin, xi);
            let v = space.velocity_at(&u, t, &basis.velocity, q).value;
            let e = f(x);
            assert!((v[0] - e[0]).abs() < 1e-13 && (v[1] - e[1]).abs() < 1e-13);
        }
    }
}
