//! Stabilized mixed finite elements for the two-dimensional Stokes problem.
//!
//! Equal-order (`P1P1`) and Taylor–Hood (`P2P1`) pairs are stabilized by
//! subtracting `alpha` times an element-residual least-squares term from the
//! saddle-point form. The crate provides triangular meshes with
//! newest-vertex bisection, assembly, a sparse direct solver, a residual
//! a posteriori estimator with data oscillation, adaptive refinement and a
//! manufactured-solution harness. The `stokes-stab` binary drives studies
//! from the command line.
//!
//! ```
//! use std::sync::Arc;
//! use stokes_stab::mesh::{generate_structured, BoundarySpec, Domain};
//! use stokes_stab::space::{ElementPair, FeSpace};
//! use stokes_stab::solver::solve_problem;
//! use stokes_stab::study::{CaseId, ManufacturedCase};
//!
//! let case = ManufacturedCase::new(CaseId::SmoothSquare);
//! let mesh = generate_structured(Domain::UnitSquare, 4, BoundarySpec::all_dirichlet()).unwrap();
//! let space = FeSpace::new(Arc::new(mesh), ElementPair::P2P1);
//! let solution = solve_problem(&space, &case.problem()).unwrap();
//! assert_eq!(solution.pressure.len(), 25);
//! ```

pub mod cli;
pub mod estimator;
pub mod forms;
pub mod mesh;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod study;
