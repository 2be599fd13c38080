//! Quadrature, problem data, the stabilized forms and their assembly.

mod assembly;
mod inverse;
mod problem;
pub mod quadrature;

pub(crate) use assembly::edge_reference_points;
pub use assembly::{
    assemble_b, assemble_f, assemble_lh, assemble_sh, assemble_system, pressure_mass,
    pressure_means, resolve_alpha, AssembledSystem, DEFAULT_ALPHA_CI_FRACTION, DEFAULT_ALPHA_P1,
};
pub(crate) use inverse::generalized_eigenvalues;
pub use inverse::{estimate_ci, local_ratio, CiEstimate, LocalPencil};
pub use problem::{
    strain_divergence, stress_times_normal, Alpha, ExactSolution, QuadratureConfig, ScalarField,
    StokesProblem, TractionField, VectorField,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FormsError {
    #[error("no triangle quadrature of degree {0} (supported: 1..=10)")]
    QuadratureDegree(usize),
    #[error("alpha = {alpha} violates 0 <= alpha < C_I = {ci}")]
    InadmissibleAlpha { alpha: f64, ci: f64 },
    #[error("alpha must be a finite nonnegative number, got {0}")]
    InvalidAlpha(f64),
}
