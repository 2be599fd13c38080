use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::forms::{ExactSolution, StokesProblem};
use crate::mesh::{BoundarySpec, Domain, Point, Side};

/// `a(s) = s^2 (1 - s)^2` and its first three derivatives.
fn quartic(s: f64) -> [f64; 4] {
    [
        s * s * (1.0 - s) * (1.0 - s),
        2.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
        2.0 - 12.0 * s + 12.0 * s * s,
        -12.0 + 24.0 * s,
    ]
}

/// `u = curl(a(x) a(y))`, `p = x^3 + y^3 - 1/2` on the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothSquare;

impl ExactSolution for SmoothSquare {
    fn velocity(&self, x: Point) -> [f64; 2] {
        let (a, b) = (quartic(x[0]), quartic(x[1]));
        [a[0] * b[1], -a[1] * b[0]]
    }

    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
        let (a, b) = (quartic(x[0]), quartic(x[1]));
        [[a[1] * b[1], a[0] * b[2]], [-a[2] * b[0], -a[1] * b[1]]]
    }

    fn velocity_hessian(&self, x: Point) -> [[[f64; 2]; 2]; 2] {
        let (a, b) = (quartic(x[0]), quartic(x[1]));
        let u0 = [[a[2] * b[1], a[1] * b[2]], [a[1] * b[2], a[0] * b[3]]];
        let u1 = [[-a[3] * b[0], -a[2] * b[1]], [-a[2] * b[1], -a[1] * b[2]]];
        [u0, u1]
    }

    fn pressure(&self, x: Point) -> f64 {
        x[0].powi(3) + x[1].powi(3) - 0.5
    }

    fn pressure_gradient(&self, x: Point) -> [f64; 2] {
        [3.0 * x[0] * x[0], 3.0 * x[1] * x[1]]
    }
}

/// `u = (x, y) sin(pi x) sin(pi y)`, `p = cos(pi x) cos(pi y)`, with
/// `div u != 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonzeroDivergence;

impl NonzeroDivergence {
    /// `phi`, its gradient and Hessian.
    fn phi(x: Point) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        let v = sx * sy;
        let g = [PI * cx * sy, PI * sx * cy];
        let cross = PI * PI * cx * cy;
        (v, g, [[-PI * PI * v, cross], [cross, -PI * PI * v]])
    }
}

impl ExactSolution for NonzeroDivergence {
    fn velocity(&self, x: Point) -> [f64; 2] {
        let (v, _, _) = Self::phi(x);
        [x[0] * v, x[1] * v]
    }

    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
        let (v, g, _) = Self::phi(x);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = if i == j { v } else { 0.0 } + x[i] * g[j];
            }
        }
        out
    }

    fn velocity_hessian(&self, x: Point) -> [[[f64; 2]; 2]; 2] {
        let (_, g, h) = Self::phi(x);
        let mut out = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let dj = if i == j { g[k] } else { 0.0 };
                    let dk = if i == k { g[j] } else { 0.0 };
                    out[i][j][k] = dj + dk + x[i] * h[j][k];
                }
            }
        }
        out
    }

    fn pressure(&self, x: Point) -> f64 {
        (PI * x[0]).cos() * (PI * x[1]).cos()
    }

    fn pressure_gradient(&self, x: Point) -> [f64; 2] {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        [-PI * sx * cy, -PI * cx * sy]
    }
}

/// Velocity components and pressure of total degree at most two, stored as
/// coefficients of `[1, x, y, x^2, xy, y^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialSolution {
    pub velocity: [[f64; 6]; 2],
    pub pressure: [f64; 6],
}

impl PolynomialSolution {
    /// `u_i = x (a_i + b_i x + c_i y)`, `p = p_0 + p_1 x + p_2 y`: zero on
    /// the left side `x = 0`.
    pub fn vanishing_on_left(u: [[f64; 3]; 2], p: [f64; 3]) -> Self {
        let comp = |c: [f64; 3]| [0.0, c[0], 0.0, c[1], c[2], 0.0];
        PolynomialSolution {
            velocity: [comp(u[0]), comp(u[1])],
            pressure: [p[0], p[1], p[2], 0.0, 0.0, 0.0],
        }
    }

    /// Linear velocity `u_i = a_i x` vanishing on the left side.
    pub fn linear_vanishing_on_left(a: [f64; 2], p: [f64; 3]) -> Self {
        Self::vanishing_on_left([[a[0], 0.0, 0.0], [a[1], 0.0, 0.0]], p)
    }

    fn eval(c: &[f64; 6], x: Point) -> f64 {
        c[0] + c[1] * x[0]
            + c[2] * x[1]
            + c[3] * x[0] * x[0]
            + c[4] * x[0] * x[1]
            + c[5] * x[1] * x[1]
    }

    fn grad(c: &[f64; 6], x: Point) -> [f64; 2] {
        [
            c[1] + 2.0 * c[3] * x[0] + c[4] * x[1],
            c[2] + c[4] * x[0] + 2.0 * c[5] * x[1],
        ]
    }

    fn hess(c: &[f64; 6]) -> [[f64; 2]; 2] {
        [[2.0 * c[3], c[4]], [c[4], 2.0 * c[5]]]
    }
}

impl ExactSolution for PolynomialSolution {
    fn velocity(&self, x: Point) -> [f64; 2] {
        [
            Self::eval(&self.velocity[0], x),
            Self::eval(&self.velocity[1], x),
        ]
    }

    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
        [
            Self::grad(&self.velocity[0], x),
            Self::grad(&self.velocity[1], x),
        ]
    }

    fn velocity_hessian(&self, _: Point) -> [[[f64; 2]; 2]; 2] {
        [Self::hess(&self.velocity[0]), Self::hess(&self.velocity[1])]
    }

    fn pressure(&self, x: Point) -> f64 {
        Self::eval(&self.pressure, x)
    }

    fn pressure_gradient(&self, x: Point) -> [f64; 2] {
        Self::grad(&self.pressure, x)
    }
}

/// Center of the body-force bump of the L-shape case.
pub const PEAK_CENTER: Point = [-0.05, -0.05];
pub const PEAK_WIDTH: f64 = 0.05;
pub const PEAK_AMPLITUDE: f64 = 100.0;

/// Swirling Gaussian force centered at [`PEAK_CENTER`].
pub fn peak_force(x: Point) -> [f64; 2] {
    let d = [x[0] - PEAK_CENTER[0], x[1] - PEAK_CENTER[1]];
    let r2 = d[0] * d[0] + d[1] * d[1];
    let s = PEAK_AMPLITUDE * (-r2 / (PEAK_WIDTH * PEAK_WIDTH)).exp() / PEAK_WIDTH;
    [-s * d[1], s * d[0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Smooth,
    /// Reentrant corner; the solution is not in H^2.
    Limited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    SmoothSquare,
    NeumannStrip,
    NonzeroG,
    LShapePeak,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::SmoothSquare,
        CaseId::NeumannStrip,
        CaseId::NonzeroG,
        CaseId::LShapePeak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::SmoothSquare => "SMOOTH_SQUARE",
            CaseId::NeumannStrip => "NEUMANN_STRIP",
            CaseId::NonzeroG => "NONZERO_G",
            CaseId::LShapePeak => "LSHAPE_PEAK",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = CaseId::ALL.iter().map(|c| c.name()).collect();
                format!("unknown case `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub domain: Domain,
    pub boundary: BoundarySpec,
    pub exact: Option<Arc<dyn ExactSolution>>,
    pub regularity: Regularity,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("boundary", &self.boundary)
            .field("regularity", &self.regularity)
            .finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    pub fn new(id: CaseId) -> Self {
        let (domain, boundary, exact, regularity): (_, _, Option<Arc<dyn ExactSolution>>, _) =
            match id {
                CaseId::SmoothSquare => (
                    Domain::UnitSquare,
                    BoundarySpec::all_dirichlet(),
                    Some(Arc::new(SmoothSquare)),
                    Regularity::Smooth,
                ),
                CaseId::NeumannStrip => (
                    Domain::UnitSquare,
                    BoundarySpec::with_neumann(&[Side::Right]),
                    Some(Arc::new(SmoothSquare)),
                    Regularity::Smooth,
                ),
                CaseId::NonzeroG => (
                    Domain::UnitSquare,
                    BoundarySpec::all_dirichlet(),
                    Some(Arc::new(NonzeroDivergence)),
                    Regularity::Smooth,
                ),
                CaseId::LShapePeak => (
                    Domain::LShape,
                    BoundarySpec::all_dirichlet(),
                    None,
                    Regularity::Limited,
                ),
            };
        ManufacturedCase {
            id,
            domain,
            boundary,
            exact,
            regularity,
        }
    }

    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    /// Data `(f, g, t)`; derived from the closed form when there is one.
    pub fn problem(&self) -> StokesProblem {
        match &self.exact {
            Some(exact) => StokesProblem::from_exact(exact.clone()),
            None => StokesProblem::new(
                Arc::new(peak_force),
                Arc::new(|_| 0.0),
                Arc::new(|_, _| [0.0, 0.0]),
            ),
        }
    }
}

pub fn builtin_cases() -> Vec<ManufacturedCase> {
    CaseId::ALL.into_iter().map(ManufacturedCase::new).collect()
}
