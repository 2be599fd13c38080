use std::fmt;
use std::sync::Arc;

use crate::mesh::Point;
use crate::space::ElementPair;

pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// Traction as a function of position and outward unit normal.
pub type TractionField = Arc<dyn Fn(Point, [f64; 2]) -> [f64; 2] + Send + Sync>;

/// A closed-form velocity/pressure pair with derivatives.
///
/// `velocity_gradient(x)[i][j] = d_j u_i`,
/// `velocity_hessian(x)[i][j][k] = d_j d_k u_i`.
pub trait ExactSolution: Send + Sync {
    fn velocity(&self, x: Point) -> [f64; 2];
    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2];
    fn velocity_hessian(&self, x: Point) -> [[[f64; 2]; 2]; 2];
    fn pressure(&self, x: Point) -> f64;
    fn pressure_gradient(&self, x: Point) -> [f64; 2];

    /// `A u = div D(u) = (lap u + grad div u) / 2`.
    fn strain_divergence(&self, x: Point) -> [f64; 2] {
        strain_divergence(self.velocity_hessian(x))
    }

    /// `f = -A u + grad p`.
    fn body_force(&self, x: Point) -> [f64; 2] {
        let a = self.strain_divergence(x);
        let gp = self.pressure_gradient(x);
        [-a[0] + gp[0], -a[1] + gp[1]]
    }

    fn divergence(&self, x: Point) -> f64 {
        let g = self.velocity_gradient(x);
        g[0][0] + g[1][1]
    }

    /// `(D(u) - p I) n`.
    fn traction(&self, x: Point, n: [f64; 2]) -> [f64; 2] {
        stress_times_normal(self.velocity_gradient(x), self.pressure(x), n)
    }
}

/// `A u` from the Hessian `h[i][j][k] = d_j d_k u_i`.
pub fn strain_divergence(h: [[[f64; 2]; 2]; 2]) -> [f64; 2] {
    let lap = [h[0][0][0] + h[0][1][1], h[1][0][0] + h[1][1][1]];
    let grad_div = [h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
    [0.5 * (lap[0] + grad_div[0]), 0.5 * (lap[1] + grad_div[1])]
}

/// `(D(u) - p I) n` for a velocity gradient `g[i][j] = d_j u_i`.
pub fn stress_times_normal(g: [[f64; 2]; 2], p: f64, n: [f64; 2]) -> [f64; 2] {
    let d01 = 0.5 * (g[0][1] + g[1][0]);
    [
        (g[0][0] - p) * n[0] + d01 * n[1],
        d01 * n[0] + (g[1][1] - p) * n[1],
    ]
}

/// Stabilization parameter: a fixed value or the per-pair default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Auto,
    Value(f64),
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Auto => f.write_str("auto"),
            Alpha::Value(v) => write!(f, "{v}"),
        }
    }
}

impl std::str::FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Alpha::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Alpha::Value(v)),
            _ => Err(format!(
                "alpha must be `auto` or a nonnegative number, got `{s}`"
            )),
        }
    }
}

/// Quadrature degrees used for each family of integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// B and S_h (exact for the polynomial integrands).
    pub bilinear: usize,
    /// (f, v), L_h and the Neumann traction integral.
    pub load: usize,
    /// (g, q).
    pub divergence: usize,
    /// Element residuals of the estimator.
    pub estimator: usize,
    /// Edge residuals of the estimator.
    pub estimator_edge: usize,
    /// Error norms against closed-form solutions.
    pub error: usize,
}

impl QuadratureConfig {
    pub fn for_pair(pair: ElementPair) -> Self {
        let k = pair.velocity_degree();
        QuadratureConfig {
            bilinear: 2 * k,
            load: 2 * k + 2,
            divergence: 2 * pair.pressure_degree(),
            estimator: 2 * k + 2,
            estimator_edge: 2 * k,
            error: 2 * k + 4,
        }
    }
}

/// Data `(f, g, t)` of the Stokes problem, normalized to `2 mu = 1`.
#[derive(Clone)]
pub struct StokesProblem {
    pub body_force: VectorField,
    pub divergence: ScalarField,
    pub traction: TractionField,
    pub alpha: Alpha,
    pub exact: Option<Arc<dyn ExactSolution>>,
    /// Overrides [`QuadratureConfig::for_pair`] when set.
    pub quadrature: Option<QuadratureConfig>,
}

impl fmt::Debug for StokesProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StokesProblem")
            .field("alpha", &self.alpha)
            .field("exact", &self.exact.is_some())
            .field("quadrature", &self.quadrature)
            .finish_non_exhaustive()
    }
}

impl StokesProblem {
    pub fn new(body_force: VectorField, divergence: ScalarField, traction: TractionField) -> Self {
        StokesProblem {
            body_force,
            divergence,
            traction,
            alpha: Alpha::Auto,
            exact: None,
            quadrature: None,
        }
    }

    /// Problem with all data set to zero.
    pub fn homogeneous() -> Self {
        Self::new(
            Arc::new(|_| [0.0, 0.0]),
            Arc::new(|_| 0.0),
            Arc::new(|_, _| [0.0, 0.0]),
        )
    }

    /// Derives `f`, `g` and `t` from a closed-form solution.
    pub fn from_exact(exact: Arc<dyn ExactSolution>) -> Self {
        let (a, b, c) = (exact.clone(), exact.clone(), exact.clone());
        StokesProblem {
            body_force: Arc::new(move |x| a.body_force(x)),
            divergence: Arc::new(move |x| b.divergence(x)),
            traction: Arc::new(move |x, n| c.traction(x, n)),
            alpha: Alpha::Auto,
            exact: Some(exact),
            quadrature: None,
        }
    }

    pub fn with_alpha(mut self, alpha: Alpha) -> Self {
        self.alpha = alpha;
        self
    }

    /// Multiplies all data by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let (f, g, t) = (
            self.body_force.clone(),
            self.divergence.clone(),
            self.traction.clone(),
        );
        StokesProblem {
            body_force: Arc::new(move |x| {
                let v = f(x);
                [s * v[0], s * v[1]]
            }),
            divergence: Arc::new(move |x| s * g(x)),
            traction: Arc::new(move |x, n| {
                let v = t(x, n);
                [s * v[0], s * v[1]]
            }),
            alpha: self.alpha,
            exact: None,
            quadrature: self.quadrature,
        }
    }

    pub fn quadrature_for(&self, pair: ElementPair) -> QuadratureConfig {
        self.quadrature
            .unwrap_or_else(|| QuadratureConfig::for_pair(pair))
    }
}
