//! Quadrature on the reference triangle `{x, y >= 0, x + y <= 1}` and on
//! the unit interval.

use crate::mesh::Point;

use super::FormsError;

pub const MAX_TRIANGLE_DEGREE: usize = 10;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A rule exact for polynomials of total degree `degree`, with positive
/// weights summing to 1/2.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule, FormsError> {
    match degree {
        1 => Ok(QuadratureRule {
            degree,
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
        }),
        2 => Ok(QuadratureRule {
            degree,
            points: vec![
                [1.0 / 6.0, 1.0 / 6.0],
                [2.0 / 3.0, 1.0 / 6.0],
                [1.0 / 6.0, 2.0 / 3.0],
            ],
            weights: vec![1.0 / 6.0; 3],
        }),
        3..=MAX_TRIANGLE_DEGREE => Ok(collapsed_gauss(degree)),
        _ => Err(FormsError::QuadratureDegree(degree)),
    }
}

/// Tensor Gauss rule mapped through the Duffy collapse
/// `(s, r) -> (s, r (1 - s))`, whose Jacobian `1 - s` adds one degree in `s`,
/// so `n` points must integrate degree `degree + 1` exactly.
fn collapsed_gauss(degree: usize) -> QuadratureRule {
    let n = (degree + 3) / 2;
    let (nodes, weights) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut w = Vec::with_capacity(n * n);
    for (&s, &ws) in nodes.iter().zip(&weights) {
        for (&r, &wr) in nodes.iter().zip(&weights) {
            points.push([s, r * (1.0 - s)]);
            w.push(ws * wr * (1.0 - s));
        }
    }
    QuadratureRule {
        degree,
        points,
        weights: w,
    }
}

/// `n`-point Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss rule on `[0, 1]` exact for polynomials of degree `degree`.
pub fn interval_rule(degree: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre(degree / 2 + 1)
}
