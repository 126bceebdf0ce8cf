//! Exact translators: tilted grim reapers and the strip solution.
//!
//! The vertical planes `θ = ±π/2` are the degenerate limit of the grim
//! reaper family; they are not graphs and are not represented.

use crate::error::{Error, Result};
use crate::geometry::Point;
use std::f64::consts::FRAC_PI_2;

/// Guard distance from the edge of a reaper's strip.
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Residual of `div(Du/√W) = 1/√W` with `W = 1 + |Du|²` from exact derivatives.
///
/// `hess` is `[u_xx, u_xy, u_yy]`.
pub fn divergence_residual(grad: Point, hess: [f64; 3]) -> f64 {
    let (p, q) = (grad.x, grad.y);
    let w = 1.0 + p * p + q * q;
    let a = (1.0 + q * q) * hess[0] - 2.0 * p * q * hess[1] + (1.0 + p * p) * hess[2];
    a / (w * w.sqrt()) - 1.0 / w.sqrt()
}

/// The reaper `w(x, y) = -log(cos(cos θ · y)) / cos²θ + tan θ · x + a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrimReaper {
    theta: f64,
    a: f64,
}

impl GrimReaper {
    pub fn new(theta: f64, a: f64) -> Result<GrimReaper> {
        if !(theta.abs() < FRAC_PI_2) || !a.is_finite() {
            return Err(Error::BadParameter(format!("tilt must lie in (-pi/2, pi/2), got {theta}")));
        }
        Ok(GrimReaper { theta, a })
    }

    /// The reaper with slope `tan θ = slope` whose value on `|y| = m` touches
    /// the line through `(x0, f0)` with that slope.
    pub fn tangent(x0: f64, f0: f64, slope: f64, m: f64) -> Result<GrimReaper> {
        let theta = slope.atan();
        let c = theta.cos();
        if m >= FRAC_PI_2 / c {
            return Err(Error::BadParameter(format!("half-width {m} exceeds the reaper strip")));
        }
        GrimReaper::new(theta, f0 - slope * x0 + (c * m).cos().ln() / (c * c))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn offset(&self) -> f64 {
        self.a
    }

    /// Half-width `π / (2 cos θ)` of the maximal strip.
    pub fn half_width(&self) -> f64 {
        FRAC_PI_2 / self.theta.cos()
    }

    fn check(&self, p: Point) -> Result<()> {
        let limit = self.half_width();
        if p.y.abs() >= limit - EDGE_TOLERANCE || !p.x.is_finite() {
            return Err(Error::OutOfDomain { x: p.x, y: p.y, limit });
        }
        Ok(())
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        self.check(p)?;
        let c = self.theta.cos();
        Ok(-(c * p.y).cos().ln() / (c * c) + self.theta.tan() * p.x + self.a)
    }

    pub fn gradient(&self, p: Point) -> Result<Point> {
        self.check(p)?;
        let c = self.theta.cos();
        Ok(Point::new(self.theta.tan(), (c * p.y).tan() / c))
    }

    /// `[w_xx, w_xy, w_yy]`.
    pub fn hessian(&self, p: Point) -> Result<[f64; 3]> {
        self.check(p)?;
        let cy = (self.theta.cos() * p.y).cos();
        Ok([0.0, 0.0, 1.0 / (cy * cy)])
    }

    pub fn residual(&self, p: Point) -> Result<f64> {
        Ok(divergence_residual(self.gradient(p)?, self.hessian(p)?))
    }
}

/// `(x, y) ↦ -log cos y + log cos m + c` on the strip `|y| < m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSolution {
    m: f64,
    c: f64,
}

impl StripSolution {
    pub fn new(m: f64, c: f64) -> Result<StripSolution> {
        if !(m > 0.0 && m < FRAC_PI_2) {
            return Err(Error::BadParameter(format!("strip half-width must lie in (0, pi/2), got {m}")));
        }
        Ok(StripSolution { m, c })
    }

    pub fn half_width(&self) -> f64 {
        self.m
    }

    pub fn eval(&self, p: Point) -> f64 {
        -p.y.cos().ln() + self.m.cos().ln() + self.c
    }

    pub fn gradient(&self, p: Point) -> Point {
        Point::new(0.0, p.y.tan())
    }

    pub fn hessian(&self, p: Point) -> [f64; 3] {
        let c = p.y.cos();
        [0.0, 0.0, 1.0 / (c * c)]
    }
}

/// Evaluator of the strip solution with boundary constant `c`.
pub fn strip_exact_solution(m: f64, c: f64) -> Result<StripSolution> {
    StripSolution::new(m, c)
}
