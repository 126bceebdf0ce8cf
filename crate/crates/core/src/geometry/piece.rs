use super::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One smooth piece of a counter-clockwise oriented boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Segment { a: Point, b: Point, artificial: bool },
    /// Arc of `center + radius (cos s, sin s)` for `s` from `start` to `start + sweep`, `sweep > 0`.
    Arc { center: Point, radius: f64, start: f64, sweep: f64 },
}

/// A boundary point with its local geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub point: Point,
    /// Unit inward normal.
    pub normal: Point,
    pub kappa: f64,
    pub artificial: bool,
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b, .. } => a.dist(b),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    pub fn is_artificial(&self) -> bool {
        matches!(self, Piece::Segment { artificial: true, .. })
    }

    /// Inward curvature (positive for convex arcs).
    pub fn kappa(&self) -> f64 {
        match *self {
            Piece::Segment { .. } => 0.0,
            Piece::Arc { radius, .. } => 1.0 / radius,
        }
    }

    /// Point and unit tangent at fractional position `s` in [0, 1].
    pub fn eval(&self, s: f64) -> (Point, Point) {
        match *self {
            Piece::Segment { a, b, .. } => {
                let d = b - a;
                (a + d * s, d * (1.0 / d.norm()))
            }
            Piece::Arc { center, radius, start, sweep } => {
                let ang = start + sweep * s;
                let (sn, cs) = ang.sin_cos();
                (center + Point::new(cs, sn) * radius, Point::new(-sn, cs))
            }
        }
    }

    /// Nearest point on the piece to `p`.
    pub fn nearest(&self, p: Point) -> Point {
        match *self {
            Piece::Segment { a, b, .. } => {
                let d = b - a;
                let s = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
                a + d * s
            }
            Piece::Arc { center, radius, start, sweep } => {
                let v = p - center;
                if v.norm() > 0.0 {
                    let ang = v.y.atan2(v.x);
                    let rel = (ang - start).rem_euclid(2.0 * PI);
                    if rel <= sweep {
                        return center + v * (radius / v.norm());
                    }
                }
                let (a, _) = self.eval(0.0);
                let (b, _) = self.eval(1.0);
                if p.dist(a) <= p.dist(b) {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// Samples with spacing roughly `spacing`, excluding the final endpoint.
    pub(crate) fn samples(&self, spacing: f64) -> Vec<BoundarySample> {
        let k = ((self.length() / spacing).ceil() as usize).max(1);
        (0..k)
            .map(|i| {
                let (point, tangent) = self.eval(i as f64 / k as f64);
                BoundarySample { point, normal: tangent.perp(), kappa: self.kappa(), artificial: self.is_artificial() }
            })
            .collect()
    }
}
