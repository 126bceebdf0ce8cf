use super::FLUX_SLACK;
use crate::elliptic::SolveReport;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, ScalarField};
use serde::Serialize;

/// Degree-two rule on a triangle: edge midpoints, equal weights.
fn triangle_integral(a: Point, b: Point, c: Point, f: &dyn Fn(Point) -> f64) -> f64 {
    let area = 0.5 * (b - a).cross(c - a).abs();
    area * (f((a + b) * 0.5) + f((b + c) * 0.5) + f((c + a) * 0.5)) / 3.0
}

fn fan_integral(poly: &[Point], f: &dyn Fn(Point) -> f64) -> f64 {
    (1..poly.len().saturating_sub(1)).map(|i| triangle_integral(poly[0], poly[i], poly[i + 1], f)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxReport {
    /// `∮ (Du · ν) / √W ds` over the level curve `d = η`.
    pub boundary_flux: f64,
    /// `∫ 1/√W dA` over `{d > η}`.
    pub area_integral: f64,
    pub mismatch: f64,
    pub eta: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Compares both sides of the flux identity for the report's solution.
pub fn check_flux_identity(report: &SolveReport, dom: &Domain) -> Result<FluxReport> {
    if report.solution.grid().domain() != dom {
        return Err(Error::GridMismatch);
    }
    Ok(flux_identity(&report.solution))
}

/// Flux identity on the inner level curve `d = 2h`.
///
/// Gradients come from the node stencils and are interpolated bilinearly.
pub fn flux_identity(u: &ScalarField) -> FluxReport {
    let g = u.grid();
    let dom = g.domain();
    let h = g.h();
    let eta = 2.0 * h;
    let (nx, ny) = g.dims();
    let d: Vec<f64> = (0..g.num_nodes()).map(|n| dom.signed_distance(g.node_point(n)) - eta).collect();
    let grad: Vec<Option<Point>> = (0..g.num_nodes()).map(|n| g.unknown_of(n).map(|k| u.gradient(k))).collect();
    let integrand = |q: Point| 1.0 / (1.0 + q.dot(q)).sqrt();

    let mut flux = 0.0;
    let mut area = 0.0;
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let ids = [j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i];
            let fv = ids.map(|n| d[n]);
            let o = g.node_point(ids[0]);
            let corner_grads: Option<Vec<Point>> = ids.iter().map(|&n| grad[n]).collect();
            let Some(cg) = corner_grads else { continue };
            let interp = |p: Point| -> Point {
                let (s, t) = ((p.x - o.x) / h, (p.y - o.y) / h);
                cg[0] * ((1.0 - s) * (1.0 - t)) + cg[1] * (s * (1.0 - t)) + cg[2] * (s * t) + cg[3] * ((1.0 - s) * t)
            };
            let corners = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
            let mut cuts = Vec::new();
            for e in 0..4 {
                let (a, b) = (fv[e], fv[(e + 1) % 4]);
                if (a > 0.0) != (b > 0.0) {
                    let s = a / (a - b);
                    let p = corners[e] + (corners[(e + 1) % 4] - corners[e]) * s;
                    cuts.push(o + p * h);
                }
            }
            let segs: Vec<(Point, Point)> = match cuts.len() {
                2 => vec![(cuts[0], cuts[1])],
                4 => {
                    let centre = fv.iter().sum::<f64>() / 4.0;
                    if (centre > 0.0) == (fv[0] > 0.0) {
                        vec![(cuts[0], cuts[1]), (cuts[2], cuts[3])]
                    } else {
                        vec![(cuts[3], cuts[0]), (cuts[1], cuts[2])]
                    }
                }
                _ => Vec::new(),
            };
            for (p, q) in segs {
                let len = p.dist(q);
                if len == 0.0 {
                    continue;
                }
                let m = (p + q) * 0.5;
                let (s, t) = ((m.x - o.x) / h, (m.y - o.y) / h);
                let gx = (1.0 - t) * (fv[1] - fv[0]) + t * (fv[2] - fv[3]);
                let gy = (1.0 - s) * (fv[3] - fv[0]) + s * (fv[2] - fv[1]);
                let mut nrm = (q - p).perp() * (1.0 / len);
                if nrm.dot(Point::new(gx, gy)) > 0.0 {
                    nrm = nrm * -1.0;
                }
                let du = interp(m);
                flux += du.dot(nrm) * integrand(du) * len;
            }
            // The part of the cell where the interpolated `d - η` is positive,
            // bounded by the same segments as the flux.
            let f = |q: Point| integrand(interp(q));
            let centre = fv.iter().sum::<f64>() / 4.0;
            if cuts.len() == 4 && centre <= 0.0 {
                for e in (0..4).filter(|&e| fv[e] > 0.0) {
                    area += triangle_integral(cuts[(e + 3) % 4], o + corners[e] * h, cuts[e], &f);
                }
            } else {
                let mut poly = Vec::with_capacity(8);
                let mut next_cut = cuts.iter();
                for e in 0..4 {
                    if fv[e] > 0.0 {
                        poly.push(o + corners[e] * h);
                    }
                    if (fv[e] > 0.0) != (fv[(e + 1) % 4] > 0.0) {
                        poly.push(*next_cut.next().unwrap());
                    }
                }
                area += fan_integral(&poly, &f);
            }
        }
    }
    let mismatch = (flux - area).abs() / area.abs().max(f64::MIN_POSITIVE);
    let slack = FLUX_SLACK * h;
    FluxReport { boundary_flux: flux, area_integral: area, mismatch, eta, slack, pass: mismatch < slack }
}
