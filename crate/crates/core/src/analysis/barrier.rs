use super::estimates::bowl_height;
use crate::elliptic::{harmonic_extension, newton_solve_from, operator_value, OperatorParams, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::geometry::{Domain, NodeKind, Point, ScalarField};
use serde::Serialize;

/// Added to `2(‖φ‖₀ - C₁)` when choosing `c`.
const C_MARGIN: f64 = 0.1;
const LADDER_TOP: u32 = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BarrierConditions {
    /// Discrete `Q[w] > 0` at every unknown with `d < ε`.
    pub q_positive: bool,
    /// `w <= u` on the inner edge of the tube.
    pub edge_below: bool,
    /// `log(1 + bε) / log(1 + b) >= 1/2`.
    pub ratio: bool,
}

/// The barrier `w = -a log(1 + b d) + φ∘π` on the tube `d < ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub eps: f64,
    pub c1: f64,
    /// `‖φ‖₀` over the boundary data.
    pub phi_norm: f64,
    pub status: BarrierConditions,
    pub min_q: f64,
    /// `min (u - w)` over the inner edge.
    pub edge_gap: f64,
    pub tube_nodes: usize,
    pub edge_nodes: usize,
    /// Gradient bound on the boundary.
    pub c2: f64,
    /// `max |Dw|` on the boundary.
    pub c2_barrier: f64,
    /// `max |Dv⁰|` on the boundary ring.
    pub c2_minimal: f64,
    /// Observed `max |Du|` on the boundary ring of the solve.
    pub observed_boundary_gradient: f64,
    pub grad_phi_norm: f64,
    pub hess_phi_norm: f64,
    pub beta_translator: f64,
    pub beta_weighted: f64,
    /// Analytic lower bound for `Q[w]` at `d = 0` and `d = ε`, translator form.
    pub bound_translator: (f64, f64),
    /// The same with the weighted-curvature constant.
    pub bound_weighted: (f64, f64),
}

impl BarrierSpec {
    pub fn value(&self, dom: &Domain, phi: &dyn Fn(Point) -> f64, p: Point) -> f64 {
        -self.a * (1.0 + self.b * dom.signed_distance(p)).ln() + phi(dom.project(p))
    }

    pub fn certified(&self) -> bool {
        self.status.q_positive && self.status.edge_below && self.status.ratio
    }
}

/// Smallest ladder value `2^k` with `log(1 + bε) >= log(1 + b) / 2`.
pub fn barrier_b_ladder(eps: f64) -> Option<f64> {
    (1..=LADDER_TOP).map(|k| 2f64.powi(k as i32)).find(|&b| (1.0 + b * eps).ln() / (1.0 + b).ln() >= 0.5)
}

fn analytic_bound(a: f64, b: f64, t: f64, beta: f64, dphi: f64, mu: f64) -> f64 {
    let hp = a * b / (1.0 + b * t);
    (1.0 / a - beta) * hp * hp - hp * (2.0 * beta * dphi + mu * dphi * dphi) - beta * (1.0 + dphi * dphi)
}

/// Searches `b` over `2, 4, ..., 2^30` for a barrier certified against the solved field.
pub fn build_barrier(
    report: &SolveReport,
    dom: &Domain,
    phi: &dyn Fn(Point) -> f64,
    eps: f64,
    params: &OperatorParams,
) -> Result<BarrierSpec> {
    let u = &report.solution;
    let g = u.grid().clone();
    if g.domain() != dom {
        return Err(Error::GridMismatch);
    }
    params.validate()?;
    let inradius = (0..g.num_unknowns()).map(|k| g.distance(k)).fold(0.0, f64::max);
    let reach = match dom {
        Domain::Disk { radius, .. } => *radius,
        _ => inradius,
    };
    if !(eps > 0.0 && eps < reach) {
        return Err(Error::BadParameter(format!("eps = {eps} must lie in (0, {reach})")));
    }
    let phi_ext = |p: Point| phi(dom.project(p));
    let phi_norm = u.boundary().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (_, r_enc) = dom.enclosing_disk().ok_or_else(|| Error::BadParameter("unbounded domain".into()))?;
    let min_phi = u.boundary().iter().cloned().fold(f64::INFINITY, f64::min);
    let c1 = min_phi - bowl_height(r_enc)?;
    let c = 2.0 * (phi_norm - c1) + C_MARGIN;

    let n = g.num_unknowns();
    let tube: Vec<usize> = (0..n).filter(|&k| g.distance(k) < eps).collect();
    let in_tube: Vec<bool> = (0..n).map(|k| g.distance(k) < eps).collect();
    let edge: Vec<usize> = (0..n).filter(|&k| !in_tube[k] && g.neighbours(k).any(|j| in_tube[j])).collect();
    if edge.is_empty() {
        return Err(Error::BadParameter(format!("eps = {eps} leaves no inner edge on this grid")));
    }
    let base_phi: Vec<f64> = (0..n).map(|k| phi_ext(g.unknown_point(k))).collect();

    let mut last = String::from("ratio");
    let mut found = None;
    for k in 1..=LADDER_TOP {
        let b = 2f64.powi(k as i32);
        let a = c / (1.0 + b).ln();
        let status_ratio = (1.0 + b * eps).ln() / (1.0 + b).ln() >= 0.5;
        if !status_ratio {
            last = "ratio".into();
            continue;
        }
        let vals: Vec<f64> = (0..n).map(|k| -a * (1.0 + b * g.distance(k)).ln() + base_phi[k]).collect();
        let w = ScalarField::new(g.clone(), vals, u.boundary().to_vec())?;
        let min_q = tube.iter().map(|&k| operator_value(params, &w.derivatives(k))).fold(f64::INFINITY, f64::min);
        if !(min_q > 0.0) {
            last = "q_positive".into();
            continue;
        }
        let edge_gap = edge.iter().map(|&k| u.values()[k] - w.values()[k]).fold(f64::INFINITY, f64::min);
        if edge_gap < 0.0 {
            last = "edge_below".into();
            continue;
        }
        found = Some((a, b, min_q, edge_gap));
        break;
    }
    let (a, b, min_q, edge_gap) = found.ok_or(Error::NoBarrierFound { condition: last })?;

    let spacing = g.h() / 2.0;
    let delta = 1e-6;
    let mut c2_barrier = 0.0f64;
    for s in dom.boundary_samples(spacing) {
        let tau = Point::new(s.normal.y, -s.normal.x);
        let dt = (phi_ext(s.point + tau * delta) - phi_ext(s.point - tau * delta)) / (2.0 * delta);
        c2_barrier = c2_barrier.max((a * b).hypot(dt));
    }
    let mut v0 = harmonic_extension(u)?;
    v0 = newton_solve_from(v0, &OperatorParams::minimal(), &SolveOptions::default())?.solution;
    let ring: Vec<usize> = (0..n).filter(|&k| g.unknown_kind(k) == NodeKind::BoundaryAdjacent).collect();
    let c2_minimal = ring.iter().map(|&k| v0.gradient(k).norm()).fold(0.0, f64::max);
    let observed = ring.iter().map(|&k| u.gradient(k).norm()).fold(0.0, f64::max);

    let fd = 1e-4 * g.h().max(1e-2);
    let (mut dphi, mut d2phi) = (0.0f64, 0.0f64);
    for &k in &tube {
        let p = g.unknown_point(k);
        let f = |dx: f64, dy: f64| phi_ext(p + Point::new(dx, dy));
        let f0 = f(0.0, 0.0);
        let gx = (f(fd, 0.0) - f(-fd, 0.0)) / (2.0 * fd);
        let gy = (f(0.0, fd) - f(0.0, -fd)) / (2.0 * fd);
        let hxx = (f(fd, 0.0) - 2.0 * f0 + f(-fd, 0.0)) / (fd * fd);
        let hyy = (f(0.0, fd) - 2.0 * f0 + f(0.0, -fd)) / (fd * fd);
        let hxy = (f(fd, fd) - f(fd, -fd) - f(-fd, fd) + f(-fd, -fd)) / (4.0 * fd * fd);
        dphi = dphi.max(gx.hypot(gy));
        d2phi = d2phi.max((hxx * hxx + 2.0 * hxy * hxy + hyy * hyy).sqrt());
    }
    let beta_translator = 1.0 + 2f64.sqrt() * d2phi;
    let beta_weighted = params.mu * (1.0 + dphi) + beta_translator;

    Ok(BarrierSpec {
        a,
        b,
        c,
        eps,
        c1,
        phi_norm,
        status: BarrierConditions { q_positive: true, edge_below: true, ratio: true },
        min_q,
        edge_gap,
        tube_nodes: tube.len(),
        edge_nodes: edge.len(),
        c2: c2_barrier.max(c2_minimal),
        c2_barrier,
        c2_minimal,
        observed_boundary_gradient: observed,
        grad_phi_norm: dphi,
        hess_phi_norm: d2phi,
        beta_translator,
        beta_weighted,
        bound_translator: (
            analytic_bound(a, b, 0.0, beta_translator, dphi, 0.0),
            analytic_bound(a, b, eps, beta_translator, dphi, 0.0),
        ),
        bound_weighted: (
            analytic_bound(a, b, 0.0, beta_weighted, dphi, params.mu),
            analytic_bound(a, b, eps, beta_weighted, dphi, params.mu),
        ),
    })
}
