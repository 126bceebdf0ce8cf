use super::{GRADIENT_SLACK, ORDER_SLACK};
use crate::elliptic::{residual_values, OperatorParams, SolveReport};
use crate::error::{Error, Result};
use crate::geometry::{Domain, NodeKind, ScalarField};
use crate::radial::bowl_profile;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Largest `u1 - u2` over unknowns.
    pub max_violation: f64,
    /// Largest `u1 - u2` over boundary values.
    pub boundary_violation: f64,
    /// Largest `Q[u2] - Q[u1]`; non-positive when `u1` is the subsolution.
    pub residual_gap: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Reports how far `u1 <= u2` fails at the unknowns; passes within `10 h²`.
pub fn check_comparison(u1: &ScalarField, u2: &ScalarField, params: &OperatorParams) -> Result<ComparisonReport> {
    if !u1.same_grid(u2) {
        return Err(Error::GridMismatch);
    }
    let h = u1.grid().h();
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y));
    let max_violation = max_diff(u1.values(), u2.values());
    let boundary_violation = max_diff(u1.boundary(), u2.boundary());
    let residual_gap = max_diff(&residual_values(u2, params), &residual_values(u1, params));
    let slack = ORDER_SLACK * h * h;
    Ok(ComparisonReport { max_violation, boundary_violation, residual_gap, slack, pass: max_violation <= slack })
}

/// `b(r)` of the bowl with `b(0) = 0`.
pub fn bowl_height(r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(bowl_profile(r, (r / 100.0).min(1e-3))?.end_value())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub c1: f64,
    pub enclosing_radius: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_phi: f64,
    pub max_phi: f64,
    /// `min u - C₁`.
    pub lower_margin: f64,
    /// `max φ - max u`.
    pub upper_margin: f64,
    pub slack: f64,
    /// Whether the largest value over unknowns sits at a boundary-adjacent node.
    pub max_on_ring: bool,
    pub pass: bool,
}

/// Checks `C₁ <= u <= max φ` with `C₁ = min φ - b(R_enc)`.
pub fn check_height_estimate(report: &SolveReport, dom: &Domain) -> Result<HeightReport> {
    let u = &report.solution;
    let g = u.grid();
    let (_, r_enc) = dom.enclosing_disk().ok_or_else(|| Error::BadParameter("unbounded domain".into()))?;
    let fold = |v: &[f64]| (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (min_u, max_u) = fold(u.values());
    let (min_phi, max_phi) = fold(u.boundary());
    let c1 = 0.0 - bowl_height(r_enc)? + min_phi;
    let argmax = (0..u.values().len()).max_by(|&a, &b| u.values()[a].total_cmp(&u.values()[b])).unwrap();
    let slack = ORDER_SLACK * g.h() * g.h();
    let lower_margin = min_u - c1;
    let upper_margin = max_phi - max_u;
    Ok(HeightReport {
        c1,
        enclosing_radius: r_enc,
        min_u,
        max_u,
        min_phi,
        max_phi,
        lower_margin,
        upper_margin,
        slack,
        max_on_ring: g.unknown_kind(argmax) == NodeKind::BoundaryAdjacent,
        pass: lower_margin >= -slack && upper_margin >= -slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub interior_max: f64,
    pub ring_max: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Checks that `|Du|` over interior nodes does not exceed its boundary-ring maximum by more than `5 h`.
pub fn check_gradient_location(report: &SolveReport) -> GradientReport {
    let u = &report.solution;
    let g = u.grid();
    let (mut interior_max, mut ring_max) = (0.0f64, 0.0f64);
    for k in 0..g.num_unknowns() {
        let s = u.gradient(k).norm();
        match g.unknown_kind(k) {
            NodeKind::Interior => interior_max = interior_max.max(s),
            _ => ring_max = ring_max.max(s),
        }
    }
    let slack = GRADIENT_SLACK * g.h();
    GradientReport { interior_max, ring_max, slack, pass: interior_max <= ring_max + slack }
}
