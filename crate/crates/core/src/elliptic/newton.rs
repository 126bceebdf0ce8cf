use super::operator::{operator_partials, operator_value};
use super::{OperatorParams, SolveOptions, SolveReport, TraceEntry};
use crate::error::{Error, Result};
use crate::geometry::{Grid, Point, ScalarField, Slot, DXX, DYY};
use crate::linalg::{solve, LuCache};
use std::sync::Arc;

/// Factorization cache for repeated solves on one set of unknowns.
#[derive(Default)]
pub(crate) struct Workspace {
    cache: LuCache,
}

pub(crate) struct NewtonStats {
    pub iterations: usize,
}

/// Rows with short arms are scaled by their smallest arm fraction so their
/// `1/θ` weights do not dominate the residual norm.
fn row_scale(g: &Grid, k: usize) -> f64 {
    g.min_frac(k).min(1.0)
}

fn local(members: Option<&[usize]>, j: usize) -> Option<usize> {
    match members {
        None => Some(j),
        Some(m) => m.binary_search(&j).ok(),
    }
}

fn scaled_residual(u: &ScalarField, members: Option<&[usize]>, p: &OperatorParams) -> Vec<f64> {
    let g = u.grid();
    let f = |k: usize| operator_value(p, &u.derivatives(k)) * row_scale(g, k);
    match members {
        None => (0..g.num_unknowns()).map(f).collect(),
        Some(m) => m.iter().map(|&k| f(k)).collect(),
    }
}

fn scaled_jacobian(u: &ScalarField, members: Option<&[usize]>, p: &OperatorParams) -> Vec<(usize, usize, f64)> {
    let g = u.grid();
    let rows: Box<dyn Iterator<Item = (usize, usize)>> = match members {
        None => Box::new((0..g.num_unknowns()).map(|k| (k, k))),
        Some(m) => Box::new(m.iter().enumerate().map(|(i, &k)| (i, k))),
    };
    let mut out = Vec::new();
    for (row, k) in rows {
        let (_, dq) = operator_partials(p, &u.derivatives(k));
        let s = row_scale(g, k);
        for (slot, w) in &g.stencil(k).entries {
            if let Slot::Unknown(j) = *slot {
                if let Some(col) = local(members, j as usize) {
                    out.push((row, col, s * (0..5).map(|i| dq[i] * w[i]).sum::<f64>()));
                }
            }
        }
    }
    out
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton on the unknowns in `members` (all when `None`), others held fixed.
pub(crate) fn newton_subset(
    u: &mut ScalarField,
    members: Option<&[usize]>,
    p: &OperatorParams,
    opts: &SolveOptions,
    ws: &mut Workspace,
) -> Result<NewtonStats> {
    let n = members.map_or(u.grid().num_unknowns(), |m| m.len());
    let ids: Vec<usize> = match members {
        None => (0..n).collect(),
        Some(m) => m.to_vec(),
    };
    let mut f = scaled_residual(u, members, p);
    let stalled = |res: f64, it: usize| Error::NewtonStalled { t: p.t, mu: p.mu, residual: res, iterations: it };
    for it in 0..=opts.max_iterations {
        let s = sup(&f);
        if !s.is_finite() {
            return Err(stalled(s, it));
        }
        if s < opts.tol {
            return Ok(NewtonStats { iterations: it });
        }
        if it == opts.max_iterations {
            return Err(stalled(s, it));
        }
        let jac = scaled_jacobian(u, members, p);
        let mut delta: Vec<f64> = f.iter().map(|v| -v).collect();
        solve(n, &jac, &mut delta, &mut ws.cache)?;
        let base: Vec<f64> = ids.iter().map(|&k| u.values()[k]).collect();
        let norm0 = l2(&f);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            for (i, &k) in ids.iter().enumerate() {
                u.values_mut()[k] = base[i] + lambda * delta[i];
            }
            let ft = scaled_residual(u, members, p);
            let nt = l2(&ft);
            if nt.is_finite() && nt < norm0 {
                f = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            for (i, &k) in ids.iter().enumerate() {
                u.values_mut()[k] = base[i];
            }
            return Err(stalled(s, it));
        }
    }
    unreachable!()
}

/// Discrete harmonic function with the field's boundary data.
pub fn harmonic_extension(boundary: &ScalarField) -> Result<ScalarField> {
    let g = boundary.grid().clone();
    let n = g.num_unknowns();
    let mut rhs = vec![0.0; n];
    let mut entries = Vec::new();
    for k in 0..n {
        let s = row_scale(&g, k);
        for (slot, w) in &g.stencil(k).entries {
            let c = s * (w[DXX] + w[DYY]);
            match *slot {
                Slot::Unknown(j) => entries.push((k, j as usize, c)),
                Slot::Boundary(b) => rhs[k] -= c * boundary.boundary()[b as usize],
            }
        }
    }
    solve(n, &entries, &mut rhs, &mut LuCache::default())?;
    ScalarField::new(g, rhs, boundary.boundary().to_vec())
}

pub(crate) fn center_unknown(g: &Grid) -> usize {
    let c = g.domain().enclosing_disk().map(|(c, _)| c).unwrap_or(Point::default());
    (0..g.num_unknowns()).min_by(|&a, &b| g.unknown_point(a).dist(c).total_cmp(&g.unknown_point(b).dist(c))).unwrap()
}

pub(crate) fn trace_entry(u: &ScalarField, p: &OperatorParams, iterations: usize) -> TraceEntry {
    TraceEntry {
        t: p.t,
        mu: p.mu,
        sup_abs_u: u.sup_norm(),
        max_grad: u.max_gradient(),
        center_value: u.values()[center_unknown(u.grid())],
        newton_iterations: iterations,
    }
}

pub(crate) fn report(u: ScalarField, p: OperatorParams, iterations: Vec<usize>, trace: Vec<TraceEntry>) -> SolveReport {
    let scaled = sup(&scaled_residual(&u, None, &p));
    let raw = sup(&super::operator::residual_values(&u, &p));
    SolveReport {
        solution: u,
        params: p,
        residual: scaled,
        raw_residual: raw,
        iterations,
        trace,
        converged: true,
        ordering_violation: 0.0,
        warnings: Vec::new(),
    }
}

/// Newton from the harmonic extension of `phi`.
pub fn newton_solve(
    phi: &dyn Fn(Point) -> f64,
    p: &OperatorParams,
    grid: Arc<Grid>,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let init = harmonic_extension(&ScalarField::with_boundary(grid, phi))?;
    newton_solve_from(init, p, opts)
}

/// Newton from a given initial field; its boundary values are the Dirichlet data.
pub fn newton_solve_from(mut u: ScalarField, p: &OperatorParams, opts: &SolveOptions) -> Result<SolveReport> {
    p.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::BadParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let stats = newton_subset(&mut u, None, p, opts, &mut Workspace::default())?;
    let entry = trace_entry(&u, p, stats.iterations);
    Ok(report(u, *p, vec![stats.iterations], vec![entry]))
}
