use super::newton::{harmonic_extension, newton_subset, report, trace_entry, Workspace};
use super::{Mode, OperatorParams, SolveOptions, SolveReport, TraceEntry};
use crate::error::{Error, Result};
use crate::geometry::{Grid, Point, ScalarField};
use std::sync::Arc;

struct March {
    iterations: Vec<usize>,
    trace: Vec<TraceEntry>,
    ordering_violation: f64,
}

/// Continues `u` (already solved at `s = 0`) along `params(s)` to `s = end`.
fn march(
    u: &mut ScalarField,
    params: &dyn Fn(f64) -> OperatorParams,
    end: f64,
    opts: &SolveOptions,
    ws: &mut Workspace,
    out: &mut March,
) -> Result<()> {
    if end <= 0.0 {
        return Ok(());
    }
    let full = end / opts.steps as f64;
    let min_step = end * opts.min_increment;
    let mut s = 0.0;
    let mut step = full;
    while s < end {
        let next = if s + step >= end * (1.0 - 1e-12) { end } else { s + step };
        let p = params(next);
        let before = u.values().to_vec();
        match newton_subset(u, None, &p, opts, ws) {
            Ok(stats) => {
                let rise = u.values().iter().zip(&before).fold(f64::NEG_INFINITY, |a, (x, y)| a.max(x - y));
                out.ordering_violation = out.ordering_violation.max(rise);
                out.iterations.push(stats.iterations);
                out.trace.push(trace_entry(u, &p, stats.iterations));
                s = next;
                step = (2.0 * step).min(full);
            }
            Err(e @ Error::NewtonStalled { .. }) => {
                u.values_mut().copy_from_slice(&before);
                step /= 2.0;
                if step < min_step * (1.0 - 1e-12) {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn start(phi: &dyn Fn(Point) -> f64, grid: Arc<Grid>, opts: &SolveOptions, ws: &mut Workspace) -> Result<(ScalarField, March)> {
    if opts.steps == 0 {
        return Err(Error::BadParameter("continuation needs at least one step".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::BadParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut u = harmonic_extension(&ScalarField::with_boundary(grid, phi))?;
    let p0 = OperatorParams::minimal();
    let stats = newton_subset(&mut u, None, &p0, opts, ws)?;
    let m = March { iterations: vec![stats.iterations], trace: vec![trace_entry(&u, &p0, stats.iterations)], ordering_violation: f64::NEG_INFINITY };
    Ok((u, m))
}

fn finish(u: ScalarField, p: OperatorParams, m: March) -> SolveReport {
    let mut r = report(u, p, m.iterations, m.trace);
    r.ordering_violation = m.ordering_violation.max(0.0);
    let slack = 10.0 * r.h() * r.h();
    if r.ordering_violation > slack {
        r.warnings.push(format!("continuation ordering violated by {:e} (slack {:e})", r.ordering_violation, slack));
    }
    r
}

/// Minimal surface solve, then `steps` uniform increments of `t` up to 1.
pub fn continuity_solve(phi: &dyn Fn(Point) -> f64, grid: Arc<Grid>, opts: &SolveOptions) -> Result<SolveReport> {
    continuity_solve_to(phi, grid, 1.0, opts)
}

/// As [`continuity_solve`], stopping at `t_final`.
pub fn continuity_solve_to(
    phi: &dyn Fn(Point) -> f64,
    grid: Arc<Grid>,
    t_final: f64,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let pf = OperatorParams::translator(t_final);
    pf.validate()?;
    let mut ws = Workspace::default();
    let (mut u, mut m) = start(phi, grid, opts, &mut ws)?;
    march(&mut u, &OperatorParams::translator, t_final, opts, &mut ws, &mut m)?;
    Ok(finish(u, pf, m))
}

/// Translator continuation to `t = 1`, then `mu` from 0 to its target in `steps` increments.
pub fn mu_solve(phi: &dyn Fn(Point) -> f64, mu: f64, grid: Arc<Grid>, opts: &SolveOptions) -> Result<SolveReport> {
    let pf = OperatorParams::weighted(1.0, mu);
    pf.validate()?;
    let kappa = grid.domain().min_curvature();
    let mut ws = Workspace::default();
    let (mut u, mut m) = start(phi, grid, opts, &mut ws)?;
    march(&mut u, &OperatorParams::translator, 1.0, opts, &mut ws, &mut m)?;
    let mut r = if mu > 0.0 {
        march(&mut u, &|s| OperatorParams::weighted(1.0, s), mu, opts, &mut ws, &mut m)?;
        finish(u, pf, m)
    } else {
        finish(u, OperatorParams::translator(1.0), m)
    };
    if kappa < mu {
        r.warnings.push(format!("boundary curvature {kappa} is below mu = {mu}; solvability is not guaranteed"));
    }
    Ok(r)
}

/// Continuation to an arbitrary target: `t` from 0 in the target's mode, then `mu` for the weighted mode.
pub fn solve_with(phi: &dyn Fn(Point) -> f64, grid: Arc<Grid>, target: &OperatorParams, opts: &SolveOptions) -> Result<SolveReport> {
    target.validate()?;
    match target.mode {
        Mode::Translator => continuity_solve_to(phi, grid, target.t, opts),
        Mode::Weighted if target.t == 1.0 => mu_solve(phi, target.mu, grid, opts),
        Mode::Weighted | Mode::Serrin => {
            let mut ws = Workspace::default();
            let (mut u, mut m) = start(phi, grid, opts, &mut ws)?;
            let at = |s: f64| OperatorParams { t: s, mu: 0.0, ..*target };
            march(&mut u, &at, target.t, opts, &mut ws, &mut m)?;
            if target.mu > 0.0 {
                march(&mut u, &|s| OperatorParams { mu: s, ..*target }, target.mu, opts, &mut ws, &mut m)?;
            }
            Ok(finish(u, *target, m))
        }
    }
}
