//! Dispatch of validated commands.

use crate::args::{Command, PerronMode, Problem, RunConfig, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;
use translator_lab::analysis::{
    build_barrier, check_comparison, check_flux_identity, check_gradient_location, check_height_estimate,
};
use translator_lab::closed_form::GrimReaper;
use translator_lab::elliptic::{solve_with, OperatorParams, SolveReport};
use translator_lab::io::{field_csv, profile_csv, write_field, write_profile};
use translator_lab::perron::{perron_strip, perron_unbounded, PerronOptions};
use translator_lab::radial::{bowl_profile, mu_radial_profile, winglike_profile, RadialProfile};
use translator_lab::{Error, Grid, Point, ScalarField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

enum Failure {
    Solver(Error),
    Verify(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

/// Runs a command and returns its exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match dispatch(cfg) {
        Ok(()) => EXIT_OK,
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            EXIT_SOLVER
        }
        Err(Failure::Verify(report)) => {
            eprintln!("verification failed");
            print_json(&report);
            EXIT_VERIFY
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default()
}

/// Prints to stdout, tolerating a closed pipe.
fn print_json(v: &Value) {
    let _ = writeln!(std::io::stdout(), "{}", pretty(v));
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    Ok(())
}

fn emit_profile(p: &RadialProfile, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => write_profile(p, path),
        None => emit_text(&profile_csv(p), None),
    }
}

/// Writes the field CSV with a sidecar, or prints the CSV.
fn emit_field(u: &ScalarField, report: Value, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => {
            write_field(u, path, Some(&report))?;
            let mut summary = report;
            if let Some(obj) = summary.as_object_mut() {
                obj.remove("trace");
            }
            print_json(&summary);
            Ok(())
        }
        None => emit_text(&field_csv(u), None),
    }
}

fn solve(p: &Problem, params: &OperatorParams) -> Result<SolveReport, Error> {
    let grid = Arc::new(Grid::new(&p.domain, p.n)?);
    let phi = |q: Point| p.phi.eval(q);
    let report = solve_with(&phi, grid, params, &p.options)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report)
}

fn solve_json(r: &SolveReport) -> Value {
    json!({
        "residual": r.residual,
        "raw_residual": r.raw_residual,
        "iters": r.iterations,
        "trace": r.trace,
        "params": r.params,
        "ordering_violation": r.ordering_violation,
        "warnings": r.warnings,
    })
}

fn dispatch(cfg: &RunConfig) -> Result<(), Failure> {
    match &cfg.command {
        Command::Solve { problem, params, out } => {
            let r = solve(problem, params)?;
            emit_field(&r.solution, solve_json(&r), out.as_deref())?;
        }
        Command::Bowl { r_end, step, out } => emit_profile(&bowl_profile(*r_end, *step)?, out.as_deref())?,
        Command::Wing { r0, r_end, step, out } => emit_profile(&winglike_profile(*r0, *r_end, *step)?, out.as_deref())?,
        Command::MuRadial { mu, r_end, step, out } => {
            emit_profile(&mu_radial_profile(*mu, *r_end, *step)?, out.as_deref())?
        }
        Command::Grim { theta, a, xmin, xmax, sample, seed, out } => {
            let w = GrimReaper::new(*theta, *a)?;
            let hw = w.half_width() * (1.0 - 1e-6);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut s = String::from("x,y,w,residual\n");
            for _ in 0..*sample {
                let p = Point::new(rng.gen_range(*xmin..*xmax), rng.gen_range(-hw..hw));
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, w.eval(p)?, w.residual(p)?);
            }
            emit_text(&s, out.as_deref())?;
        }
        Command::Perron { mode, domain, f, n, tol, max_sweeps, end, out } => {
            let grid = Arc::new(Grid::new(domain, *n)?);
            let opts = PerronOptions { tol: *tol, max_sweeps: *max_sweeps, end_condition: *end, ..PerronOptions::default() };
            let state = match mode {
                PerronMode::Strip => perron_strip(&|x| f.eval(x, 0.0), grid, &opts)?,
                PerronMode::Unbounded => perron_unbounded(grid, &opts)?,
            };
            let trace: Vec<Value> = state.trace.iter().map(|r| json!(r)).collect();
            let report = json!({
                "sweeps": state.sweeps,
                "disks": state.schedule().len(),
                "last_change": state.trace.last().map(|r| r.sup_change),
                "options": opts,
                "trace": trace,
            });
            emit_field(&state.iterate, report, out.as_deref())?;
        }
        Command::Verify { suite, problem, mu, eps, out } => verify(*suite, problem, *mu, *eps, out.as_deref())?,
        Command::Flux { problem, out } => {
            let r = solve(problem, &OperatorParams::translator(1.0))?;
            let f = check_flux_identity(&r, &problem.domain)?;
            let report = json!({ "flux": f, "solve": solve_json(&r) });
            if !f.pass {
                return Err(Failure::Verify(report));
            }
            emit_text(&format!("{}\n", pretty(&report)), out.as_deref())?;
        }
    }
    Ok(())
}

fn wants(suite: Suite, s: Suite) -> bool {
    suite == Suite::All || suite == s
}

fn verify(suite: Suite, problem: &Problem, mu: f64, eps: f64, out: Option<&Path>) -> Result<(), Failure> {
    let params = if mu > 0.0 { OperatorParams::weighted(1.0, mu) } else { OperatorParams::translator(1.0) };
    let r = solve(problem, &params)?;
    let dom = &problem.domain;
    let mut checks = serde_json::Map::new();
    let mut pass = true;
    let mut record = |name: &str, ok: bool, detail: Value| {
        pass &= ok;
        checks.insert(name.into(), json!({ "pass": ok, "detail": detail }));
    };
    if wants(suite, Suite::Comparison) {
        let phi = |q: Point| problem.phi.eval(q) + 1.0;
        let shifted = solve_with(&phi, r.solution.grid().clone(), &params, &problem.options)?;
        let below = check_comparison(&r.solution, &shifted.solution, &params)?;
        let above = check_comparison(&shifted.solution, &r.solution, &params)?;
        record("comparison", below.pass && !above.pass, json!({ "ordered": below, "reversed": above }));
    }
    if wants(suite, Suite::Height) {
        let h = check_height_estimate(&r, dom)?;
        record("height", h.pass, json!(h));
    }
    if wants(suite, Suite::Gradient) {
        let g = check_gradient_location(&r);
        record("gradient", g.pass, json!(g));
    }
    if wants(suite, Suite::Barrier) {
        let phi = |q: Point| problem.phi.eval(q);
        let b = build_barrier(&r, dom, &phi, eps, &params)?;
        record("barrier", b.certified() && b.c2 >= b.observed_boundary_gradient, json!(b));
    }
    if wants(suite, Suite::Flux) && mu == 0.0 {
        let f = check_flux_identity(&r, dom)?;
        record("flux", f.pass, json!(f));
    }
    let report = json!({ "pass": pass, "n": problem.n, "h": r.h(), "checks": checks, "solve": solve_json(&r) });
    if !pass {
        if let Some(p) = out {
            std::fs::write(p, format!("{}\n", pretty(&report))).map_err(Error::from)?;
        }
        return Err(Failure::Verify(report));
    }
    emit_text(&format!("{}\n", pretty(&report)), out)?;
    Ok(())
}
