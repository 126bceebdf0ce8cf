//! Perron disk-lift iteration between a grim-reaper lower barrier and a supersolution.
//!
//! A lift replaces the iterate inside a closed disk by the discrete
//! translator solution with the current values as data. Sweeps over a fixed
//! overlapping cover lower a supersolution monotonically towards the
//! solution.

use crate::closed_form::GrimReaper;
use crate::elliptic::{harmonic_extension, newton_subset, OperatorParams, SolveOptions, Workspace};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Frame, Generator, Grid, Point, ScalarField};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// Dirichlet data at the artificial truncation ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndCondition {
    /// The lower barrier's value.
    LowerBarrier,
    /// Average of the lower and upper barriers.
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerronOptions {
    /// Stop when a sweep changes no value by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Newton controls for each lift and for the initial solve.
    pub newton: SolveOptions,
    pub end_condition: EndCondition,
    /// Tangent reapers per side of the strip.
    pub tangent_samples: usize,
    /// Disk radius as a fraction of `min(m, d)`.
    pub radius_factor: f64,
    /// A disk of radius `ρ` marks nodes within `cover_fraction · ρ` as covered.
    pub cover_fraction: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tol: 1e-8,
            max_sweeps: 2000,
            newton: SolveOptions::default(),
            end_condition: EndCondition::LowerBarrier,
            tangent_samples: 64,
            radius_factor: 0.4,
            cover_fraction: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub sup_change: f64,
    /// Largest increase of any value during the sweep.
    pub max_rise: f64,
    /// Largest `lower - iterate`.
    pub lower_violation: f64,
    /// Largest `iterate - upper`.
    pub upper_violation: f64,
}

/// Iterate, barriers and the disk schedule.
pub struct PerronState {
    pub iterate: ScalarField,
    pub lower: ScalarField,
    pub upper: ScalarField,
    schedule: Vec<(Disk, Vec<usize>)>,
    workspaces: Vec<Workspace>,
    pub sweeps: usize,
    pub last_change: f64,
    pub trace: Vec<SweepRecord>,
    options: PerronOptions,
}

fn translator() -> OperatorParams {
    OperatorParams::translator(1.0)
}

fn lift_members(u: &mut ScalarField, disk: &Disk, members: &[usize], opts: &SolveOptions, ws: &mut Workspace) -> Result<()> {
    if members.is_empty() {
        return Ok(());
    }
    let before: Vec<f64> = members.iter().map(|&k| u.values()[k]).collect();
    newton_subset(u, Some(members), &translator(), opts, ws).map(|_| ()).map_err(|e| {
        for (i, &k) in members.iter().enumerate() {
            u.values_mut()[k] = before[i];
        }
        Error::SubSolveFailed { cx: disk.center.x, cy: disk.center.y, radius: disk.radius, source: Box::new(e) }
    })
}

/// The lift `M_D[u]`: the discrete translator equations are solved at the
/// unknowns inside the closed disk, every other value held fixed.
pub fn lift_disk(u: &ScalarField, disk: &Disk, opts: &SolveOptions) -> Result<ScalarField> {
    let g = u.grid();
    if !(disk.radius > 0.0) || disk.radius >= g.domain().signed_distance(disk.center) {
        return Err(Error::BadParameter(format!("disk {disk:?} is not compactly inside the domain")));
    }
    let members = g.unknowns_in_disk(disk.center, disk.radius);
    let mut out = u.clone();
    lift_members(&mut out, disk, &members, opts, &mut Workspace::default())?;
    Ok(out)
}

/// Greedy overlapping cover: centres at unknowns in decreasing distance to the
/// boundary, radius `factor · min(m, d)`.
pub fn disk_cover(grid: &Grid, m: f64, factor: f64, cover_fraction: f64) -> Vec<Disk> {
    let n = grid.num_unknowns();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| grid.distance(b).total_cmp(&grid.distance(a)).then(a.cmp(&b)));
    let mut covered = vec![false; n];
    let mut disks = Vec::new();
    for k in order {
        if covered[k] {
            continue;
        }
        let c = grid.unknown_point(k);
        let radius = factor * m.min(grid.distance(k));
        covered[k] = true;
        for j in grid.unknowns_in_disk(c, cover_fraction * radius) {
            covered[j] = true;
        }
        disks.push(Disk { center: c, radius });
    }
    disks.sort_by(|a, b| a.center.y.total_cmp(&b.center.y).then(a.center.x.total_cmp(&b.center.x)));
    disks
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y))
}

impl PerronState {
    fn new(iterate: ScalarField, lower: ScalarField, upper: ScalarField, m: f64, options: PerronOptions) -> PerronState {
        let g = iterate.grid().clone();
        let schedule: Vec<(Disk, Vec<usize>)> = disk_cover(&g, m, options.radius_factor, options.cover_fraction)
            .into_iter()
            .map(|d| {
                let members = g.unknowns_in_disk(d.center, d.radius);
                (d, members)
            })
            .collect();
        let workspaces = schedule.iter().map(|_| Workspace::default()).collect();
        PerronState { iterate, lower, upper, schedule, workspaces, sweeps: 0, last_change: f64::INFINITY, trace: Vec::new(), options }
    }

    pub fn schedule(&self) -> Vec<Disk> {
        self.schedule.iter().map(|(d, _)| *d).collect()
    }

    /// One pass over the schedule, alternating direction between sweeps.
    pub fn sweep(&mut self) -> Result<SweepRecord> {
        let before = self.iterate.values().to_vec();
        let n = self.schedule.len();
        let reverse = self.sweeps % 2 == 1;
        for step in 0..n {
            let i = if reverse { n - 1 - step } else { step };
            let (disk, members) = &self.schedule[i];
            lift_members(&mut self.iterate, disk, members, &self.options.newton, &mut self.workspaces[i])?;
        }
        let now = self.iterate.values();
        let sup_change = now.iter().zip(&before).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        self.sweeps += 1;
        self.last_change = sup_change;
        let rec = SweepRecord {
            sweep: self.sweeps,
            sup_change,
            max_rise: max_diff(now, &before).max(0.0),
            lower_violation: max_diff(self.lower.values(), now).max(0.0),
            upper_violation: max_diff(now, self.upper.values()).max(0.0),
        };
        self.trace.push(rec);
        Ok(rec)
    }

    /// Sweeps until the sup-change drops below the tolerance.
    pub fn run(&mut self) -> Result<()> {
        while self.last_change >= self.options.tol {
            if self.sweeps >= self.options.max_sweeps {
                return Err(Error::NoConvergence { sweeps: self.sweeps, last_change: self.last_change });
            }
            self.sweep()?;
        }
        Ok(())
    }
}

fn strip_dims(d: &Domain) -> Option<(f64, f64)> {
    match *d {
        Domain::Strip { half_width, truncation: Some(l) } => Some((half_width, l)),
        Domain::Truncated { generator: Generator::Strip, half_width, length, frame } if frame == Frame::default() => {
            Some((half_width, length))
        }
        _ => None,
    }
}

/// Checks convexity of `f` on `[-l, l]` by second differences.
pub fn check_convex(f: &dyn Fn(f64) -> f64, l: f64) -> Result<()> {
    let n = 512;
    let dx = 2.0 * l / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(-l + i as f64 * dx)).collect();
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for i in 1..n {
        if vals[i - 1] - 2.0 * vals[i] + vals[i + 1] < -1e-10 * scale {
            return Err(Error::NotConvex { x: -l + i as f64 * dx });
        }
    }
    Ok(())
}

/// Upper envelope of the reapers tangent to `f` at sample points of `[-l, l]`.
pub fn tangent_envelope(f: &dyn Fn(f64) -> f64, m: f64, l: f64, samples: usize) -> Result<Vec<GrimReaper>> {
    let k = samples.max(2);
    let eps = 1e-6 * (1.0 + l);
    (0..k)
        .map(|i| {
            let x0 = -l + 2.0 * l * i as f64 / (k - 1) as f64;
            let slope = (f(x0 + eps) - f(x0 - eps)) / (2.0 * eps);
            GrimReaper::tangent(x0, f(x0), slope, m)
        })
        .collect()
}

fn envelope_value(reapers: &[GrimReaper], p: Point) -> f64 {
    reapers.iter().filter_map(|r| r.eval(p).ok()).fold(f64::NEG_INFINITY, f64::max)
}

/// Perron iteration on a truncated strip with lateral data `f(x)`.
///
/// The grid must be built on `Domain::Strip` with a truncation length.
pub fn perron_strip(f: &dyn Fn(f64) -> f64, grid: Arc<Grid>, opts: &PerronOptions) -> Result<PerronState> {
    let (m, l) = strip_dims(grid.domain())
        .ok_or_else(|| Error::BadParameter("perron_strip needs a truncated axis-aligned strip".into()))?;
    if m >= FRAC_PI_2 {
        return Err(Error::NotInStrip { half_width: m });
    }
    check_convex(f, l)?;
    let reapers = tangent_envelope(f, m, l, opts.tangent_samples)?;
    let lower_fn = |p: Point| envelope_value(&reapers, p);
    let data = |p: Point| -> f64 {
        let a = grid.domain().is_artificial(p);
        if !a {
            return f(p.x);
        }
        match opts.end_condition {
            EndCondition::LowerBarrier => lower_fn(p),
            EndCondition::Midpoint => 0.5 * (lower_fn(p) + f(p.x)),
        }
    };
    let mut v0 = harmonic_extension(&ScalarField::with_boundary(grid.clone(), data))?;
    newton_subset(&mut v0, None, &OperatorParams::minimal(), &opts.newton, &mut Workspace::default())?;
    let mut lower = ScalarField::from_fn(grid.clone(), lower_fn);
    lower.boundary_mut().copy_from_slice(v0.boundary());
    let mut state = PerronState::new(v0.clone(), lower, v0, m, *opts);
    state.run()?;
    Ok(state)
}

/// `ω = -log cos y + log cos m` in the canonical frame of the narrowest strip.
pub fn strip_barrier(dom: &Domain) -> Result<impl Fn(Point) -> f64> {
    let (m, frame) = dom.narrowest_strip();
    if m >= FRAC_PI_2 {
        return Err(Error::NotInStrip { half_width: m });
    }
    Ok(move |p: Point| {
        let y = frame.to_canonical(p).y.clamp(-m, m);
        -y.cos().ln() + m.cos().ln()
    })
}

/// Perron iteration for zero data on a truncated unbounded convex domain, from the supersolution 0.
pub fn perron_unbounded(grid: Arc<Grid>, opts: &PerronOptions) -> Result<PerronState> {
    let dom = grid.domain().clone();
    if !matches!(dom, Domain::Truncated { .. } | Domain::Strip { truncation: Some(_), .. }) {
        return Err(Error::BadParameter("perron_unbounded needs a truncated unbounded domain".into()));
    }
    let (m, _) = dom.narrowest_strip();
    let omega = strip_barrier(&dom)?;
    let data = |p: Point| -> f64 {
        if !dom.is_artificial(p) {
            return 0.0;
        }
        match opts.end_condition {
            EndCondition::LowerBarrier => omega(p),
            EndCondition::Midpoint => 0.5 * omega(p),
        }
    };
    let start = ScalarField::with_boundary(grid.clone(), data);
    let mut lower = ScalarField::from_fn(grid.clone(), &omega);
    lower.boundary_mut().copy_from_slice(start.boundary());
    let mut state = PerronState::new(start.clone(), lower, start, m, *opts);
    state.run()?;
    Ok(state)
}
