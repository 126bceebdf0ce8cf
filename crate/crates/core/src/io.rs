//! CSV and JSON serialization of fields, profiles and grids.
//!
//! Floats are written with 17 significant digits, so values round-trip exactly.

use crate::error::{Error, Result};
use crate::geometry::{Domain, Grid, NodeKind, Point, ScalarField};
use crate::radial::RadialProfile;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Path of the JSON sidecar written next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

#[derive(Serialize)]
struct GridMeta<'a> {
    domain: &'a Domain,
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    unknowns: usize,
    boundary_points: usize,
}

#[derive(Serialize, Deserialize)]
struct BoundaryValue {
    x: f64,
    y: f64,
    u: f64,
}

#[derive(Serialize)]
struct Sidecar<'a, R: Serialize> {
    grid: GridMeta<'a>,
    /// Boundary values that do not sit on grid nodes.
    boundary: Vec<BoundaryValue>,
    report: Option<&'a R>,
}

#[derive(Deserialize)]
struct SidecarIn {
    boundary: Vec<BoundaryValue>,
}

/// CSV `x,y,u` over non-exterior nodes, rows ordered with `y` outer.
pub fn field_csv(field: &ScalarField) -> String {
    let g = field.grid();
    let mut s = String::from("x,y,u\n");
    for node in 0..g.num_nodes() {
        if let Some(v) = field.node_value(node) {
            let p = g.node_point(node);
            let _ = writeln!(s, "{},{},{}", num(p.x), num(p.y), num(v));
        }
    }
    s
}

/// Writes the field CSV and a JSON sidecar with grid metadata and an optional report.
pub fn write_field<R: Serialize>(field: &ScalarField, path: &Path, report: Option<&R>) -> Result<()> {
    if field.values().iter().chain(field.boundary()).any(|v| !v.is_finite()) {
        return Err(Error::BadParameter("field has non-finite values".into()));
    }
    let g = field.grid();
    std::fs::write(path, field_csv(field))?;
    let boundary = (0..g.num_boundary())
        .filter(|&b| g.boundary_node(b).is_none())
        .map(|b| {
            let p = g.boundary_point(b).point;
            BoundaryValue { x: p.x, y: p.y, u: field.boundary()[b] }
        })
        .collect();
    let (nx, ny) = g.dims();
    let side = Sidecar {
        grid: GridMeta {
            domain: g.domain(),
            origin: g.origin(),
            h: g.h(),
            nx,
            ny,
            unknowns: g.num_unknowns(),
            boundary_points: g.num_boundary(),
        },
        boundary,
        report,
    };
    let mut json = serde_json::to_string_pretty(&side).map_err(|e| Error::Io(e.to_string()))?;
    json.push('\n');
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

/// Reads a field written by [`write_field`] back onto `grid`.
pub fn read_field(grid: Arc<Grid>, path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path)?;
    let mut field = ScalarField::from_fn(grid.clone(), |_| f64::NAN);
    let (ox, oy, h) = (grid.origin().x, grid.origin().y, grid.h());
    for (line_no, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |i: usize| -> Result<f64> {
            cols.get(i)
                .and_then(|c| c.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Io(format!("line {}: malformed row `{line}`", line_no + 1)))
        };
        let (x, y, v) = (parse(0)?, parse(1)?, parse(2)?);
        let node = grid
            .node_at(((x - ox) / h).round() as i64, ((y - oy) / h).round() as i64)
            .ok_or_else(|| Error::MaskMismatch(format!("row at ({x}, {y}) is off the grid")))?;
        match grid.node_kind(node) {
            NodeKind::Exterior => return Err(Error::MaskMismatch(format!("row at ({x}, {y}) is exterior"))),
            NodeKind::OnBoundary => {
                let b = grid.boundary_of_node(node).unwrap();
                field.boundary_mut()[b] = v;
            }
            _ => {
                let k = grid.unknown_of(node).unwrap();
                field.values_mut()[k] = v;
            }
        }
    }
    let side = sidecar_path(path);
    if side.exists() {
        let s: SidecarIn = serde_json::from_str(&std::fs::read_to_string(side)?).map_err(|e| Error::Io(e.to_string()))?;
        let mut bi = (0..grid.num_boundary()).filter(|&b| grid.boundary_node(b).is_none());
        for bv in s.boundary {
            let b = bi.next().ok_or_else(|| Error::MaskMismatch("too many boundary values".into()))?;
            field.boundary_mut()[b] = bv.u;
        }
    }
    Ok(field)
}

/// CSV `r,u,du`.
pub fn profile_csv(p: &RadialProfile) -> String {
    let mut s = String::from("r,u,du\n");
    for i in 0..p.r.len() {
        let _ = writeln!(s, "{},{},{}", num(p.r[i]), num(p.u[i]), num(p.du[i]));
    }
    s
}

pub fn write_profile(p: &RadialProfile, path: &Path) -> Result<()> {
    std::fs::write(path, profile_csv(p))?;
    Ok(())
}

/// CSV `x,y,mask` over all nodes.
pub fn grid_csv(g: &Grid) -> String {
    let mut s = String::from("x,y,mask\n");
    for node in 0..g.num_nodes() {
        let p = g.node_point(node);
        let kind = match g.node_kind(node) {
            NodeKind::Interior => "interior",
            NodeKind::BoundaryAdjacent => "boundary-adjacent",
            NodeKind::OnBoundary => "on-boundary",
            NodeKind::Exterior => "exterior",
        };
        let _ = writeln!(s, "{},{},{kind}", num(p.x), num(p.y));
    }
    s
}
