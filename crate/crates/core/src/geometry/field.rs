use super::grid::{Grid, NodeKind, Slot, DX, DY};
use super::Point;
use crate::error::{Error, Result};
use std::sync::Arc;

/// Values at a grid's unknowns together with boundary data.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    boundary: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, boundary: Vec<f64>) -> Result<ScalarField> {
        if values.len() != grid.num_unknowns() || boundary.len() != grid.num_boundary() {
            return Err(Error::MaskMismatch(format!(
                "expected {} values and {} boundary values, got {} and {}",
                grid.num_unknowns(),
                grid.num_boundary(),
                values.len(),
                boundary.len()
            )));
        }
        Ok(ScalarField { grid, values, boundary })
    }

    /// Samples `f` at every unknown and boundary point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> ScalarField {
        let values = (0..grid.num_unknowns()).map(|k| f(grid.unknown_point(k))).collect();
        let boundary = grid.boundary_points().iter().map(|b| f(b.point)).collect();
        ScalarField { grid, values, boundary }
    }

    /// Boundary data from `phi`, interior values zero.
    pub fn with_boundary(grid: Arc<Grid>, phi: impl Fn(Point) -> f64) -> ScalarField {
        let values = vec![0.0; grid.num_unknowns()];
        let boundary = grid.boundary_points().iter().map(|b| phi(b.point)).collect();
        ScalarField { grid, values, boundary }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    pub fn boundary_mut(&mut self) -> &mut [f64] {
        &mut self.boundary
    }

    pub fn slot(&self, s: Slot) -> f64 {
        match s {
            Slot::Unknown(u) => self.values[u as usize],
            Slot::Boundary(b) => self.boundary[b as usize],
        }
    }

    /// The five stencil derivatives `[u_x, u_y, u_xx, u_xy, u_yy]` at unknown `k`.
    pub fn derivatives(&self, k: usize) -> [f64; 5] {
        let mut d = [0.0; 5];
        for (s, w) in &self.grid.stencil(k).entries {
            let v = self.slot(*s);
            for i in 0..5 {
                d[i] += w[i] * v;
            }
        }
        d
    }

    pub fn gradient(&self, k: usize) -> Point {
        let d = self.derivatives(k);
        Point::new(d[DX], d[DY])
    }

    /// Value at a grid node, `None` at exterior nodes.
    pub fn node_value(&self, node: usize) -> Option<f64> {
        match self.grid.node_kind(node) {
            NodeKind::Exterior => None,
            NodeKind::OnBoundary => self.grid.boundary_of_node(node).map(|b| self.boundary[b]),
            _ => self.grid.unknown_of(node).map(|u| self.values[u]),
        }
    }

    /// Sup norm over unknowns and boundary values.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().chain(&self.boundary).fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Largest `|Du|` over unknowns.
    pub fn max_gradient(&self) -> f64 {
        (0..self.values.len()).map(|k| self.gradient(k).norm()).fold(0.0, f64::max)
    }

    /// Adds `c` to every value, including the boundary data.
    pub fn shifted(&self, c: f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
            boundary: self.boundary.iter().map(|v| v + c).collect(),
        }
    }

    pub fn same_grid(&self, o: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &o.grid) || *self.grid == *o.grid
    }
}
