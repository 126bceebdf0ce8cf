use super::{Domain, Point};
use crate::error::{Error, Result};
use serde::Serialize;

/// Index of `u_x` in a derivative weight array.
pub const DX: usize = 0;
/// Index of `u_y`.
pub const DY: usize = 1;
/// Index of `u_xx`.
pub const DXX: usize = 2;
/// Index of `u_xy`.
pub const DXY: usize = 3;
/// Index of `u_yy`.
pub const DYY: usize = 4;

/// Where a stencil value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Unknown(u32),
    Boundary(u32),
}

/// A stencil arm: the fraction of `h` to the neighbour value and where that value lives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub frac: f64,
    pub target: Slot,
}

/// Linear weights of the five derivatives over the values they read.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stencil {
    pub entries: Vec<(Slot, [f64; 5])>,
}

impl Stencil {
    fn add(&mut self, slot: Slot, which: usize, w: f64) {
        match self.entries.iter_mut().find(|(s, _)| *s == slot) {
            Some((_, ws)) => ws[which] += w,
            None => {
                let mut ws = [0.0; 5];
                ws[which] = w;
                self.entries.push((slot, ws));
            }
        }
    }

    fn add_scaled(&mut self, other: &[(Slot, f64)], which: usize, s: f64) {
        for &(slot, w) in other {
            self.add(slot, which, s * w);
        }
    }

    fn single(&self, which: usize) -> Vec<(Slot, f64)> {
        self.entries.iter().filter(|(_, w)| w[which] != 0.0).map(|(s, w)| (*s, w[which])).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    /// Unknown whose four neighbours are unknowns.
    Interior,
    /// Unknown with at least one arm ending on the boundary.
    BoundaryAdjacent,
    /// Node lying on the boundary; it carries boundary data.
    OnBoundary,
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub point: Point,
    pub artificial: bool,
}

const NONE: u32 = u32::MAX;

/// Uniform grid over a domain's bounding box with Shortley–Weller arms.
///
/// The spacing is the longer bounding-box side divided by `n`. Nodes with
/// `d > 1e-9 h` are unknowns; boundary data live at on-boundary nodes and at
/// the intersections of grid lines with the boundary.
#[derive(Clone, Debug)]
pub struct Grid {
    domain: Domain,
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    kind: Vec<NodeKind>,
    unknown_of: Vec<u32>,
    unknown_nodes: Vec<usize>,
    dist: Vec<f64>,
    arms: Vec<[Arm; 4]>,
    stencils: Vec<Stencil>,
    boundary: Vec<BoundaryPoint>,
    boundary_node: Vec<Option<usize>>,
    boundary_of: Vec<u32>,
}

impl PartialEq for Grid {
    fn eq(&self, o: &Grid) -> bool {
        self.domain == o.domain && self.origin == o.origin && self.h == o.h && self.nx == o.nx && self.ny == o.ny
    }
}

/// Arm order: +x, -x, +y, -y.
const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl Grid {
    /// Builds the grid with `n` cells along the longer bounding-box side.
    pub fn new(domain: &Domain, n: usize) -> Result<Grid> {
        if n < 8 {
            return Err(Error::BadParameter(format!("resolution n must be at least 8, got {n}")));
        }
        let (lo, hi) = domain
            .bounding_box()
            .ok_or_else(|| Error::BadParameter("an unbounded strip needs a truncation length".into()))?;
        let (w, ht) = (hi.x - lo.x, hi.y - lo.y);
        let h = w.max(ht) / n as f64;
        let cells = |len: f64| ((len / h) - 1e-9).ceil().max(1.0) as usize;
        let (cx, cy) = (cells(w), cells(ht));
        let mid = (lo + hi) * 0.5;
        let origin = Point::new(mid.x - cx as f64 * h / 2.0, mid.y - cy as f64 * h / 2.0);
        Grid::with_layout(domain.clone(), origin, h, cx + 1, cy + 1)
    }

    fn with_layout(domain: Domain, origin: Point, h: f64, nx: usize, ny: usize) -> Result<Grid> {
        let tol = 1e-9 * h;
        let nn = nx * ny;
        let mut kind = vec![NodeKind::Exterior; nn];
        let mut unknown_of = vec![NONE; nn];
        let mut unknown_nodes = Vec::new();
        let mut dist = Vec::new();
        let mut node_d = vec![0.0; nn];
        let mut boundary = Vec::new();
        let mut boundary_node = Vec::new();
        let mut boundary_of = vec![NONE; nn];
        for j in 0..ny {
            for i in 0..nx {
                let idx = j * nx + i;
                let p = Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h);
                let d = domain.signed_distance(p);
                node_d[idx] = d;
                if d > tol {
                    unknown_of[idx] = unknown_nodes.len() as u32;
                    unknown_nodes.push(idx);
                    dist.push(d);
                    kind[idx] = NodeKind::BoundaryAdjacent;
                } else if d >= -tol {
                    kind[idx] = NodeKind::OnBoundary;
                    boundary_of[idx] = boundary.len() as u32;
                    boundary.push(BoundaryPoint { point: p, artificial: domain.is_artificial(p) });
                    boundary_node.push(Some(idx));
                }
            }
        }
        if unknown_nodes.is_empty() {
            return Err(Error::ResolutionTooCoarse("no grid node lies inside the domain".into()));
        }

        let mut arms = Vec::with_capacity(unknown_nodes.len());
        for &idx in &unknown_nodes {
            let (i, j) = ((idx % nx) as i64, (idx / nx) as i64);
            let p = Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h);
            let mut a = [Arm { frac: 1.0, target: Slot::Unknown(0) }; 4];
            for (k, &(di, dj)) in DIRS.iter().enumerate() {
                let (ni, nj) = (i + di, j + dj);
                let nidx = (nj as usize) * nx + ni as usize;
                a[k] = match kind[nidx] {
                    NodeKind::BoundaryAdjacent => Arm { frac: 1.0, target: Slot::Unknown(unknown_of[nidx]) },
                    NodeKind::OnBoundary => Arm { frac: 1.0, target: Slot::Boundary(boundary_of[nidx]) },
                    _ => {
                        let e = Point::new(di as f64 * h, dj as f64 * h);
                        let frac = bisect(|s| domain.signed_distance(p + e * s));
                        let q = p + e * frac;
                        boundary.push(BoundaryPoint { point: q, artificial: domain.is_artificial(q) });
                        boundary_node.push(None);
                        Arm { frac, target: Slot::Boundary((boundary.len() - 1) as u32) }
                    }
                };
            }
            arms.push(a);
        }
        for (k, &idx) in unknown_nodes.iter().enumerate() {
            if arms[k].iter().all(|a| a.frac == 1.0 && matches!(a.target, Slot::Unknown(_))) {
                kind[idx] = NodeKind::Interior;
            } else if !arms[k].iter().any(|a| matches!(a.target, Slot::Unknown(_))) && unknown_nodes.len() > 1 {
                return Err(Error::ResolutionTooCoarse(format!(
                    "node at {:?} has no neighbouring unknown",
                    Point::new(origin.x + (idx % nx) as f64 * h, origin.y + (idx / nx) as f64 * h)
                )));
            }
        }

        let mut g = Grid {
            domain,
            origin,
            h,
            nx,
            ny,
            kind,
            unknown_of,
            unknown_nodes,
            dist,
            arms,
            stencils: Vec::new(),
            boundary,
            boundary_node,
            boundary_of,
        };
        g.stencils = g.build_stencils()?;
        Ok(g)
    }

    fn build_stencils(&self) -> Result<Vec<Stencil>> {
        let h = self.h;
        let mut out: Vec<Stencil> = Vec::with_capacity(self.unknown_nodes.len());
        for (k, arms) in self.arms.iter().enumerate() {
            let c = Slot::Unknown(k as u32);
            let mut st = Stencil::default();
            for (axis, (d1, d2)) in [(DX, DXX), (DY, DYY)].into_iter().enumerate() {
                let plus = arms[2 * axis];
                let minus = arms[2 * axis + 1];
                let (tp, tm) = (plus.frac, minus.frac);
                let wp = tm / (tp * (tm + tp) * h);
                let wm = -tp / (tm * (tm + tp) * h);
                st.add(plus.target, d1, wp);
                st.add(minus.target, d1, wm);
                st.add(c, d1, -(wp + wm));
                let sp = 2.0 / (tp * (tm + tp) * h * h);
                let sm = 2.0 / (tm * (tm + tp) * h * h);
                st.add(plus.target, d2, sp);
                st.add(minus.target, d2, sm);
                st.add(c, d2, -(sp + sm));
            }
            out.push(st);
        }

        let grid_slot = |i: i64, j: i64| -> Option<Slot> {
            if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                return None;
            }
            let idx = j as usize * self.nx + i as usize;
            match self.kind[idx] {
                NodeKind::Interior | NodeKind::BoundaryAdjacent => Some(Slot::Unknown(self.unknown_of[idx])),
                NodeKind::OnBoundary => Some(Slot::Boundary(self.boundary_of[idx])),
                NodeKind::Exterior => None,
            }
        };

        let firsts: Vec<[Vec<(Slot, f64)>; 2]> = out.iter().map(|s| [s.single(DX), s.single(DY)]).collect();
        for (k, &idx) in self.unknown_nodes.iter().enumerate() {
            let (i, j) = ((idx % self.nx) as i64, (idx / self.nx) as i64);
            let diag = [
                (grid_slot(i + 1, j + 1), 1.0),
                (grid_slot(i - 1, j - 1), 1.0),
                (grid_slot(i + 1, j - 1), -1.0),
                (grid_slot(i - 1, j + 1), -1.0),
            ];
            if diag.iter().all(|(s, _)| s.is_some()) {
                for (s, sign) in diag {
                    out[k].add(s.unwrap(), DXY, sign / (4.0 * h * h));
                }
                continue;
            }
            // Differentiate one first-derivative stencil along the other axis.
            let arms = self.arms[k];
            let mut candidates: Vec<(u8, Vec<(Slot, f64)>)> = Vec::new();
            for (axis, other) in [(0usize, DY), (1usize, DX)] {
                let nb = |a: Arm| match a.target {
                    Slot::Unknown(u) if a.frac == 1.0 => Some(u as usize),
                    _ => None,
                };
                let (p, m) = (nb(arms[2 * axis]), nb(arms[2 * axis + 1]));
                let fo = other - DX;
                let combo = |terms: &[(usize, f64)]| -> Vec<(Slot, f64)> {
                    terms.iter().flat_map(|&(u, s)| firsts[u][fo].iter().map(move |&(sl, w)| (sl, w * s))).collect()
                };
                match (p, m) {
                    (Some(p), Some(m)) => candidates.push((2, combo(&[(p, 0.5 / h), (m, -0.5 / h)]))),
                    (Some(p), None) => candidates.push((1, combo(&[(p, 1.0 / h), (k, -1.0 / h)]))),
                    (None, Some(m)) => candidates.push((1, combo(&[(k, 1.0 / h), (m, -1.0 / h)]))),
                    (None, None) => {}
                }
            }
            let best = candidates.iter().map(|c| c.0).max().ok_or_else(|| {
                Error::ResolutionTooCoarse(format!("no cross-derivative stencil at {:?}", self.unknown_point(k)))
            })?;
            let chosen: Vec<&Vec<(Slot, f64)>> = candidates.iter().filter(|c| c.0 == best).map(|c| &c.1).collect();
            let s = 1.0 / chosen.len() as f64;
            for terms in chosen {
                out[k].add_scaled(terms, DXY, s);
            }
        }
        Ok(out)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Node counts along x and y.
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn num_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknown_nodes.len()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn node_point(&self, node: usize) -> Point {
        Point::new(
            self.origin.x + (node % self.nx) as f64 * self.h,
            self.origin.y + (node / self.nx) as f64 * self.h,
        )
    }

    pub fn node_kind(&self, node: usize) -> NodeKind {
        self.kind[node]
    }

    pub fn unknown_of(&self, node: usize) -> Option<usize> {
        match self.unknown_of[node] {
            NONE => None,
            u => Some(u as usize),
        }
    }

    pub fn unknown_node(&self, k: usize) -> usize {
        self.unknown_nodes[k]
    }

    pub fn unknown_point(&self, k: usize) -> Point {
        self.node_point(self.unknown_nodes[k])
    }

    pub fn unknown_kind(&self, k: usize) -> NodeKind {
        self.kind[self.unknown_nodes[k]]
    }

    /// Distance to the boundary from unknown `k`.
    pub fn distance(&self, k: usize) -> f64 {
        self.dist[k]
    }

    pub fn arms(&self, k: usize) -> &[Arm; 4] {
        &self.arms[k]
    }

    /// Smallest arm fraction at unknown `k`.
    pub fn min_frac(&self, k: usize) -> f64 {
        self.arms[k].iter().map(|a| a.frac).fold(1.0, f64::min)
    }

    pub fn stencil(&self, k: usize) -> &Stencil {
        &self.stencils[k]
    }

    pub fn boundary_point(&self, b: usize) -> &BoundaryPoint {
        &self.boundary[b]
    }

    pub fn boundary_points(&self) -> &[BoundaryPoint] {
        &self.boundary
    }

    /// The grid node carrying boundary point `b`, if it is one.
    pub fn boundary_node(&self, b: usize) -> Option<usize> {
        self.boundary_node[b]
    }

    /// The boundary point carried by an on-boundary node.
    pub fn boundary_of_node(&self, node: usize) -> Option<usize> {
        match self.boundary_of[node] {
            NONE => None,
            b => Some(b as usize),
        }
    }

    /// Node index at integer coordinates, if inside the grid.
    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            None
        } else {
            Some(j as usize * self.nx + i as usize)
        }
    }

    /// Unknowns within distance `r` of `c` (closed disk), in increasing order.
    pub fn unknowns_in_disk(&self, c: Point, r: f64) -> Vec<usize> {
        let h = self.h;
        let i0 = ((c.x - r - self.origin.x) / h).floor().max(0.0) as i64;
        let i1 = ((c.x + r - self.origin.x) / h).ceil() as i64;
        let j0 = ((c.y - r - self.origin.y) / h).floor().max(0.0) as i64;
        let j1 = ((c.y + r - self.origin.y) / h).ceil() as i64;
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                if let Some(n) = self.node_at(i, j) {
                    if let Some(u) = self.unknown_of(n) {
                        if self.node_point(n).dist(c) <= r {
                            out.push(u);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Neighbouring unknowns of `k` (up to four).
    pub fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.arms[k].iter().filter_map(|a| match a.target {
            Slot::Unknown(u) => Some(u as usize),
            Slot::Boundary(_) => None,
        })
    }
}

/// Root of `f` on (0, 1) given `f(0) > 0 > f(1)`, to 1e-12.
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    fn apply(g: &Grid, k: usize, which: usize, f: &dyn Fn(Point) -> f64) -> f64 {
        g.stencil(k)
            .entries
            .iter()
            .map(|(s, w)| {
                let p = match *s {
                    Slot::Unknown(u) => g.unknown_point(u as usize),
                    Slot::Boundary(b) => g.boundary_point(b as usize).point,
                };
                w[which] * f(p)
            })
            .sum()
    }

    #[test]
    fn stencils_exact_on_quadratics() {
        let d = Domain::disk(Point::new(0.1, -0.2), 1.0).unwrap();
        let g = Grid::new(&d, 16).unwrap();
        let f = |p: Point| 1.0 + 2.0 * p.x - 3.0 * p.y + 0.5 * p.x * p.x + 1.5 * p.x * p.y - 0.7 * p.y * p.y;
        for k in 0..g.num_unknowns() {
            let p = g.unknown_point(k);
            let want = [2.0 + p.x + 1.5 * p.y, -3.0 + 1.5 * p.x - 1.4 * p.y, 1.0, 1.5, -1.4];
            for (which, w) in want.iter().enumerate() {
                let got = apply(&g, k, which, &f);
                assert!((got - w).abs() < 1e-8, "k={k} which={which} got={got} want={w}");
            }
        }
    }

    #[test]
    fn square_fractions_are_one() {
        let d = Domain::square(Point::default(), 2.0).unwrap();
        let g = Grid::new(&d, 16).unwrap();
        for k in 0..g.num_unknowns() {
            assert!(g.arms(k).iter().all(|a| a.frac == 1.0));
        }
        assert_eq!(g.num_unknowns(), 15 * 15);
    }

    #[test]
    fn strip_fractions_in_unit_interval() {
        let d = Domain::strip(1.0, Some(2.0)).unwrap();
        let g = Grid::new(&d, 32).unwrap();
        for k in 0..g.num_unknowns() {
            for a in g.arms(k) {
                assert!(a.frac > 0.0 && a.frac <= 1.0);
            }
        }
    }

    #[test]
    fn interior_nodes_have_unknown_neighbours() {
        let d = Domain::disk(Point::default(), 1.0).unwrap();
        let g = Grid::new(&d, 24).unwrap();
        for k in 0..g.num_unknowns() {
            if g.unknown_kind(k) == NodeKind::Interior {
                assert_eq!(g.neighbours(k).count(), 4);
            }
        }
    }

    #[test]
    fn coarse_resolution_rejected() {
        let d = Domain::disk(Point::default(), 1.0).unwrap();
        assert!(matches!(Grid::new(&d, 4), Err(Error::BadParameter(_))));
        assert!(Grid::new(&Domain::strip(1.0, None).unwrap(), 16).is_err());
    }
}
