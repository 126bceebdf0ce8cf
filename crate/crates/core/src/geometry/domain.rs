use super::piece::{BoundarySample, Piece};
use super::Point;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Shape that is truncated at `x = L` (and `x = -L` for [`Generator::Strip`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// `|y| < m`.
    Strip,
    /// `x > 0, |y| < m`.
    HalfStrip,
    /// Points within `m` of the ray `{x >= 0, y = 0}`.
    RoundEnd,
}

/// Rigid motion from canonical to world coordinates: `world = R(angle) c + offset`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub angle: f64,
    pub offset: Point,
}

impl Frame {
    pub fn to_world(&self, c: Point) -> Point {
        let (s, co) = self.angle.sin_cos();
        Point::new(co * c.x - s * c.y, s * c.x + co * c.y) + self.offset
    }

    pub fn to_canonical(&self, w: Point) -> Point {
        let (s, co) = self.angle.sin_cos();
        let v = w - self.offset;
        Point::new(co * v.x + s * v.y, -s * v.x + co * v.y)
    }
}

/// Inward curvature at a boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curvature {
    pub kappa: f64,
    /// Set at polygon vertices and truncation corners, where `kappa` is reported as 0.
    pub corner: bool,
}

/// A convex planar domain. Construct through the validating constructors or [`Domain::parse`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Disk { center: Point, radius: f64 },
    /// `|y| < half_width`, optionally cut to `|x| < L`.
    Strip { half_width: f64, truncation: Option<f64> },
    /// Counter-clockwise vertices in strictly convex position.
    Polygon { vertices: Vec<Point> },
    Truncated { generator: Generator, half_width: f64, length: f64, frame: Frame },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Domain {
    pub fn disk(center: Point, radius: f64) -> Result<Domain> {
        positive("radius", radius)?;
        Ok(Domain::Disk { center, radius })
    }

    pub fn strip(half_width: f64, truncation: Option<f64>) -> Result<Domain> {
        positive("half-width", half_width)?;
        if let Some(l) = truncation {
            positive("truncation length", l)?;
        }
        Ok(Domain::Strip { half_width, truncation })
    }

    /// Convex polygon; the vertex order may be either orientation.
    pub fn polygon(vertices: Vec<Point>) -> Result<Domain> {
        if vertices.len() < 3 {
            return Err(Error::NonConvex);
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::BadParameter("non-finite polygon vertex".into()));
        }
        let n = vertices.len();
        let area2: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
        let mut v = vertices;
        if area2 < 0.0 {
            v.reverse();
        }
        let scale = v.iter().map(|p| p.norm()).fold(1.0, f64::max);
        for i in 0..n {
            let e1 = v[(i + 1) % n] - v[i];
            let e2 = v[(i + 2) % n] - v[(i + 1) % n];
            if e1.cross(e2) <= 1e-12 * scale * scale {
                return Err(Error::NonConvex);
            }
        }
        // Turning left at every vertex still allows self-winding stars.
        let turning: f64 = (0..n)
            .map(|i| {
                let e1 = v[(i + 1) % n] - v[i];
                let e2 = v[(i + 2) % n] - v[(i + 1) % n];
                e1.cross(e2).atan2(e1.dot(e2))
            })
            .sum();
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::NonConvex);
        }
        Ok(Domain::Polygon { vertices: v })
    }

    /// Axis-aligned square with the given centre and side.
    pub fn square(center: Point, side: f64) -> Result<Domain> {
        positive("side", side)?;
        let s = side / 2.0;
        Domain::polygon(vec![
            center + Point::new(-s, -s),
            center + Point::new(s, -s),
            center + Point::new(s, s),
            center + Point::new(-s, s),
        ])
    }

    pub fn truncated(generator: Generator, half_width: f64, length: f64, frame: Frame) -> Result<Domain> {
        positive("half-width", half_width)?;
        positive("truncation length", length)?;
        if !frame.angle.is_finite() || !frame.offset.x.is_finite() || !frame.offset.y.is_finite() {
            return Err(Error::BadParameter("non-finite frame".into()));
        }
        Ok(Domain::Truncated { generator, half_width, length, frame })
    }

    /// Parses a domain description.
    ///
    /// Accepts a whitespace separated `key=value` block such as
    /// `kind=disk radius=1.0 cx=0 cy=0`, or a shorthand such as `disk:1.0`,
    /// `square:2`, `strip:1:3`, `halfstrip:1:6`, `roundend:1:6` and
    /// `polygon:0,0;1,0;0,1`. Lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Domain> {
        let body: String = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join(" ");
        let body = body.trim();
        if !body.contains('=') {
            return parse_shorthand(body);
        }
        let mut kv = std::collections::BTreeMap::new();
        for tok in body.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::BadParameter(format!("expected key=value, got `{tok}`")))?;
            kv.insert(k.to_ascii_lowercase(), v.trim_matches('"').to_string());
        }
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match kv.get(key) {
                Some(v) => v.parse::<f64>().map_err(|_| Error::BadParameter(format!("{key}: not a number: `{v}`"))),
                None => default.ok_or_else(|| Error::BadParameter(format!("missing key `{key}`"))),
            }
        };
        let kind = kv.get("kind").ok_or_else(|| Error::BadParameter("missing key `kind`".into()))?;
        let center = Point::new(num("cx", Some(0.0))?, num("cy", Some(0.0))?);
        match kind.as_str() {
            "disk" => Domain::disk(center, num("radius", None)?),
            "square" => Domain::square(center, num("side", None)?),
            "strip" => {
                let l = if kv.contains_key("l") { Some(num("l", None)?) } else { None };
                Domain::strip(num("m", None)?, l)
            }
            "polygon" => Domain::polygon(parse_vertices(
                kv.get("vertices").ok_or_else(|| Error::BadParameter("missing key `vertices`".into()))?,
            )?),
            "truncated" | "halfstrip" | "roundend" => {
                let gen = if kind == "truncated" {
                    kv.get("generator").map(String::as_str).unwrap_or("strip")
                } else {
                    kind.as_str()
                };
                let frame = Frame { angle: num("angle", Some(0.0))?, offset: center };
                Domain::truncated(parse_generator(gen)?, num("m", None)?, num("l", None)?, frame)
            }
            other => Err(Error::BadParameter(format!("unknown domain kind `{other}`"))),
        }
    }

    /// Signed distance to the boundary, positive inside.
    ///
    /// Exact for disks, strips and polygons; for truncated regions it is the
    /// exact distance inside and a 1-Lipschitz negative value outside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match self {
            Domain::Disk { center, radius } => radius - p.dist(*center),
            Domain::Strip { half_width, truncation } => {
                let dy = half_width - p.y.abs();
                match truncation {
                    None => dy,
                    Some(l) => rect_sdf(p, -l, *l, -half_width, *half_width),
                }
            }
            Domain::Polygon { vertices } => polygon_sdf(vertices, p),
            Domain::Truncated { generator, half_width: m, length: l, frame } => {
                let c = frame.to_canonical(p);
                match generator {
                    Generator::Strip => rect_sdf(c, -l, *l, -m, *m),
                    Generator::HalfStrip => rect_sdf(c, 0.0, *l, -m, *m),
                    Generator::RoundEnd => {
                        let ray = if c.x >= 0.0 { c.y.abs() } else { c.norm() };
                        let inner = (m - ray).min(l - c.x);
                        if inner >= 0.0 || c.x <= *l {
                            inner
                        } else {
                            // Beyond the cut: distance to the end segment.
                            let dy = (c.y.abs() - m).max(0.0);
                            -(c.x - l).hypot(dy)
                        }
                    }
                }
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) > 0.0
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Domain::Strip { truncation: None, .. })
    }

    /// Axis-aligned bounding box `(min, max)`, or `None` for the untruncated strip.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        match self {
            Domain::Disk { center, radius } => {
                Some((*center - Point::new(*radius, *radius), *center + Point::new(*radius, *radius)))
            }
            Domain::Strip { truncation: None, .. } => None,
            _ => {
                let pts = self.pieces().iter().flat_map(piece_extremes).collect::<Vec<_>>();
                let lo = pts.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |a, p| {
                    Point::new(a.x.min(p.x), a.y.min(p.y))
                });
                let hi = pts.iter().fold(Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, p| {
                    Point::new(a.x.max(p.x), a.y.max(p.y))
                });
                Some((lo, hi))
            }
        }
    }

    /// Counter-clockwise boundary pieces; empty for the untruncated strip.
    pub fn pieces(&self) -> Vec<Piece> {
        let seg = |a: Point, b: Point, artificial: bool| Piece::Segment { a, b, artificial };
        match self {
            Domain::Disk { center, radius } => {
                vec![Piece::Arc { center: *center, radius: *radius, start: 0.0, sweep: 2.0 * PI }]
            }
            Domain::Strip { truncation: None, .. } => Vec::new(),
            Domain::Strip { half_width: m, truncation: Some(l) } => rect_pieces(-l, *l, -m, *m, true, true)
                .into_iter()
                .map(|(a, b, art)| seg(a, b, art))
                .collect(),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).map(|i| seg(vertices[i], vertices[(i + 1) % n], false)).collect()
            }
            Domain::Truncated { generator, half_width: m, length: l, frame } => {
                let canonical: Vec<Piece> = match generator {
                    Generator::Strip => rect_pieces(-l, *l, -m, *m, true, true)
                        .into_iter()
                        .map(|(a, b, art)| seg(a, b, art))
                        .collect(),
                    Generator::HalfStrip => rect_pieces(0.0, *l, -m, *m, false, true)
                        .into_iter()
                        .map(|(a, b, art)| seg(a, b, art))
                        .collect(),
                    Generator::RoundEnd => vec![
                        seg(Point::new(*l, -m), Point::new(*l, *m), true),
                        seg(Point::new(*l, *m), Point::new(0.0, *m), false),
                        Piece::Arc { center: Point::new(0.0, 0.0), radius: *m, start: PI / 2.0, sweep: PI },
                        seg(Point::new(0.0, -m), Point::new(*l, -m), false),
                    ],
                };
                canonical.into_iter().map(|p| transform_piece(&p, frame)).collect()
            }
        }
    }

    /// Nearest boundary point (the projection onto the boundary).
    pub fn project(&self, p: Point) -> Point {
        match self {
            Domain::Disk { center, radius } => {
                let v = p - *center;
                let r = v.norm();
                if r == 0.0 {
                    *center + Point::new(*radius, 0.0)
                } else {
                    *center + v * (radius / r)
                }
            }
            Domain::Strip { half_width, truncation: None } => {
                Point::new(p.x, if p.y >= 0.0 { *half_width } else { -half_width })
            }
            _ => {
                let mut best = p;
                let mut bd = f64::INFINITY;
                for piece in self.pieces() {
                    let q = piece.nearest(p);
                    let d = q.dist(p);
                    if d < bd {
                        bd = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    fn boundary_tol(&self) -> f64 {
        1e-9 * self.length_scale()
    }

    fn length_scale(&self) -> f64 {
        match self.bounding_box() {
            Some((lo, hi)) => (hi - lo).norm().max(1.0),
            None => 1.0,
        }
    }

    /// Whether a boundary point lies on a truncation end rather than the true boundary.
    pub fn is_artificial(&self, p: Point) -> bool {
        let tol = self.boundary_tol();
        let mut on_art = false;
        for piece in self.pieces() {
            if piece.nearest(p).dist(p) <= tol {
                if piece.is_artificial() {
                    on_art = true;
                } else {
                    return false;
                }
            }
        }
        on_art
    }

    /// Inward curvature at (the projection of) `p`.
    pub fn curvature(&self, p: Point) -> Curvature {
        match self {
            Domain::Disk { radius, .. } => Curvature { kappa: 1.0 / radius, corner: false },
            Domain::Strip { truncation: None, .. } => Curvature { kappa: 0.0, corner: false },
            _ => {
                let q = self.project(p);
                let tol = self.boundary_tol();
                let pieces = self.pieces();
                let near: Vec<&Piece> = pieces.iter().filter(|pc| pc.nearest(q).dist(q) <= tol).collect();
                if near.len() >= 2 {
                    // Junctions are corners unless the tangents agree.
                    let t: Vec<Point> = near
                        .iter()
                        .map(|pc| {
                            let (a, ta) = pc.eval(0.0);
                            let (_, tb) = pc.eval(1.0);
                            if a.dist(q) <= tol {
                                ta
                            } else {
                                tb
                            }
                        })
                        .collect();
                    let smooth = t.windows(2).all(|w| w[0].cross(w[1]).abs() < 1e-9 && w[0].dot(w[1]) > 0.0);
                    if !smooth {
                        return Curvature { kappa: 0.0, corner: true };
                    }
                    let kappa = near.iter().map(|pc| pc.kappa()).fold(f64::INFINITY, f64::min);
                    return Curvature { kappa, corner: false };
                }
                let kappa = near.first().map(|pc| pc.kappa()).unwrap_or(0.0);
                Curvature { kappa, corner: false }
            }
        }
    }

    /// Smallest inward curvature over smooth boundary points.
    pub fn min_curvature(&self) -> f64 {
        match self {
            Domain::Disk { radius, .. } => 1.0 / radius,
            _ => 0.0,
        }
    }

    /// Boundary samples with spacing at most `spacing`.
    pub fn boundary_samples(&self, spacing: f64) -> Vec<BoundarySample> {
        self.pieces().iter().flat_map(|p| p.samples(spacing)).collect()
    }

    /// Centre and radius of a disk containing the closure.
    ///
    /// Exact for disks; otherwise centred at the bounding-box centre.
    pub fn enclosing_disk(&self) -> Option<(Point, f64)> {
        match self {
            Domain::Disk { center, radius } => Some((*center, *radius)),
            _ => {
                let (lo, hi) = self.bounding_box()?;
                let c = (lo + hi) * 0.5;
                let r = self
                    .pieces()
                    .iter()
                    .map(|p| match *p {
                        Piece::Segment { a, b, .. } => c.dist(a).max(c.dist(b)),
                        Piece::Arc { center, radius, .. } => c.dist(center) + radius,
                    })
                    .fold(0.0, f64::max);
                Some((c, r))
            }
        }
    }

    /// Half-width of the narrowest enclosing strip and the frame mapping the
    /// canonical strip `|y| < m` onto it.
    pub fn narrowest_strip(&self) -> (f64, Frame) {
        match self {
            Domain::Disk { center, radius } => (*radius, Frame { angle: 0.0, offset: *center }),
            Domain::Strip { half_width, .. } => (*half_width, Frame::default()),
            Domain::Truncated { half_width, frame, .. } => (*half_width, *frame),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (f64::INFINITY, Frame::default());
                for i in 0..n {
                    let a = vertices[i];
                    let e = vertices[(i + 1) % n] - a;
                    let angle = e.y.atan2(e.x);
                    let f0 = Frame { angle, offset: a };
                    let ys: Vec<f64> = vertices.iter().map(|v| f0.to_canonical(*v).y).collect();
                    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let w = (hi - lo) / 2.0;
                    if w < best.0 {
                        let mid = f0.to_world(Point::new(0.0, (hi + lo) / 2.0));
                        best = (w, Frame { angle, offset: mid });
                    }
                }
                best
            }
        }
    }
}

fn parse_generator(s: &str) -> Result<Generator> {
    match s {
        "strip" => Ok(Generator::Strip),
        "halfstrip" | "half-strip" => Ok(Generator::HalfStrip),
        "roundend" | "round-end" => Ok(Generator::RoundEnd),
        other => Err(Error::BadParameter(format!("unknown generator `{other}`"))),
    }
}

fn parse_vertices(s: &str) -> Result<Vec<Point>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| Error::BadParameter(format!("vertex `{pair}` is not x,y")))?;
            let x = a.trim().parse::<f64>().map_err(|_| Error::BadParameter(format!("bad vertex `{pair}`")))?;
            let y = b.trim().parse::<f64>().map_err(|_| Error::BadParameter(format!("bad vertex `{pair}`")))?;
            Ok(Point::new(x, y))
        })
        .collect()
}

fn parse_shorthand(s: &str) -> Result<Domain> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let nums = || -> Result<Vec<f64>> {
        rest.split(':')
            .filter(|t| !t.is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::BadParameter(format!("bad number `{t}` in `{s}`"))))
            .collect()
    };
    let need = |v: &[f64], k: usize| -> Result<()> {
        if v.len() == k {
            Ok(())
        } else {
            Err(Error::BadParameter(format!("`{kind}` shorthand takes {k} value(s), got `{s}`")))
        }
    };
    match kind {
        "disk" => {
            let v = nums()?;
            need(&v, 1)?;
            Domain::disk(Point::default(), v[0])
        }
        "square" => {
            let v = nums()?;
            need(&v, 1)?;
            Domain::square(Point::default(), v[0])
        }
        "strip" => {
            let v = nums()?;
            match v.len() {
                1 => Domain::strip(v[0], None),
                2 => Domain::strip(v[0], Some(v[1])),
                _ => Err(Error::BadParameter(format!("`strip` shorthand takes m[:L], got `{s}`"))),
            }
        }
        "halfstrip" | "roundend" => {
            let v = nums()?;
            need(&v, 2)?;
            Domain::truncated(parse_generator(kind)?, v[0], v[1], Frame::default())
        }
        "polygon" => Domain::polygon(parse_vertices(rest)?),
        other => Err(Error::BadParameter(format!("unknown domain kind `{other}`"))),
    }
}

fn rect_sdf(p: Point, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let dx = (x0 - p.x).max(p.x - x1);
    let dy = (y0 - p.y).max(p.y - y1);
    if dx <= 0.0 && dy <= 0.0 {
        -dx.max(dy)
    } else {
        -(dx.max(0.0).hypot(dy.max(0.0)))
    }
}

fn polygon_sdf(v: &[Point], p: Point) -> f64 {
    let n = v.len();
    let mut inside = true;
    let mut dist = f64::INFINITY;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let e = b - a;
        if e.cross(p - a) <= 0.0 {
            inside = false;
        }
        let s = ((p - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
        dist = dist.min((a + e * s).dist(p));
    }
    if inside {
        dist
    } else {
        -dist
    }
}

/// Counter-clockwise rectangle edges `(a, b, artificial)`; the vertical edges may be artificial.
fn rect_pieces(x0: f64, x1: f64, y0: f64, y1: f64, left_art: bool, right_art: bool) -> Vec<(Point, Point, bool)> {
    vec![
        (Point::new(x0, y0), Point::new(x1, y0), false),
        (Point::new(x1, y0), Point::new(x1, y1), right_art),
        (Point::new(x1, y1), Point::new(x0, y1), false),
        (Point::new(x0, y1), Point::new(x0, y0), left_art),
    ]
}

fn transform_piece(p: &Piece, f: &Frame) -> Piece {
    match *p {
        Piece::Segment { a, b, artificial } => Piece::Segment { a: f.to_world(a), b: f.to_world(b), artificial },
        Piece::Arc { center, radius, start, sweep } => {
            Piece::Arc { center: f.to_world(center), radius, start: start + f.angle, sweep }
        }
    }
}

fn piece_extremes(p: &Piece) -> Vec<Point> {
    match *p {
        Piece::Segment { a, b, .. } => vec![a, b],
        Piece::Arc { center, radius, start, sweep } => {
            let mut pts = vec![p.eval(0.0).0, p.eval(1.0).0];
            for k in 0..8 {
                let ang = k as f64 * PI / 2.0;
                let rel = (ang - start).rem_euclid(2.0 * PI);
                if rel <= sweep {
                    let (s, c) = ang.sin_cos();
                    pts.push(center + Point::new(c, s) * radius);
                }
            }
            pts
        }
    }
}
