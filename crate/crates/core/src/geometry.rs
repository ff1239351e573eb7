//! Planar primitives and the closed-form predicates built on them.
//!
//! Everything here works on single constant-curvature pieces (circular arcs
//! and straight segments). Containment, nearest/farthest points and
//! intersections are decided analytically per piece; no sampling is used.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("terminals coincide (chord {chord:e} is below tolerance)")]
    DegenerateChord { chord: f64 },
    #[error("chord {chord} exceeds the lens diameter {max}")]
    ChordTooLong { chord: f64, max: f64 },
    #[error("point lies on the curve (distance {distance:e})")]
    PointOnCurve { distance: f64 },
}

/// A point (or free vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotated(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Point2, u: f64) -> Point2 {
        self + (o - self) * u
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        self.lerp(o, 0.5)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Absolute tolerances shared by every predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Geometric slack in length units.
    pub eps_geom: f64,
    /// Arc-length slack in length units.
    pub eps_param: f64,
}

impl Tolerances {
    /// Defaults: `1e-9 r` for geometry and `1e-9 L` for parameters.
    pub fn for_scale(r: f64, length: f64) -> Self {
        Self {
            eps_geom: 1e-9 * r,
            eps_param: 1e-9 * length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        Self { center, radius }
    }

    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        p.dist(self.center) <= self.radius + eps
    }
}

/// A circular arc. Positive sweep runs counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularArcPrim {
    pub center: Point2,
    pub radius: f64,
    pub start_angle: f64,
    pub sweep: f64,
}

impl CircularArcPrim {
    pub fn length(&self) -> f64 {
        self.radius * self.sweep.abs()
    }

    pub fn orientation(&self) -> f64 {
        if self.sweep >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn point_at_angle(&self, theta: f64) -> Point2 {
        self.center + Point2::from_angle(theta) * self.radius
    }

    pub fn angle_at(&self, s: f64) -> f64 {
        self.start_angle + self.orientation() * s / self.radius
    }

    pub fn end_angle(&self) -> f64 {
        self.start_angle + self.sweep
    }

    /// Arc-length offset of the point at angle `theta`, if it lies on the arc
    /// (with angular slack `tol`).
    pub fn param_of_angle(&self, theta: f64, tol: f64) -> Option<f64> {
        let span = self.sweep.abs();
        let mut d = if self.sweep >= 0.0 {
            (theta - self.start_angle).rem_euclid(TAU)
        } else {
            (self.start_angle - theta).rem_euclid(TAU)
        };
        if d > TAU - tol && span < TAU - tol {
            d -= TAU;
        }
        if d >= -tol && d <= span + tol {
            Some(d.clamp(0.0, span) * self.radius)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentPrim {
    pub from: Point2,
    pub to: Point2,
}

impl SegmentPrim {
    pub fn length(&self) -> f64 {
        self.from.dist(self.to)
    }

    pub fn direction(&self) -> Point2 {
        (self.to - self.from).normalized()
    }
}

/// One constant-curvature piece of an arc-spline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prim {
    Arc(CircularArcPrim),
    Segment(SegmentPrim),
}

/// A similarity transform `x -> offset + scale * R(angle) x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub angle: f64,
    pub offset: Point2,
}

impl Similarity {
    pub fn rigid(angle: f64, offset: Point2) -> Self {
        Self {
            scale: 1.0,
            angle,
            offset,
        }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.offset + p.rotated(self.angle) * self.scale
    }

    pub fn apply_vec(&self, v: Point2) -> Point2 {
        v.rotated(self.angle)
    }
}

impl Prim {
    pub fn segment(from: Point2, to: Point2) -> Prim {
        Prim::Segment(SegmentPrim { from, to })
    }

    pub fn arc(center: Point2, radius: f64, start_angle: f64, sweep: f64) -> Prim {
        Prim::Arc(CircularArcPrim {
            center,
            radius,
            start_angle,
            sweep,
        })
    }

    pub fn length(&self) -> f64 {
        match self {
            Prim::Arc(a) => a.length(),
            Prim::Segment(s) => s.length(),
        }
    }

    /// Signed curvature; positive for counter-clockwise turning.
    pub fn signed_curvature(&self) -> f64 {
        match self {
            Prim::Arc(a) => a.orientation() / a.radius,
            Prim::Segment(_) => 0.0,
        }
    }

    pub fn start(&self) -> Point2 {
        match self {
            Prim::Arc(a) => a.point_at_angle(a.start_angle),
            Prim::Segment(s) => s.from,
        }
    }

    pub fn end(&self) -> Point2 {
        match self {
            Prim::Arc(a) => a.point_at_angle(a.end_angle()),
            Prim::Segment(s) => s.to,
        }
    }

    /// Point at arc-length offset `s` from the start.
    pub fn point_at(&self, s: f64) -> Point2 {
        match self {
            Prim::Arc(a) => a.point_at_angle(a.angle_at(s)),
            Prim::Segment(seg) => {
                let len = seg.length();
                seg.from.lerp(seg.to, if len > 0.0 { s / len } else { 0.0 })
            }
        }
    }

    /// Unit tangent at arc-length offset `s`.
    pub fn tangent_at(&self, s: f64) -> Point2 {
        match self {
            Prim::Arc(a) => Point2::from_angle(a.angle_at(s)).perp() * a.orientation(),
            Prim::Segment(seg) => seg.direction(),
        }
    }

    /// Tangent direction angle at `s` (not unwrapped).
    pub fn heading_at(&self, s: f64) -> f64 {
        self.tangent_at(s).angle()
    }

    /// Total signed turning of the tangent across the piece.
    pub fn turning(&self) -> f64 {
        match self {
            Prim::Arc(a) => a.sweep,
            Prim::Segment(_) => 0.0,
        }
    }

    /// Sub-piece between arc-length offsets `s0 < s1`.
    pub fn trim(&self, s0: f64, s1: f64) -> Prim {
        match self {
            Prim::Arc(a) => {
                let o = a.orientation();
                Prim::Arc(CircularArcPrim {
                    center: a.center,
                    radius: a.radius,
                    start_angle: a.angle_at(s0),
                    sweep: o * (s1 - s0) / a.radius,
                })
            }
            Prim::Segment(_) => Prim::segment(self.point_at(s0), self.point_at(s1)),
        }
    }

    pub fn reversed(&self) -> Prim {
        match self {
            Prim::Arc(a) => Prim::Arc(CircularArcPrim {
                center: a.center,
                radius: a.radius,
                start_angle: a.end_angle(),
                sweep: -a.sweep,
            }),
            Prim::Segment(s) => Prim::segment(s.to, s.from),
        }
    }

    pub fn transformed(&self, t: &Similarity) -> Prim {
        match self {
            Prim::Arc(a) => Prim::Arc(CircularArcPrim {
                center: t.apply(a.center),
                radius: a.radius * t.scale,
                start_angle: a.start_angle + t.angle,
                sweep: a.sweep,
            }),
            Prim::Segment(s) => Prim::segment(t.apply(s.from), t.apply(s.to)),
        }
    }

    /// Nearest point on the piece: `(offset, distance)`.
    pub fn nearest(&self, p: Point2) -> (f64, f64) {
        match self {
            Prim::Segment(seg) => {
                let len = seg.length();
                let d = seg.direction();
                let s = (p - seg.from).dot(d).clamp(0.0, len);
                (s, p.dist(seg.from + d * s))
            }
            Prim::Arc(a) => {
                let v = p - a.center;
                let mut best = (0.0, p.dist(self.start()));
                let e = p.dist(self.end());
                if e < best.1 {
                    best = (a.length(), e);
                }
                if v.norm() > 0.0 {
                    if let Some(s) = a.param_of_angle(v.angle(), 0.0) {
                        let d = (v.norm() - a.radius).abs();
                        if d < best.1 {
                            best = (s, d);
                        }
                    }
                } else {
                    best = (0.0, a.radius);
                }
                best
            }
        }
    }

    /// Farthest point on the piece: `(offset, distance)`.
    pub fn farthest(&self, p: Point2) -> (f64, f64) {
        let ds = p.dist(self.start());
        let de = p.dist(self.end());
        let mut best = if de > ds { (self.length(), de) } else { (0.0, ds) };
        if let Prim::Arc(a) = self {
            let v = a.center - p;
            if v.norm() > 0.0 {
                if let Some(s) = a.param_of_angle(v.angle(), 0.0) {
                    let d = v.norm() + a.radius;
                    if d > best.1 {
                        best = (s, d);
                    }
                }
            }
        }
        best
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bbox(&self) -> (Point2, Point2) {
        let (a, b) = (self.start(), self.end());
        let mut lo = Point2::new(a.x.min(b.x), a.y.min(b.y));
        let mut hi = Point2::new(a.x.max(b.x), a.y.max(b.y));
        if let Prim::Arc(arc) = self {
            for k in 0..4 {
                let theta = k as f64 * FRAC_PI_2;
                if arc.param_of_angle(theta, 0.0).is_some() {
                    let p = arc.point_at_angle(theta);
                    lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
                }
            }
        }
        (lo, hi)
    }

    /// Splits the piece into parts that are monotone in `y`.
    pub(crate) fn y_monotone_parts(&self, out: &mut Vec<MonotonePart>) {
        match self {
            Prim::Segment(s) => {
                if s.from.y != s.to.y {
                    out.push(MonotonePart::Segment { a: s.from, b: s.to });
                }
            }
            Prim::Arc(a) => {
                // cut at the angles pi/2 and -pi/2 (top and bottom of the circle)
                let mut cuts: Vec<f64> = vec![0.0, a.length()];
                for theta in [FRAC_PI_2, -FRAC_PI_2] {
                    let span = a.sweep.abs();
                    let first = if a.sweep >= 0.0 {
                        (theta - a.start_angle).rem_euclid(TAU)
                    } else {
                        (a.start_angle - theta).rem_euclid(TAU)
                    };
                    let mut d = first;
                    while d < span {
                        if d > 0.0 {
                            cuts.push(d * a.radius);
                        }
                        d += TAU;
                    }
                }
                cuts.sort_by(f64::total_cmp);
                for w in cuts.windows(2) {
                    if w[1] - w[0] <= 0.0 {
                        continue;
                    }
                    let mid = a.angle_at(0.5 * (w[0] + w[1]));
                    let p0 = a.point_at_angle(a.angle_at(w[0]));
                    let p1 = a.point_at_angle(a.angle_at(w[1]));
                    if p0.y == p1.y {
                        continue;
                    }
                    out.push(MonotonePart::Arc {
                        center: a.center,
                        radius: a.radius,
                        right_half: mid.cos() >= 0.0,
                        a: p0,
                        b: p1,
                    });
                }
            }
        }
    }
}

/// Monotone parts of a closed chain. Consecutive part ends that agree up
/// to rounding get the same `y`, so half-open crossing tests neither drop
/// nor double-count a junction.
pub(crate) fn chain_parts(chain: &[Prim]) -> Vec<MonotonePart> {
    let mut parts = Vec::new();
    for p in chain {
        p.y_monotone_parts(&mut parts);
    }
    let n = parts.len();
    for k in 0..n {
        let prev_y = parts[(k + n - 1) % n].ends().1.y;
        let a = parts[k].start_mut();
        if (a.y - prev_y).abs() <= 1e-9 * (1.0 + prev_y.abs()) {
            a.y = prev_y;
        }
    }
    parts
}

/// A y-monotone piece used for ray casting and scanline filling.
#[derive(Debug, Clone, Copy)]
pub(crate) enum MonotonePart {
    Segment {
        a: Point2,
        b: Point2,
    },
    Arc {
        center: Point2,
        radius: f64,
        right_half: bool,
        a: Point2,
        b: Point2,
    },
}

impl MonotonePart {
    pub(crate) fn y_range(&self) -> (f64, f64) {
        let (a, b) = self.ends();
        (a.y.min(b.y), a.y.max(b.y))
    }

    fn start_mut(&mut self) -> &mut Point2 {
        match self {
            MonotonePart::Segment { a, .. } => a,
            MonotonePart::Arc { a, .. } => a,
        }
    }

    fn ends(&self) -> (Point2, Point2) {
        match *self {
            MonotonePart::Segment { a, b } => (a, b),
            MonotonePart::Arc { a, b, .. } => (a, b),
        }
    }

    /// +1 when the part runs upward.
    pub(crate) fn direction(&self) -> i32 {
        let (a, b) = self.ends();
        if b.y > a.y {
            1
        } else {
            -1
        }
    }

    /// Crossing with the horizontal line at height `y`, half-open in `y`.
    pub(crate) fn crossing(&self, y: f64) -> Option<f64> {
        let (lo, hi) = self.y_range();
        if !(y >= lo && y < hi) {
            return None;
        }
        Some(match *self {
            MonotonePart::Segment { a, b } => a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y),
            MonotonePart::Arc {
                center,
                radius,
                right_half,
                ..
            } => {
                let dy = y - center.y;
                let w = (radius * radius - dy * dy).max(0.0).sqrt();
                if right_half {
                    center.x + w
                } else {
                    center.x - w
                }
            }
        })
    }
}

/// The one or two radius-`r` disks whose boundaries pass through `p` and `q`.
pub fn disks_through(p: Point2, q: Point2, r: f64, tol: &Tolerances) -> Result<Vec<Disk>, GeometryError> {
    let chord = p.dist(q);
    if chord <= tol.eps_geom {
        return Err(GeometryError::DegenerateChord { chord });
    }
    if chord > 2.0 * r + tol.eps_geom {
        return Err(GeometryError::ChordTooLong { chord, max: 2.0 * r });
    }
    let m = p.midpoint(q);
    let half = 0.5 * chord;
    let h2 = r * r - half * half;
    if h2 <= 0.0 || chord >= 2.0 * r - tol.eps_geom {
        return Ok(vec![Disk::new(m, r)]);
    }
    let n = (q - p).normalized().perp() * h2.sqrt();
    Ok(vec![Disk::new(m + n, r), Disk::new(m - n, r)])
}

/// Intersection `D1 ∩ D2` of the radius-`r` disks through two terminals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lens {
    pub d1: Disk,
    pub d2: Disk,
    pub p: Point2,
    pub q: Point2,
}

impl Lens {
    pub fn through(p: Point2, q: Point2, r: f64, tol: &Tolerances) -> Result<Lens, GeometryError> {
        let disks = disks_through(p, q, r, tol)?;
        let d1 = disks[0];
        let d2 = *disks.get(1).unwrap_or(&d1);
        Ok(Lens { d1, d2, p, q })
    }

    pub fn disks(&self) -> [Disk; 2] {
        [self.d1, self.d2]
    }
}

pub fn lens_contains(lens: &Lens, x: Point2, tol: &Tolerances) -> bool {
    lens.d1.contains(x, tol.eps_geom) && lens.d2.contains(x, tol.eps_geom)
}

/// Whether the whole piece lies in the closed disk.
pub fn piece_in_disk(piece: &Prim, d: &Disk, tol: &Tolerances) -> bool {
    piece.farthest(d.center).1 <= d.radius + tol.eps_geom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactKind {
    Transversal,
    Tangential,
    /// The piece runs along the circle.
    Coincident,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleHit {
    pub point: Point2,
    /// Arc-length offset along the piece.
    pub offset: f64,
    pub kind: ContactKind,
}

/// Intersections of the circle `∂c` with a piece.
pub fn circle_piece_intersections(c: &Disk, piece: &Prim, tol: &Tolerances) -> Vec<CircleHit> {
    let eps = tol.eps_geom;
    let mut hits = Vec::new();
    match piece {
        Prim::Segment(seg) => {
            let len = seg.length();
            let d = seg.direction();
            let f = seg.from - c.center;
            let b = f.dot(d);
            let dist = d.cross(f).abs();
            if dist > c.radius + eps {
                return hits;
            }
            if (dist - c.radius).abs() <= eps {
                let s = -b;
                if s >= -eps && s <= len + eps {
                    let s = s.clamp(0.0, len);
                    hits.push(CircleHit {
                        point: seg.from + d * s,
                        offset: s,
                        kind: ContactKind::Tangential,
                    });
                }
                return hits;
            }
            let w = (c.radius * c.radius - dist * dist).max(0.0).sqrt();
            for s in [-b - w, -b + w] {
                if s >= -eps && s <= len + eps {
                    let s = s.clamp(0.0, len);
                    hits.push(CircleHit {
                        point: seg.from + d * s,
                        offset: s,
                        kind: ContactKind::Transversal,
                    });
                }
            }
        }
        Prim::Arc(a) => {
            let ang_tol = eps / a.radius;
            for (p, kind) in circle_circle(c.center, c.radius, a.center, a.radius, eps) {
                if kind == ContactKind::Coincident {
                    hits.push(CircleHit {
                        point: piece.start(),
                        offset: 0.0,
                        kind,
                    });
                    hits.push(CircleHit {
                        point: piece.end(),
                        offset: a.length(),
                        kind,
                    });
                    break;
                }
                if let Some(s) = a.param_of_angle((p - a.center).angle(), ang_tol) {
                    hits.push(CircleHit {
                        point: p,
                        offset: s,
                        kind,
                    });
                }
            }
        }
    }
    hits
}

/// Intersection points of two full circles.
fn circle_circle(c1: Point2, r1: f64, c2: Point2, r2: f64, eps: f64) -> Vec<(Point2, ContactKind)> {
    let d = c1.dist(c2);
    if d <= eps && (r1 - r2).abs() <= eps {
        return vec![(c2, ContactKind::Coincident)];
    }
    if d > r1 + r2 + eps || d < (r1 - r2).abs() - eps || d <= eps {
        return vec![];
    }
    let u = (c2 - c1) * (1.0 / d);
    if (d - (r1 + r2)).abs() <= eps {
        return vec![(c1 + u * r1, ContactKind::Tangential)];
    }
    if (d - (r1 - r2).abs()).abs() <= eps {
        let p = if r1 >= r2 { c1 + u * r1 } else { c1 - u * r1 };
        return vec![(p, ContactKind::Tangential)];
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let m = c1 + u * a;
    vec![
        (m + u.perp() * h, ContactKind::Transversal),
        (m - u.perp() * h, ContactKind::Transversal),
    ]
}

/// A crossing between two pieces; offsets are arc-length along each piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceCrossing {
    pub point: Point2,
    pub offset_a: f64,
    pub offset_b: f64,
}

/// Result of intersecting two pieces.
#[derive(Debug, Clone, PartialEq)]
pub enum PiecePair {
    Points(Vec<PieceCrossing>),
    /// The pieces share a stretch of positive length.
    Overlap,
}

/// Intersections between two pieces (including tangential touches).
pub fn piece_intersections(a: &Prim, b: &Prim, tol: &Tolerances) -> PiecePair {
    let eps = tol.eps_geom;
    match (a, b) {
        (Prim::Segment(sa), Prim::Segment(sb)) => {
            let da = sa.to - sa.from;
            let db = sb.to - sb.from;
            let denom = da.cross(db);
            let (la, lb) = (sa.length(), sb.length());
            let w = sb.from - sa.from;
            if denom.abs() <= 1e-14 * la * lb {
                // parallel
                if (w.cross(da) / la).abs() > eps {
                    return PiecePair::Points(vec![]);
                }
                let u = da * (1.0 / la);
                let (b0, b1) = ((sb.from - sa.from).dot(u), (sb.to - sa.from).dot(u));
                let (lo, hi) = (b0.min(b1).max(0.0), b0.max(b1).min(la));
                if hi - lo > eps {
                    return PiecePair::Overlap;
                }
                if hi - lo >= -eps {
                    let s = 0.5 * (lo + hi);
                    let p = sa.from + u * s;
                    return PiecePair::Points(vec![PieceCrossing {
                        point: p,
                        offset_a: s,
                        offset_b: p.dist(sb.from),
                    }]);
                }
                return PiecePair::Points(vec![]);
            }
            let ta = w.cross(db) / denom;
            let tb = w.cross(da) / denom;
            let (ea, eb) = (eps / la, eps / lb);
            if ta >= -ea && ta <= 1.0 + ea && tb >= -eb && tb <= 1.0 + eb {
                let ta = ta.clamp(0.0, 1.0);
                PiecePair::Points(vec![PieceCrossing {
                    point: sa.from + da * ta,
                    offset_a: ta * la,
                    offset_b: tb.clamp(0.0, 1.0) * lb,
                }])
            } else {
                PiecePair::Points(vec![])
            }
        }
        (Prim::Segment(_), Prim::Arc(arc)) => {
            let disk = Disk::new(arc.center, arc.radius);
            let mut out = Vec::new();
            for h in circle_piece_intersections(&disk, a, tol) {
                if let Some(s) = arc.param_of_angle((h.point - arc.center).angle(), eps / arc.radius) {
                    out.push(PieceCrossing {
                        point: h.point,
                        offset_a: h.offset,
                        offset_b: s,
                    });
                }
            }
            PiecePair::Points(out)
        }
        (Prim::Arc(_), Prim::Segment(_)) => match piece_intersections(b, a, tol) {
            PiecePair::Points(v) => PiecePair::Points(
                v.into_iter()
                    .map(|c| PieceCrossing {
                        point: c.point,
                        offset_a: c.offset_b,
                        offset_b: c.offset_a,
                    })
                    .collect(),
            ),
            PiecePair::Overlap => PiecePair::Overlap,
        },
        (Prim::Arc(x), Prim::Arc(y)) => {
            let hits = circle_circle(x.center, x.radius, y.center, y.radius, eps);
            if hits.first().map(|h| h.1) == Some(ContactKind::Coincident) {
                return arc_overlap(x, y, eps);
            }
            let mut out = Vec::new();
            for (p, _) in hits {
                let sx = x.param_of_angle((p - x.center).angle(), eps / x.radius);
                let sy = y.param_of_angle((p - y.center).angle(), eps / y.radius);
                if let (Some(sx), Some(sy)) = (sx, sy) {
                    out.push(PieceCrossing {
                        point: p,
                        offset_a: sx,
                        offset_b: sy,
                    });
                }
            }
            PiecePair::Points(out)
        }
    }
}

/// Two arcs on the same circle: overlap or shared endpoints.
fn arc_overlap(x: &CircularArcPrim, y: &CircularArcPrim, eps: f64) -> PiecePair {
    let tol = eps / x.radius;
    // Represent both as counter-clockwise angular intervals.
    let ccw = |a: &CircularArcPrim| {
        if a.sweep >= 0.0 {
            (a.start_angle, a.sweep)
        } else {
            (a.end_angle(), -a.sweep)
        }
    };
    let (xs, xw) = ccw(x);
    let (ys, yw) = ccw(y);
    // overlap length of [xs, xs+xw] and [ys, ys+yw] on the circle
    let mut best = f64::NEG_INFINITY;
    for shift in [-TAU, 0.0, TAU] {
        let off = (ys - xs).rem_euclid(TAU) + shift;
        let lo = off.max(0.0);
        let hi = (off + yw).min(xw);
        best = best.max(hi - lo);
    }
    if best > tol {
        return PiecePair::Overlap;
    }
    let mut out = Vec::new();
    for p in [Prim::Arc(*y).start(), Prim::Arc(*y).end()] {
        if let Some(sx) = x.param_of_angle((p - x.center).angle(), tol) {
            let sy = y.param_of_angle((p - y.center).angle(), tol).unwrap_or(0.0);
            out.push(PieceCrossing {
                point: p,
                offset_a: sx,
                offset_b: sy,
            });
        }
    }
    PiecePair::Points(out)
}

/// Distance from `x` to the nearest piece of a chain.
pub fn distance_to_chain(chain: &[Prim], x: Point2) -> f64 {
    chain.iter().map(|p| p.nearest(x).1).fold(f64::INFINITY, f64::min)
}

/// Signed area enclosed by a closed chain (positive when counter-clockwise).
pub fn signed_area(chain: &[Prim]) -> f64 {
    let mut twice = 0.0;
    for p in chain {
        twice += match p {
            Prim::Segment(s) => s.from.cross(s.to),
            Prim::Arc(a) => a.center.cross(p.end() - p.start()) + a.radius * a.radius * a.sweep,
        };
    }
    0.5 * twice
}

/// Signed winding number of a closed chain around `x`.
///
/// Counter-clockwise turns count positive, so points inside a clockwise
/// loop get `-1`.
pub fn winding_number(chain: &[Prim], x: Point2, tol: &Tolerances) -> Result<i32, GeometryError> {
    let distance = distance_to_chain(chain, x);
    if distance < tol.eps_geom {
        return Err(GeometryError::PointOnCurve { distance });
    }
    Ok(winding_unchecked(chain, x))
}

/// Winding number by ray casting toward `+x`, without the on-curve check.
pub(crate) fn winding_unchecked(chain: &[Prim], x: Point2) -> i32 {
    winding_from_parts(&chain_parts(chain), x)
}

pub(crate) fn winding_from_parts(parts: &[MonotonePart], x: Point2) -> i32 {
    let mut w = 0;
    for part in parts {
        if let Some(cx) = part.crossing(x.y) {
            if cx > x.x {
                w += part.direction();
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::for_scale(1.0, 1.0)
    }

    fn unit_circle_cw() -> Vec<Prim> {
        // four clockwise quarter arcs starting at (0, 1)
        (0..4)
            .map(|k| Prim::arc(Point2::ORIGIN, 1.0, FRAC_PI_2 - k as f64 * FRAC_PI_2, -FRAC_PI_2))
            .collect()
    }

    #[test]
    fn disks_through_examples() {
        let t = tol();
        let one = disks_through(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), 1.0, &t).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].center.dist(Point2::ORIGIN) < 1e-12);

        let two = disks_through(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), SQRT_2, &t).unwrap();
        assert_eq!(two.len(), 2);
        let mut ys: Vec<f64> = two.iter().map(|d| d.center.y).collect();
        ys.sort_by(f64::total_cmp);
        assert!((ys[0] + 1.0).abs() < 1e-12 && (ys[1] - 1.0).abs() < 1e-12);
        assert!(two.iter().all(|d| d.center.x.abs() < 1e-12));

        let err = disks_through(Point2::ORIGIN, Point2::ORIGIN, 1.0, &t).unwrap_err();
        assert!(matches!(err, GeometryError::DegenerateChord { .. }));
        let err = disks_through(Point2::ORIGIN, Point2::new(3.0, 0.0), 1.0, &t).unwrap_err();
        assert!(matches!(err, GeometryError::ChordTooLong { .. }));
    }

    #[test]
    fn lens_membership() {
        let t = tol();
        let p = Point2::new(-1.0, 0.0);
        let lens = Lens::through(p, Point2::new(1.0, 0.0), SQRT_2, &t).unwrap();
        assert!(lens_contains(&lens, Point2::ORIGIN, &t));
        assert!(!lens_contains(&lens, Point2::new(2.0, 0.0), &t));
        assert!(lens_contains(&lens, p, &t));
    }

    #[test]
    fn piece_in_disk_examples() {
        let t = tol();
        let unit = Disk::new(Point2::ORIGIN, 1.0);
        let quarter = Prim::arc(Point2::ORIGIN, 1.0, 0.0, FRAC_PI_2);
        assert!(piece_in_disk(&quarter, &unit, &t));
        assert!(!piece_in_disk(
            &Prim::segment(Point2::new(-2.0, 0.0), Point2::new(2.0, 0.0)),
            &unit,
            &t
        ));
        assert!(piece_in_disk(
            &Prim::segment(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0)),
            &unit,
            &t
        ));
        // an arc bulging out of the disk through an interior extremum
        let bulge = Prim::arc(Point2::new(0.5, 0.0), 0.6, -1.0, 2.0);
        assert!(!piece_in_disk(&bulge, &unit, &t));
    }

    #[test]
    fn circle_segment_intersections() {
        let t = tol();
        let c = Disk::new(Point2::ORIGIN, 1.0);
        let hits = circle_piece_intersections(&c, &Prim::segment(Point2::new(-2.0, 0.0), Point2::new(2.0, 0.0)), &t);
        assert_eq!(hits.len(), 2);
        assert!(hits.iter().all(|h| h.kind == ContactKind::Transversal));
        assert!(hits.iter().any(|h| h.point.dist(Point2::new(-1.0, 0.0)) < 1e-12));
        assert!(hits.iter().any(|h| h.point.dist(Point2::new(1.0, 0.0)) < 1e-12));

        let hits = circle_piece_intersections(&c, &Prim::segment(Point2::new(-2.0, 1.0), Point2::new(2.0, 1.0)), &t);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].kind, ContactKind::Tangential);
        assert!(hits[0].point.dist(Point2::new(0.0, 1.0)) < 1e-12);

        let hits = circle_piece_intersections(&c, &Prim::segment(Point2::new(-2.0, 3.0), Point2::new(2.0, 3.0)), &t);
        assert!(hits.is_empty());
    }

    #[test]
    fn circle_arc_tangency() {
        let t = tol();
        let c = Disk::new(Point2::ORIGIN, 1.0);
        let outside = Prim::arc(Point2::new(3.0, 0.0), 2.0, 2.5, 1.5);
        let hits = circle_piece_intersections(&c, &outside, &t);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].kind, ContactKind::Tangential);
        assert!(hits[0].point.dist(Point2::new(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn winding_examples() {
        let t = tol();
        let c = unit_circle_cw();
        assert_eq!(winding_number(&c, Point2::ORIGIN, &t).unwrap(), -1);
        assert_eq!(winding_number(&c, Point2::new(3.0, 0.0), &t).unwrap(), 0);
        assert!(matches!(
            winding_number(&c, Point2::new(1.0, 0.0), &t),
            Err(GeometryError::PointOnCurve { .. })
        ));
        // ray through the junction at (1, 0)
        assert_eq!(winding_number(&c, Point2::new(0.5, 0.0), &t).unwrap(), -1);
        assert_eq!(winding_number(&c, Point2::new(-0.99, 0.0), &t).unwrap(), -1);
        assert_eq!(winding_number(&c, Point2::new(0.0, 0.999), &t).unwrap(), -1);
        assert_eq!(winding_number(&c, Point2::new(-3.0, 1.0), &t).unwrap(), 0);
    }

    #[test]
    fn trimming_and_reversal() {
        let arc = Prim::arc(Point2::new(1.0, 2.0), 2.0, 0.3, -1.2);
        let sub = arc.trim(0.5, 1.5);
        assert!((sub.length() - 1.0).abs() < 1e-12);
        assert!(sub.start().dist(arc.point_at(0.5)) < 1e-12);
        assert!(sub.end().dist(arc.point_at(1.5)) < 1e-12);
        let rev = arc.reversed();
        assert!(rev.start().dist(arc.end()) < 1e-12);
        assert!((rev.tangent_at(0.0) + arc.tangent_at(arc.length())).norm() < 1e-12);
    }

    #[test]
    fn overlapping_arcs_detected() {
        let t = tol();
        let a = Prim::arc(Point2::ORIGIN, 1.0, 0.0, 1.0);
        let b = Prim::arc(Point2::ORIGIN, 1.0, 0.5, 1.0);
        assert_eq!(piece_intersections(&a, &b, &t), PiecePair::Overlap);
        let c = Prim::arc(Point2::ORIGIN, 1.0, 1.0, 1.0);
        match piece_intersections(&a, &c, &t) {
            PiecePair::Points(v) => assert_eq!(v.len(), 1),
            PiecePair::Overlap => panic!("touching arcs reported as overlap"),
        }
    }
}
