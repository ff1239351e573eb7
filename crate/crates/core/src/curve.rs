//! Closed arc-splines of bounded curvature.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    chain_parts, piece_intersections, winding_from_parts, MonotonePart, PiecePair, Point2, Prim, Similarity, Tolerances,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("loop has no pieces")]
    Empty,
    #[error("curvature bound must be positive and finite, got {0}")]
    BadKappa(f64),
    #[error("piece {index} is degenerate")]
    DegeneratePiece { index: usize },
    #[error("loop is not closed: gap {gap:e} after piece {index}")]
    NotClosed { index: usize, gap: f64 },
    #[error("tangent jumps by {defect:e} rad at junction {junction}")]
    NotC1 { junction: usize, defect: f64 },
    #[error("piece {index} has curvature {curvature} above kappa {kappa}")]
    CurvatureExceeded { index: usize, curvature: f64, kappa: f64 },
    #[error("pieces {a} and {b} intersect near ({x}, {y})")]
    SelfIntersecting { a: usize, b: usize, x: f64, y: f64 },
    #[error("loop is counter-clockwise (total turning {turning}); pass auto_reverse to flip it")]
    WrongOrientation { turning: f64 },
    #[error("total turning {turning} is not -2 pi")]
    BadTurning { turning: f64 },
    #[error("loop length {length} is below 2 pi r = {min}")]
    TooShort { length: f64, min: f64 },
    #[error("interval [{t1}, {t2}] is degenerate")]
    DegenerateInterval { t1: f64, t2: f64 },
}

/// One piece of a loop together with its curvature and length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub geometry: Prim,
    pub signed_curvature: f64,
    pub length: f64,
}

impl Piece {
    pub fn new(geometry: Prim) -> Self {
        Self {
            geometry,
            signed_curvature: geometry.signed_curvature(),
            length: geometry.length(),
        }
    }
}

/// Point, unit tangent and inward unit normal (right of the tangent, since
/// loops run clockwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub point: Point2,
    pub tangent: Point2,
    pub normal: Point2,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Flip a counter-clockwise input instead of rejecting it.
    pub auto_reverse: bool,
    /// Maximum tangent jump at a junction, radians.
    pub c1_tolerance: f64,
    /// Overrides the default tolerances derived from `r` and the length.
    pub tolerances: Option<Tolerances>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            auto_reverse: false,
            c1_tolerance: 1e-7,
            tolerances: None,
        }
    }
}

/// A validated clockwise, simple, C¹ loop with `|curvature| <= kappa`.
#[derive(Debug, Clone)]
pub struct Loop {
    pieces: Vec<Piece>,
    prims: Vec<Prim>,
    parts: Vec<MonotonePart>,
    kappa: f64,
    total_length: f64,
    cumulative: Vec<f64>,
    tol: Tolerances,
}

/// An open sub-curve of a loop, traversed in loop orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenCurve {
    pub pieces: Vec<Prim>,
    pub t_start: f64,
    pub length: f64,
}

impl OpenCurve {
    pub fn start(&self) -> Point2 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Point2 {
        self.pieces[self.pieces.len() - 1].end()
    }

    /// Point at arc-length offset `s` from the start.
    pub fn point_at(&self, s: f64) -> Point2 {
        let mut rest = s;
        for p in &self.pieces {
            let len = p.length();
            if rest <= len {
                return p.point_at(rest.max(0.0));
            }
            rest -= len;
        }
        self.end()
    }
}

fn angle_between(a: Point2, b: Point2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

impl Loop {
    pub fn new(prims: Vec<Prim>, kappa: f64) -> Result<Loop, CurveError> {
        Self::validate(prims, kappa, ValidateOptions::default())
    }

    /// Checks every loop invariant and builds the arc-length index.
    pub fn validate(prims: Vec<Prim>, kappa: f64, opts: ValidateOptions) -> Result<Loop, CurveError> {
        if prims.is_empty() {
            return Err(CurveError::Empty);
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(CurveError::BadKappa(kappa));
        }
        let r = 1.0 / kappa;
        for (index, p) in prims.iter().enumerate() {
            let len = p.length();
            let finite = p.start().is_finite() && p.end().is_finite() && len.is_finite();
            if !finite || len <= 0.0 {
                return Err(CurveError::DegeneratePiece { index });
            }
        }
        let total: f64 = prims.iter().map(Prim::length).sum();
        let tol = opts.tolerances.unwrap_or_else(|| Tolerances::for_scale(r, total));
        let n = prims.len();

        for i in 0..n {
            let gap = prims[i].end().dist(prims[(i + 1) % n].start());
            if gap > tol.eps_geom {
                return Err(CurveError::NotClosed { index: i, gap });
            }
        }
        let mut junction_turning = 0.0;
        for i in 0..n {
            let a = prims[i].tangent_at(prims[i].length());
            let b = prims[(i + 1) % n].tangent_at(0.0);
            let defect = angle_between(a, b);
            if defect.abs() > opts.c1_tolerance {
                return Err(CurveError::NotC1 {
                    junction: i,
                    defect: defect.abs(),
                });
            }
            junction_turning += defect;
        }
        for (index, p) in prims.iter().enumerate() {
            let k = p.signed_curvature().abs();
            if k > kappa * (1.0 + 1e-9) {
                return Err(CurveError::CurvatureExceeded {
                    index,
                    curvature: k,
                    kappa,
                });
            }
        }
        check_simple(&prims, r, &tol)?;

        let turning: f64 = prims.iter().map(Prim::turning).sum::<f64>() + junction_turning;
        let prims = if (turning + TAU).abs() < 1e-6 {
            prims
        } else if (turning - TAU).abs() < 1e-6 {
            if !opts.auto_reverse {
                return Err(CurveError::WrongOrientation { turning });
            }
            prims.iter().rev().map(Prim::reversed).collect()
        } else {
            return Err(CurveError::BadTurning { turning });
        };

        let min = TAU * r;
        if total < min - tol.eps_geom {
            return Err(CurveError::TooShort { length: total, min });
        }
        Ok(Self::assemble(prims, kappa, tol))
    }

    fn assemble(prims: Vec<Prim>, kappa: f64, tol: Tolerances) -> Loop {
        let pieces: Vec<Piece> = prims.iter().copied().map(Piece::new).collect();
        let mut cumulative = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for p in &pieces {
            acc += p.length;
            cumulative.push(acc);
        }
        let parts = chain_parts(&prims);
        Loop {
            pieces,
            prims,
            parts,
            kappa,
            total_length: acc,
            cumulative,
            tol,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn prims(&self) -> &[Prim] {
        &self.prims
    }

    pub(crate) fn monotone_parts(&self) -> &[MonotonePart] {
        &self.parts
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Radius of the rolling disk, `1 / kappa`.
    pub fn r(&self) -> f64 {
        1.0 / self.kappa
    }

    pub fn length(&self) -> f64 {
        self.total_length
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Parameters where pieces meet, in increasing order (starts with 0).
    pub fn junctions(&self) -> &[f64] {
        &self.cumulative[..self.pieces.len()]
    }

    pub fn wrap(&self, t: f64) -> f64 {
        let w = t.rem_euclid(self.total_length);
        if w >= self.total_length {
            0.0
        } else {
            w
        }
    }

    /// Forward arc length from `t1` to `t2`, in `[0, L)`.
    pub fn forward_distance(&self, t1: f64, t2: f64) -> f64 {
        self.wrap(t2 - t1)
    }

    /// Shortest cyclic distance between two parameters.
    pub fn cyclic_distance(&self, t1: f64, t2: f64) -> f64 {
        let d = self.forward_distance(t1, t2);
        d.min(self.total_length - d)
    }

    /// Piece index and offset of parameter `t`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let t = self.wrap(t);
        let i = match self.cumulative.binary_search_by(|c| c.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
        .min(self.pieces.len() - 1);
        (i, (t - self.cumulative[i]).clamp(0.0, self.pieces[i].length))
    }

    pub fn piece_start(&self, index: usize) -> f64 {
        self.cumulative[index]
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        let (i, s) = self.locate(t);
        self.prims[i].point_at(s)
    }

    pub fn tangent_at(&self, t: f64) -> Point2 {
        let (i, s) = self.locate(t);
        self.prims[i].tangent_at(s)
    }

    pub fn frame_at(&self, t: f64) -> Frame {
        let (i, s) = self.locate(t);
        let tangent = self.prims[i].tangent_at(s);
        Frame {
            point: self.prims[i].point_at(s),
            tangent,
            normal: -tangent.perp(),
        }
    }

    /// Signed curvature of the piece containing `t`.
    pub fn curvature_at(&self, t: f64) -> f64 {
        self.pieces[self.locate(t).0].signed_curvature
    }

    /// Trimmed chain from `t1` forward to `t2`.
    pub fn subcurve(&self, t1: f64, t2: f64) -> Result<OpenCurve, CurveError> {
        let length = self.forward_distance(t1, t2);
        if length < self.tol.eps_param || self.total_length - length < self.tol.eps_param {
            return Err(CurveError::DegenerateInterval { t1, t2 });
        }
        Ok(self.subcurve_len(t1, length))
    }

    /// Trimmed chain of the given length starting at `t1`.
    pub(crate) fn subcurve_len(&self, t1: f64, length: f64) -> OpenCurve {
        let t1 = self.wrap(t1);
        let (mut i, mut s) = self.locate(t1);
        let mut remaining = length;
        let mut pieces = Vec::new();
        let tiny = 1e-13 * self.total_length;
        while remaining > tiny {
            let len = self.pieces[i].length;
            let take = (len - s).min(remaining);
            if take > tiny || pieces.is_empty() {
                pieces.push(if s <= 0.0 && take >= len {
                    self.prims[i]
                } else {
                    self.prims[i].trim(s, s + take)
                });
            }
            remaining -= take;
            i = (i + 1) % self.pieces.len();
            s = 0.0;
        }
        if pieces.is_empty() {
            pieces.push(self.prims[i].trim(s, s));
        }
        OpenCurve {
            pieces,
            t_start: t1,
            length,
        }
    }

    /// Visits the trimmed pieces of the sub-curve of length `length` starting
    /// at `t1`, passing each with the loop parameter of its start.
    pub(crate) fn walk(&self, t1: f64, length: f64, mut f: impl FnMut(&Prim, f64)) {
        let (mut i, mut s) = self.locate(t1);
        let mut t = self.wrap(t1);
        let mut remaining = length;
        let tiny = 1e-13 * self.total_length;
        while remaining > tiny {
            let len = self.pieces[i].length;
            let take = (len - s).min(remaining);
            if take > tiny {
                if s <= 0.0 && take >= len {
                    f(&self.prims[i], t);
                } else {
                    f(&self.prims[i].trim(s, s + take), t);
                }
            }
            remaining -= take;
            t += take;
            i = (i + 1) % self.pieces.len();
            s = 0.0;
        }
    }

    /// Unwrapped tangent heading at offset `s` along the loop from `t0`,
    /// relative to the heading at `t0`.
    pub fn turning_between(&self, t0: f64, s: f64) -> f64 {
        let mut total = 0.0;
        let mut last: Option<Point2> = None;
        self.walk(t0, s, |p, _| {
            if let Some(prev) = last {
                total += angle_between(prev, p.tangent_at(0.0));
            }
            total += p.turning();
            last = Some(p.tangent_at(p.length()));
        });
        total
    }

    /// Convex iff the curvature never turns counter-clockwise.
    pub fn is_convex(&self) -> bool {
        self.pieces.iter().all(|p| p.signed_curvature <= 1e-12 * self.kappa)
    }

    /// Winding number of the loop around `x` (`-1` inside, `0` outside).
    pub fn winding(&self, x: Point2) -> i32 {
        winding_from_parts(&self.parts, x)
    }

    pub fn distance(&self, x: Point2) -> f64 {
        crate::geometry::distance_to_chain(&self.prims, x)
    }

    /// Nearest loop parameter to `x` and its distance.
    pub fn nearest(&self, x: Point2) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for (i, p) in self.prims.iter().enumerate() {
            let (s, d) = p.nearest(x);
            if d < best.1 {
                best = (self.cumulative[i] + s, d);
            }
        }
        (self.wrap(best.0), best.1)
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        bbox_of(&self.prims)
    }

    /// The same loop under a similarity transform, re-validated with the
    /// curvature bound scaled accordingly.
    pub fn transformed(&self, t: &Similarity) -> Result<Loop, CurveError> {
        let prims = self.prims.iter().map(|p| p.transformed(t)).collect();
        Loop::new(prims, self.kappa / t.scale)
    }

    /// Re-analyses the same geometry under a different curvature bound.
    pub fn with_kappa(&self, kappa: f64) -> Result<Loop, CurveError> {
        Loop::new(self.prims.clone(), kappa)
    }
}

pub(crate) fn bbox_of(prims: &[Prim]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in prims {
        let (a, b) = p.bbox();
        lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    (lo, hi)
}

/// Pairwise piece intersection test; neighbours may only meet at their
/// shared junction.
pub(crate) fn check_simple(prims: &[Prim], r: f64, tol: &Tolerances) -> Result<(), CurveError> {
    let n = prims.len();
    let slack = (1e-6 * r).max(10.0 * tol.eps_geom);
    let boxes: Vec<(Point2, Point2)> = prims.iter().map(Prim::bbox).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (boxes[i], boxes[j]);
            let e = 2.0 * tol.eps_geom;
            if a.0.x > b.1.x + e || b.0.x > a.1.x + e || a.0.y > b.1.y + e || b.0.y > a.1.y + e {
                continue;
            }
            let mut shared = Vec::new();
            if j == i + 1 {
                shared.push(prims[i].end());
            }
            if i == 0 && j == n - 1 {
                shared.push(prims[0].start());
            }
            let fail = |p: Point2| CurveError::SelfIntersecting {
                a: i,
                b: j,
                x: p.x,
                y: p.y,
            };
            match piece_intersections(&prims[i], &prims[j], tol) {
                PiecePair::Overlap => return Err(fail(prims[j].start())),
                PiecePair::Points(points) => {
                    for c in points {
                        if !shared.iter().any(|s| s.dist(c.point) <= slack) {
                            return Err(fail(c.point));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Builds tangent-continuous arc-splines from straight runs and turns.
#[derive(Debug, Clone)]
pub struct Turtle {
    pos: Point2,
    heading: f64,
    prims: Vec<Prim>,
}

impl Turtle {
    pub fn new(pos: Point2, heading: f64) -> Self {
        Self {
            pos,
            heading,
            prims: Vec::new(),
        }
    }

    pub fn pos(&self) -> Point2 {
        self.pos
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn forward(&mut self, len: f64) -> &mut Self {
        assert!(len >= 0.0, "negative run length {len}");
        if len > 0.0 {
            let to = self.pos + Point2::from_angle(self.heading) * len;
            self.prims.push(Prim::segment(self.pos, to));
            self.pos = to;
        }
        self
    }

    /// Turns by `angle` on a circle of `radius`; positive angles turn left.
    pub fn turn(&mut self, radius: f64, angle: f64) -> &mut Self {
        if angle == 0.0 {
            return self;
        }
        let dir = Point2::from_angle(self.heading);
        let side = angle.signum();
        let center = self.pos + dir.perp() * (radius * side);
        let start_angle = (self.pos - center).angle();
        let arc = Prim::arc(center, radius, start_angle, angle);
        self.pos = arc.end();
        self.heading += angle;
        self.prims.push(arc);
        self
    }

    pub fn left(&mut self, radius: f64, angle: f64) -> &mut Self {
        self.turn(radius, angle.abs())
    }

    pub fn right(&mut self, radius: f64, angle: f64) -> &mut Self {
        self.turn(radius, -angle.abs())
    }

    pub fn prims(&self) -> &[Prim] {
        &self.prims
    }

    pub fn finish(self) -> Vec<Prim> {
        self.prims
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn circle(radius: f64) -> Vec<Prim> {
        (0..4)
            .map(|k| Prim::arc(Point2::ORIGIN, radius, FRAC_PI_2 - k as f64 * FRAC_PI_2, -FRAC_PI_2))
            .collect()
    }

    fn stadium() -> Vec<Prim> {
        let mut t = Turtle::new(Point2::new(-1.0, 1.0), 0.0);
        t.forward(2.0).right(1.0, PI).forward(2.0).right(1.0, PI);
        t.finish()
    }

    #[test]
    fn validates_unit_circle() {
        let l = Loop::new(circle(1.0), 1.0).unwrap();
        assert!((l.length() - TAU).abs() < 1e-12);
        assert!(l.point_at(0.0).dist(Point2::new(0.0, 1.0)) < 1e-12);
        assert!(l.point_at(FRAC_PI_2).dist(Point2::new(1.0, 0.0)) < 1e-12);
        assert_eq!(l.winding(Point2::ORIGIN), -1);
    }

    #[test]
    fn rejects_tight_circle() {
        let err = Loop::new(circle(0.5), 1.0).unwrap_err();
        assert!(matches!(err, CurveError::CurvatureExceeded { index: 0, .. }));
    }

    #[test]
    fn stadium_length_and_tangents() {
        let l = Loop::new(stadium(), 1.0).unwrap();
        assert!((l.length() - (TAU + 4.0)).abs() < 1e-12);
        let t0 = l.tangent_at(0.1);
        assert!((l.tangent_at(1.9) - t0).norm() < 1e-12);
        assert!(l.is_convex());
    }

    #[test]
    fn rejects_open_and_reversed_chains() {
        let mut open = circle(1.0);
        open.pop();
        assert!(matches!(Loop::new(open, 1.0), Err(CurveError::NotClosed { .. })));

        let ccw: Vec<Prim> = circle(1.0).iter().rev().map(Prim::reversed).collect();
        assert!(matches!(
            Loop::new(ccw.clone(), 1.0),
            Err(CurveError::WrongOrientation { .. })
        ));
        let opts = ValidateOptions {
            auto_reverse: true,
            ..Default::default()
        };
        let l = Loop::validate(ccw, 1.0, opts).unwrap();
        assert_eq!(l.winding(Point2::ORIGIN), -1);
    }

    #[test]
    fn rejects_kinks_and_crossings() {
        // square corners are not C1
        let sq = vec![
            Prim::segment(Point2::new(0.0, 0.0), Point2::new(0.0, 9.0)),
            Prim::segment(Point2::new(0.0, 9.0), Point2::new(9.0, 9.0)),
            Prim::segment(Point2::new(9.0, 9.0), Point2::new(9.0, 0.0)),
            Prim::segment(Point2::new(9.0, 0.0), Point2::new(0.0, 0.0)),
        ];
        assert!(matches!(Loop::new(sq, 1.0), Err(CurveError::NotC1 { .. })));

        // figure eight: two tangent circles traversed in opposite senses
        let mut t = Turtle::new(Point2::ORIGIN, 0.0);
        t.right(1.0, TAU).left(1.0, TAU);
        let err = Loop::new(t.finish(), 1.0).unwrap_err();
        assert!(matches!(
            err,
            CurveError::SelfIntersecting { .. } | CurveError::BadTurning { .. }
        ));
    }

    #[test]
    fn subcurve_complements() {
        let l = Loop::new(circle(1.0), 1.0).unwrap();
        let a = l.subcurve(0.0, PI).unwrap();
        let b = l.subcurve(PI, 0.0).unwrap();
        assert!((a.length - PI).abs() < 1e-12);
        assert!((b.length - PI).abs() < 1e-12);
        assert!((a.length + b.length - l.length()).abs() < 1e-12);
        let sum: f64 = a.pieces.iter().map(Prim::length).sum();
        assert!((sum - PI).abs() < 1e-12);
        assert!(a.end().dist(Point2::new(0.0, -1.0)) < 1e-12);
        assert!(matches!(
            l.subcurve(1.0, 1.0),
            Err(CurveError::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn turtle_closes_rotational_motifs() {
        let mut t = Turtle::new(Point2::ORIGIN, 0.0);
        for _ in 0..5 {
            t.forward(1.0).right(1.0, TAU / 5.0);
        }
        let prims = t.finish();
        assert!(prims.last().unwrap().end().dist(Point2::ORIGIN) < 1e-12);
        assert!(Loop::new(prims, 1.0).unwrap().is_convex());
    }
}
