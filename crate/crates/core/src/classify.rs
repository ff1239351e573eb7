//! Short / long / simple sub-curves, essential terminals, long arcs and ends.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::Loop;
use crate::geometry::{distance_to_chain, winding_unchecked, Disk, Lens, Point2, Prim};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("terminals coincide (chord {chord:e})")]
    DegenerateChord { chord: f64 },
    #[error("sub-curve [{t1}, {t2}] is not long")]
    NotLong { t1: f64, t2: f64 },
    #[error("end search failed: {0}")]
    SearchFailed(String),
    #[error("half disk leaves the enclosed region at ({x}, {y})")]
    ContainmentViolated { x: f64, y: f64 },
    #[error("no direction with three parallel tangents at this resolution")]
    WitnessNotFound,
    #[error("no long arc found at sweep resolution")]
    NoLongArc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcClass {
    pub is_short: bool,
    pub is_long: bool,
    pub is_simple: bool,
    pub chord: f64,
    /// Parameter and position of the worst lens violation; present iff long.
    pub witness_outside: Option<(f64, Point2)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminalPair {
    pub t1: f64,
    pub t2: f64,
    pub class_12: ArcClass,
    pub class_21: ArcClass,
    pub essential: bool,
}

impl TerminalPair {
    pub fn chord(&self) -> f64 {
        self.class_12.chord
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct End {
    pub t1: f64,
    pub t2: f64,
    pub circle: Disk,
    pub length: f64,
    pub essential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub a: Point2,
    pub b: Point2,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelTangentPair {
    pub t1: f64,
    pub t2: f64,
}

/// Closed half disk: centre on the chord, bulging along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfDisk {
    pub center: Point2,
    pub radius: f64,
    pub direction: Point2,
}

impl HalfDisk {
    pub fn contains(&self, x: Point2, eps: f64) -> bool {
        let v = x - self.center;
        v.norm() <= self.radius + eps && v.dot(self.direction) >= -eps
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Grid size per parameter for pair sweeps.
    pub n: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { n: 512 }
    }
}

/// Largest excess of the sub-curve beyond the disks, with its location.
fn lens_violation(l: &Loop, t1: f64, len: f64, disks: &[Disk]) -> (f64, f64, Point2) {
    let mut worst = (f64::NEG_INFINITY, t1, l.point_at(t1));
    l.walk(t1, len, |p, t0| {
        for d in disks {
            let (s, dist) = p.farthest(d.center);
            let v = dist - d.radius;
            if v > worst.0 {
                worst = (v, t0 + s, p.point_at(s));
            }
        }
    });
    worst
}

pub fn classify_subcurve(l: &Loop, t1: f64, t2: f64) -> Result<ArcClass, ClassifyError> {
    let tol = l.tolerances();
    let r = l.r();
    let (a, b) = (l.point_at(t1), l.point_at(t2));
    let chord = a.dist(b);
    let len = l.forward_distance(t1, t2);
    if chord <= tol.eps_geom || len < tol.eps_param || l.length() - len < tol.eps_param {
        return Err(ClassifyError::DegenerateChord { chord });
    }
    if chord >= 2.0 * r - tol.eps_geom {
        let is_short = chord <= 2.0 * r + tol.eps_geom && {
            let d = Disk::new(a.midpoint(b), r);
            lens_violation(l, t1, len, &[d]).0 <= tol.eps_geom
        };
        return Ok(ArcClass {
            is_short,
            is_long: false,
            is_simple: true,
            chord,
            witness_outside: None,
        });
    }
    let lens = Lens::through(a, b, r, tol).map_err(|_| ClassifyError::DegenerateChord { chord })?;
    let (v, t, p) = lens_violation(l, t1, len, &lens.disks());
    let is_short = v <= tol.eps_geom;
    Ok(ArcClass {
        is_short,
        is_long: !is_short,
        is_simple: false,
        chord,
        witness_outside: (!is_short).then(|| (l.wrap(t), p)),
    })
}

pub fn is_essential(l: &Loop, t1: f64, t2: f64) -> Result<TerminalPair, ClassifyError> {
    let class_12 = classify_subcurve(l, t1, t2)?;
    let class_21 = classify_subcurve(l, t2, t1)?;
    Ok(TerminalPair {
        t1: l.wrap(t1),
        t2: l.wrap(t2),
        class_12,
        class_21,
        essential: class_12.is_long && class_21.is_long,
    })
}

/// Cheap essential test that bails out on the first non-long side.
fn quick_essential(l: &Loop, t1: f64, t2: f64) -> bool {
    let tol = l.tolerances();
    let (a, b) = (l.point_at(t1), l.point_at(t2));
    let chord = a.dist(b);
    if chord <= tol.eps_geom || chord >= 2.0 * l.r() - tol.eps_geom {
        return false;
    }
    let Ok(lens) = Lens::through(a, b, l.r(), tol) else {
        return false;
    };
    let disks = lens.disks();
    let len = l.forward_distance(t1, t2);
    if len < tol.eps_param || l.length() - len < tol.eps_param {
        return false;
    }
    // the shorter side is more often short, so test it first
    let (first, second) = if len <= l.length() - len {
        ((t1, len), (t2, l.length() - len))
    } else {
        ((t2, l.length() - len), (t1, len))
    };
    lens_violation(l, first.0, first.1, &disks).0 > tol.eps_geom
        && lens_violation(l, second.0, second.1, &disks).0 > tol.eps_geom
}

/// Whether the straight chord between the terminals meets the sub-curve
/// only at its ends, so that sub-curve plus chord bound a disk.
pub fn is_arc(l: &Loop, t1: f64, t2: f64) -> bool {
    let (a, b) = (l.point_at(t1), l.point_at(t2));
    let chord = Prim::segment(a, b);
    let tol = l.tolerances();
    let slack = 1e-6 * l.r();
    let mut clean = true;
    l.walk(t1, l.forward_distance(t1, t2), |p, _| {
        if !clean {
            return;
        }
        match crate::geometry::piece_intersections(&chord, p, tol) {
            crate::geometry::PiecePair::Overlap => clean = false,
            crate::geometry::PiecePair::Points(pts) => {
                if pts.iter().any(|c| c.point.dist(a) > slack && c.point.dist(b) > slack) {
                    clean = false;
                }
            }
        }
    });
    clean
}

fn grid(l: &Loop, n: usize) -> Vec<f64> {
    (0..n).map(|i| l.length() * i as f64 / n as f64).collect()
}

/// Raw essential grid cells `(i, j)` with `i < j`, in lexicographic order.
pub(crate) fn essential_cells(l: &Loop, n: usize) -> Vec<(f64, f64)> {
    let ts = grid(l, n);
    let two_r = 2.0 * l.r();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = l.point_at(ts[i]);
            let mut row = Vec::new();
            for j in (i + 1)..n {
                if a.dist(l.point_at(ts[j])) < two_r && quick_essential(l, ts[i], ts[j]) {
                    row.push((ts[i], ts[j]));
                }
            }
            row
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn golden_min(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Moves an essential pair toward a local chord minimum, staying essential.
fn refine_pair(l: &Loop, t1: f64, t2: f64, window: f64) -> (f64, f64) {
    let chord = |u: f64, v: f64| {
        if quick_essential(l, u, v) {
            l.point_at(u).dist(l.point_at(v))
        } else {
            f64::INFINITY
        }
    };
    let (mut u, mut v) = (t1, t2);
    let mut best = chord(u, v);
    let mut w = window;
    for _ in 0..4 {
        let (nu, cu) = golden_min(u - w, u + w, 40, |x| chord(x, v));
        if cu < best {
            u = nu;
            best = cu;
        }
        let (nv, cv) = golden_min(v - w, v + w, 40, |x| chord(u, x));
        if cv < best {
            v = nv;
            best = cv;
        }
        w *= 0.5;
    }
    (l.wrap(u), l.wrap(v))
}

/// Overlap of cyclic interval `[a, a + la)` with `[b, b + lb)` on a loop of length `total`.
fn cyclic_overlap(a: f64, la: f64, b: f64, lb: f64, total: f64) -> f64 {
    let piece = |s: f64, e: f64, s2: f64, e2: f64| (e.min(e2) - s.max(s2)).max(0.0);
    let mut sum = 0.0;
    for shift in [-total, 0.0, total] {
        sum += piece(a, a + la, b + shift, b + shift + lb);
    }
    sum
}

/// Whether two terminal pairs cut the loop into mostly the same two arcs.
pub(crate) fn same_family(l: &Loop, p: (f64, f64), q: (f64, f64)) -> bool {
    let total = l.length();
    let arcs = |(u, v): (f64, f64)| {
        let d = l.forward_distance(u, v);
        [(u, d), (v, total - d)]
    };
    let (pa, qa) = (arcs(p), arcs(q));
    let matches = |x: (f64, f64), y: (f64, f64)| cyclic_overlap(x.0, x.1, y.0, y.1, total) >= 0.5 * x.1.max(y.1);
    (matches(pa[0], qa[0]) && matches(pa[1], qa[1])) || (matches(pa[0], qa[1]) && matches(pa[1], qa[0]))
}

/// One representative essential pair per family, sorted by chord length.
pub fn find_essential_pairs(l: &Loop, opts: &SweepOptions) -> Vec<TerminalPair> {
    let cells = essential_cells(l, opts.n);
    let mut sorted: Vec<(f64, (f64, f64))> = cells
        .iter()
        .map(|&(u, v)| (l.point_at(u).dist(l.point_at(v)), (u, v)))
        .collect();
    sorted.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1 .0.total_cmp(&b.1 .0))
            .then(a.1 .1.total_cmp(&b.1 .1))
    });
    let mut reps: Vec<(f64, f64)> = Vec::new();
    for (_, p) in sorted {
        if !reps.iter().any(|&q| same_family(l, p, q)) {
            reps.push(p);
        }
    }
    let step = l.length() / opts.n as f64;
    let mut out: Vec<TerminalPair> = reps
        .par_iter()
        .map(|&(u, v)| {
            let (u, v) = refine_pair(l, u, v, step);
            is_essential(l, u, v).expect("refined pair keeps distinct terminals")
        })
        .filter(|p| p.essential)
        .collect();
    out.sort_by(|a, b| a.chord().total_cmp(&b.chord()).then(a.t1.total_cmp(&b.t1)));
    out
}

/// Shortest long sub-curve on the sweep grid whose chord meets it only at
/// the terminals.
pub fn find_long_arc(l: &Loop, opts: &SweepOptions) -> Result<(f64, f64), ClassifyError> {
    let ts = grid(l, opts.n);
    let n = ts.len();
    let two_r = 2.0 * l.r();
    let best = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let a = l.point_at(ts[i]);
            for k in 1..n {
                let tj = ts[(i + k) % n];
                if a.dist(l.point_at(tj)) >= two_r {
                    continue;
                }
                let Ok(c) = classify_subcurve(l, ts[i], tj) else {
                    continue;
                };
                if c.is_long && is_arc(l, ts[i], tj) {
                    return Some((l.forward_distance(ts[i], tj), ts[i], tj));
                }
            }
            None
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    best.map(|(_, a, b)| (a, b)).ok_or(ClassifyError::NoLongArc)
}

/// Whether some interior point of the sub-curve reaches the circle on the
/// chord `a..b` (chord `2r`).
fn reaches_beyond(l: &Loop, a: f64, b: f64) -> bool {
    let r = l.r();
    let len = l.forward_distance(a, b);
    let delta = 1e-4 * r;
    if len <= 2.0 * delta {
        return false;
    }
    let m = l.point_at(a).midpoint(l.point_at(b));
    let mut far = f64::NEG_INFINITY;
    l.walk(a + delta, len - 2.0 * delta, |p, _| {
        far = far.max(p.farthest(m).1);
    });
    far >= r - l.tolerances().eps_geom
}

/// Shortest valid end length starting at `a` within `[a, limit]`, with its far terminal.
fn end_from(l: &Loop, a: f64, span: f64, step: f64) -> Option<(f64, f64)> {
    let two_r = 2.0 * l.r();
    let touch = 1e3 * l.tolerances().eps_geom;
    let pa = l.point_at(a);
    let f = |s: f64| pa.dist(l.point_at(a + s)) - two_r;
    let accept = |root: f64| reaches_beyond(l, a, a + root).then(|| (root, l.wrap(a + root)));
    let (mut s_pp, mut f_pp) = (f64::NAN, f64::NAN);
    let (mut s_prev, mut f_prev) = (0.0, f(0.0));
    let mut s = 0.0;
    while s < span {
        s = (s + step).min(span);
        let fs = f(s);
        if (f_prev < 0.0) != (fs < 0.0) || fs == 0.0 {
            let (mut lo, mut hi) = (s_prev, s);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (f(mid) < 0.0) == (f_prev < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if let Some(e) = accept(0.5 * (lo + hi)) {
                return Some(e);
            }
        } else if f_prev > f_pp && f_prev >= fs && f_prev < 0.0 && f_prev > -0.05 * two_r {
            // chord touching 2r from below without crossing
            let (x, v) = golden_min(s_pp, s, 80, |x| -f(x));
            if -v >= -touch {
                if let Some(e) = accept(x) {
                    return Some(e);
                }
            }
        }
        (s_pp, f_pp) = (s_prev, f_prev);
        (s_prev, f_prev) = (s, fs);
    }
    // touch at the far end of the span
    if f_prev < 0.0 && f_prev >= -touch {
        return accept(s_prev);
    }
    None
}

/// Whether the open sub-curve `(a, a + len)` contains an essential pair on a `k`-grid.
fn has_inner_essential(l: &Loop, a: f64, len: f64, k: usize) -> bool {
    let inset = 1e-3 * len;
    let ts: Vec<f64> = (0..k)
        .map(|i| a + inset + (len - 2.0 * inset) * i as f64 / (k - 1) as f64)
        .collect();
    (0..k)
        .into_par_iter()
        .any(|i| ((i + 1)..k).any(|j| quick_essential(l, ts[i], ts[j])))
}

/// Minimal long sub-arc of `[t1, t2]` with terminals `2r` apart.
pub fn find_end(l: &Loop, t1: f64, t2: f64) -> Result<End, ClassifyError> {
    let class = classify_subcurve(l, t1, t2)?;
    if !class.is_long {
        return Err(ClassifyError::NotLong { t1, t2 });
    }
    let span = l.forward_distance(t1, t2);
    let r = l.r();
    let step = (span / 400.0).min(r / 32.0);
    let m = (span / step).ceil() as usize;
    let mut cands: Vec<(f64, f64)> = (0..=m)
        .into_par_iter()
        .filter_map(|i| {
            let off = (i as f64 * step).min(span);
            end_from(l, t1 + off, span - off, step).map(|(len, _)| (len, off))
        })
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    for &(_, off) in cands.iter().take(8) {
        let lo = (off - step).max(0.0);
        let hi = (off + step).min(span);
        let cost = |o: f64| end_from(l, t1 + o, span - o, step / 8.0).map_or(f64::INFINITY, |e| e.0);
        let (o, len) = golden_min(lo, hi, 50, cost);
        let (o, len) = if len.is_finite() { (o, len) } else { (off, cost(off)) };
        if !len.is_finite() {
            continue;
        }
        let a = l.wrap(t1 + o);
        let b = l.wrap(a + len);
        if has_inner_essential(l, a, len, 96) {
            continue;
        }
        let center = l.point_at(a).midpoint(l.point_at(b));
        let essential = class.is_long && classify_subcurve(l, t2, t1).map(|c| c.is_long).unwrap_or(false);
        return Ok(End {
            t1: a,
            t2: b,
            circle: Disk::new(center, r),
            length: len,
            essential,
        });
    }
    Err(ClassifyError::SearchFailed(format!(
        "{} candidates on [{t1}, {t2}], none free of essential pairs",
        cands.len()
    )))
}

/// Closed chain of an end followed by its chord.
fn end_chain(l: &Loop, end: &End) -> Vec<Prim> {
    let mut chain = l.subcurve_len(end.t1, end.length).pieces;
    chain.push(Prim::segment(l.point_at(end.t2), l.point_at(end.t1)));
    chain
}

pub fn half_disk(l: &Loop, end: &End) -> HalfDisk {
    let (a, b) = (l.point_at(end.t1), l.point_at(end.t2));
    let m = a.midpoint(b);
    let n = (b - a).normalized().perp();
    let chain = end_chain(l, end);
    let probe = 1e-3 * l.r();
    let direction = if winding_unchecked(&chain, m + n * probe) != 0 {
        n
    } else {
        -n
    };
    HalfDisk {
        center: m,
        radius: l.r(),
        direction,
    }
}

/// Samples the half disk on a polar grid (boundary included) and checks
/// each sample lies in the region bounded by the end and its chord.
pub fn verify_half_disk(l: &Loop, end: &End) -> Result<HalfDisk, ClassifyError> {
    let h = half_disk(l, end);
    let chain = end_chain(l, end);
    let eps = l.tolerances().eps_geom;
    let (radii, angles) = (25, 41);
    let base = h.direction.angle() - PI / 2.0;
    let mut samples = vec![h.center];
    for i in 1..=radii {
        let rho = h.radius * i as f64 / radii as f64;
        for j in 0..angles {
            let th = base + PI * j as f64 / (angles - 1) as f64;
            samples.push(h.center + Point2::from_angle(th) * rho);
        }
    }
    for x in samples {
        if distance_to_chain(&chain, x) <= 1e3 * eps {
            continue;
        }
        if winding_unchecked(&chain, x) == 0 {
            return Err(ClassifyError::ContainmentViolated { x: x.x, y: x.y });
        }
    }
    Ok(h)
}

/// First `s2 > s1` in `[s1, span]` where the heading has turned by `±pi` since `s1`.
fn opposite_tangent(l: &Loop, start: f64, s1: f64, span: f64, step: f64) -> Option<f64> {
    let base = l.turning_between(start, s1);
    let g = |s: f64| {
        let d = l.turning_between(start, s) - base;
        d.abs() - PI
    };
    let mut prev = (s1, g(s1));
    let mut s = s1;
    while s < span {
        s = (s + step).min(span);
        let gs = g(s);
        if gs >= -1e-12 {
            if gs.abs() <= 1e-12 {
                return Some(s);
            }
            let (mut lo, mut hi) = (prev.0, s);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = (s, gs);
    }
    None
}

/// Opposite tangents inside the end of a long arc (falling back to the
/// arc itself), with the end's chord as cross section.
pub fn find_parallel_tangents(
    l: &Loop,
    t1: f64,
    t2: f64,
) -> Result<(ParallelTangentPair, CrossSection), ClassifyError> {
    let end = find_end(l, t1, t2)?;
    let section = CrossSection {
        a: l.point_at(end.t1),
        b: l.point_at(end.t2),
        length: l.point_at(end.t1).dist(l.point_at(end.t2)),
    };
    let windows = [(end.t1, end.length), (t1, l.forward_distance(t1, t2))];
    for (start, span) in windows {
        let step = (span / 512.0).min(l.r() / 64.0);
        let tries = 64;
        for k in 0..tries {
            let s1 = span * k as f64 / tries as f64;
            if let Some(s2) = opposite_tangent(l, start, s1, span, step) {
                let pair = ParallelTangentPair {
                    t1: l.wrap(start + s1),
                    t2: l.wrap(start + s2),
                };
                return Ok((pair, section));
            }
        }
    }
    Err(ClassifyError::SearchFailed("no opposite tangents on the arc".into()))
}

/// Parameters where the tangent line has direction `theta` (mod pi), or
/// `None` when a straight piece is aligned with it.
fn tangent_roots(l: &Loop, theta: f64) -> Option<Vec<f64>> {
    let mut roots = Vec::new();
    for (i, p) in l.prims().iter().enumerate() {
        let start = l.piece_start(i);
        match p {
            Prim::Segment(_) => {
                let d = (p.heading_at(0.0) - theta).rem_euclid(PI);
                if d < 1e-9 || PI - d < 1e-9 {
                    return None;
                }
            }
            Prim::Arc(a) => {
                let k = p.signed_curvature();
                let h0 = p.heading_at(0.0);
                let sweep = a.sweep;
                // headings h0 + sweep * u for u in [0, 1)
                let (lo, hi) = if sweep > 0.0 {
                    (h0, h0 + sweep)
                } else {
                    (h0 + sweep, h0)
                };
                let m_lo = ((lo - theta) / PI).ceil() as i64;
                let m_hi = ((hi - theta) / PI).floor() as i64;
                for m in m_lo..=m_hi {
                    let h = theta + m as f64 * PI;
                    let s = (h - h0) / k;
                    if s >= 0.0 && s < p.length() {
                        roots.push(start + s);
                    }
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Some(roots)
}

/// Three parameters whose tangent lines share a direction.
pub fn nonconvexity_witness(l: &Loop) -> Result<[f64; 3], ClassifyError> {
    let dirs = 720;
    let mut best: Option<Vec<f64>> = None;
    for k in 0..dirs {
        let theta = PI * (k as f64 + 0.37) / dirs as f64;
        if let Some(roots) = tangent_roots(l, theta) {
            if roots.len() >= 3 && best.as_ref().is_none_or(|b| roots.len() > b.len()) {
                best = Some(roots);
            }
        }
    }
    match best {
        Some(r) => Ok([r[0], r[1], r[2]]),
        None => Err(ClassifyError::WitnessNotFound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::{FRAC_PI_2, TAU};

    #[test]
    fn antipodal_semicircle_is_short_and_simple() {
        let c = shapes::circle(1.0, 1.0);
        let a = classify_subcurve(&c, 0.0, PI).unwrap();
        assert!(a.is_short && a.is_simple && !a.is_long);
    }

    #[test]
    fn major_arc_of_radius_r_circle_is_long() {
        let c = shapes::circle(1.0, 1.0);
        let minor = classify_subcurve(&c, 0.0, 1.0).unwrap();
        let major = classify_subcurve(&c, 1.0, 0.0).unwrap();
        assert!(minor.is_short);
        assert!(major.is_long && major.witness_outside.is_some());
    }

    #[test]
    fn stadium_side_is_simple() {
        let s = shapes::stadium(1.0, 2.0);
        let c = classify_subcurve(&s, 0.0, 2.0).unwrap();
        assert!(c.is_simple && !c.is_long);
    }

    #[test]
    fn big_circle_nearby_terminals_inessential() {
        let c = shapes::circle(10.0, 1.0);
        let p = is_essential(&c, 0.0, 1.0).unwrap();
        assert!(p.class_12.is_short && p.class_21.is_long && !p.essential);
    }

    #[test]
    fn degenerate_chord_refused() {
        let c = shapes::circle(1.0, 1.0);
        assert!(matches!(
            classify_subcurve(&c, 0.5, 0.5),
            Err(ClassifyError::DegenerateChord { .. })
        ));
    }

    #[test]
    fn convex_shapes_have_no_essential_pairs() {
        let opts = SweepOptions { n: 128 };
        assert!(find_essential_pairs(&shapes::circle(1.5, 1.0), &opts).is_empty());
        assert!(find_essential_pairs(&shapes::stadium(1.0, 2.0), &opts).is_empty());
    }

    #[test]
    fn circle_end_is_a_semicircle() {
        let c = shapes::circle(1.0, 1.0);
        let end = find_end(&c, FRAC_PI_2, 0.0).unwrap();
        assert!((end.length - PI).abs() < 1e-6, "{}", end.length);
        assert!((c.point_at(end.t1).dist(c.point_at(end.t2)) - 2.0).abs() < 1e-9);
        assert!(verify_half_disk(&c, &end).is_ok());
    }

    #[test]
    fn convex_loop_has_two_tangents_per_direction() {
        let s = shapes::stadium(1.0, 2.0);
        assert_eq!(tangent_roots(&s, 0.3).unwrap().len(), 2);
        assert!(tangent_roots(&s, 0.0).is_none());
        assert!(nonconvexity_witness(&s).is_err());
        assert!(nonconvexity_witness(&shapes::dumbbell()).is_ok());
        let _ = TAU;
    }
}
