//! Maximal rolling regions and the excluded pockets between them.
//!
//! A radius-`r` disk rolls along one side of the loop, its centre following
//! the offset curve. When another stretch of the loop blocks it, the region
//! jumps to the blocking contact and is bridged there by an arc of the blocked
//! disk. Loop stretches no disk reaches, closed off by those arcs, form the
//! excluded regions.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{
    classify_subcurve, find_end, find_essential_pairs, is_essential, ClassifyError, SweepOptions, TerminalPair,
};
use crate::curve::{bbox_of, CurveError, Loop, ValidateOptions};
use crate::geometry::{
    circle_piece_intersections, disks_through, piece_intersections, signed_area, winding_unchecked, CircularArcPrim,
    ContactKind, Disk, PiecePair, Point2, Prim, SegmentPrim,
};
use crate::oracle::{distance_transform, side_mask, GridMask, GridSpec};
use crate::rolling::{chord_enclosures, disk_fits, tangent_disk, ContactClass, EnclosureSide, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("no radius-r disk fits on the {side:?} side")]
    NoSeed { side: Side },
    #[error("rolling made no progress at t = {t}")]
    StuckState { t: f64 },
    #[error("{replacements} replacement arcs exceed the bound of {bound} essential families")]
    NonTermination { replacements: usize, bound: usize },
    #[error("contacts at t = {t_a} and t = {t_b} are closer than the parameter tolerance")]
    ResolutionExhausted { t_a: f64, t_b: f64 },
    #[error("seed disk crosses the loop at {} points", crossings.len())]
    TransversalSeed { disk: Disk, crossings: Vec<f64> },
    #[error("no replacement arc bridges the pair")]
    NoNeck,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// A rolling disk tangent to the loop at `contact_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollState {
    pub disk: Disk,
    pub contact_t: f64,
    pub contact_class: ContactClass,
}

impl RollState {
    pub fn at(l: &Loop, t: f64, side: Side) -> Self {
        let t = l.wrap(t);
        let disk = tangent_disk(l, t, side);
        let (_, contact_class) = disk_fits(l, &disk, side);
        Self {
            disk,
            contact_t: t,
            contact_class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RollEvent {
    /// The contact reached the start of the next piece.
    Junction { t: f64 },
    /// The disk was blocked at `t_from` by the loop at `t_to`.
    Contact { t_from: f64, t_to: f64, pair: TerminalPair },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollStep {
    pub state: RollState,
    pub event: RollEvent,
    /// Arc length rolled before the event.
    pub advanced: f64,
    pub centers: Vec<Point2>,
}

/// Arc of a blocked disk bridging two contacts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplacementArc {
    pub geometry: CircularArcPrim,
    pub pair: TerminalPair,
}

impl ReplacementArc {
    /// Whether this is the shorter of the two arcs between its ends.
    pub fn is_shorter(&self) -> bool {
        self.geometry.sweep.abs() <= std::f64::consts::PI + 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPiece {
    Loop {
        prim: Prim,
        t_start: f64,
    },
    Replacement {
        arc: ReplacementArc,
        reversed: bool,
    },
    /// Straight cut splitting a junction of several necks.
    Cut(SegmentPrim),
}

impl BoundaryPiece {
    pub fn prim(&self) -> Prim {
        match self {
            BoundaryPiece::Loop { prim, .. } => *prim,
            BoundaryPiece::Replacement { arc, reversed } => {
                let p = Prim::Arc(arc.geometry);
                if *reversed {
                    p.reversed()
                } else {
                    p
                }
            }
            BoundaryPiece::Cut(s) => Prim::Segment(*s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    Rolling,
    Excluded,
    Neck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub boundary: Vec<BoundaryPiece>,
    pub kind: RegionKind,
    pub side: Side,
    pub center_trace: Option<Vec<Point2>>,
    /// The region is the outside of its boundary chain.
    pub unbounded: bool,
}

impl Region {
    pub fn chain(&self) -> Vec<Prim> {
        self.boundary.iter().map(BoundaryPiece::prim).collect()
    }

    pub fn replacements(&self) -> impl Iterator<Item = &ReplacementArc> {
        self.boundary.iter().filter_map(|b| match b {
            BoundaryPiece::Replacement { arc, .. } => Some(arc),
            _ => None,
        })
    }

    pub fn replacement_count(&self) -> usize {
        self.replacements().count()
    }

    /// Enclosed area; `None` for unbounded regions.
    pub fn area(&self) -> Option<f64> {
        (!self.unbounded).then(|| signed_area(&self.chain()).abs())
    }

    pub fn contains(&self, x: Point2) -> bool {
        (winding_unchecked(&self.chain(), x) != 0) != self.unbounded
    }

    /// Cells of `spec` lying in the region.
    pub fn rasterize(&self, spec: &GridSpec) -> GridMask {
        let chain = self.chain();
        let enclosed = spec.rasterize(&chain);
        if self.unbounded {
            enclosed.complement()
        } else {
            enclosed
        }
    }

    /// The boundary chain as a validated loop (orientation fixed up).
    pub fn as_loop(&self, kappa: f64) -> Result<Loop, CurveError> {
        let prims: Vec<Prim> = self
            .chain()
            .into_iter()
            .filter(|p| p.length() > 1e-12 / kappa)
            .collect();
        Loop::validate(
            prims,
            kappa,
            ValidateOptions {
                auto_reverse: true,
                ..ValidateOptions::default()
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub rolling: usize,
    pub excluded: usize,
    pub neck: usize,
    pub replacements: usize,
    pub essential_families: usize,
    /// Per region, in order; `None` for unbounded regions.
    pub areas: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub regions: Vec<Region>,
    pub side: Side,
    pub stats: DecompositionStats,
}

impl Decomposition {
    pub fn count(&self, kind: RegionKind) -> usize {
        self.regions.iter().filter(|r| r.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub sweep_n: usize,
    /// Rolling step; `None` picks `min(r / 64, L / 256)`.
    pub step: Option<f64>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            sweep_n: 512,
            step: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Jump {
    t_a: f64,
    t_b: f64,
}

#[derive(Debug, Clone)]
struct Trace {
    /// `(start, length)` stretches touched by the disk.
    rolled: Vec<(f64, f64)>,
    jumps: Vec<Jump>,
    centers: Vec<Point2>,
}

struct Tracer<'a> {
    l: &'a Loop,
    side: Side,
    r: f64,
    step: f64,
    slack: f64,
}

impl<'a> Tracer<'a> {
    fn new(l: &'a Loop, side: Side, step: Option<f64>) -> Self {
        let r = l.r();
        Self {
            l,
            side,
            r,
            step: step.unwrap_or((r / 64.0).min(l.length() / 256.0)),
            slack: l.tolerances().eps_geom,
        }
    }

    fn center(&self, t: f64) -> Point2 {
        tangent_disk(self.l, t, self.side).center
    }

    fn clearance(&self, t: f64) -> f64 {
        self.l.distance(self.center(t)) - self.r
    }

    fn fits(&self, t: f64) -> bool {
        self.clearance(t) >= -self.slack
    }

    /// Nearest loop point to `x` on the stretch `[from, from + len]`.
    fn nearest_in(&self, x: Point2, from: f64, len: f64) -> (f64, f64) {
        let mut best = (from, f64::INFINITY);
        self.l.walk(from, len, |p, t0| {
            let (s, d) = p.nearest(x);
            if d < best.1 {
                best = (t0 + s, d);
            }
        });
        (self.l.wrap(best.0), best.1)
    }

    /// Rolls forward from `t` by at most `budget`. Returns the length rolled
    /// and, when blocked, a parameter just beyond the blocking position.
    fn advance(&self, t: f64, budget: f64, centers: &mut Vec<Point2>) -> (f64, Option<f64>) {
        let tiny = 1e-14 * self.l.length();
        let mut s = 0.0;
        while s < budget {
            let next = (s + self.step).min(budget);
            if self.fits(t + next) {
                s = next;
                centers.push(self.center(t + s));
                continue;
            }
            // Locate the blocking position much tighter than the fitting
            // slack, so the bridging arc meets the loop tangentially.
            let strict = 1e-4 * self.slack;
            let (mut lo, mut hi) = (s, next);
            for _ in 0..100 {
                if hi - lo <= tiny {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if self.clearance(t + mid) >= -strict {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > s {
                centers.push(self.center(t + lo));
            }
            return (lo, Some(t + next));
        }
        (budget, None)
    }

    /// The loop point blocking the disk at `t_a`, located from the deeper
    /// penetration at `t_deep`.
    fn blocking_contact(&self, t_a: f64, t_deep: f64) -> f64 {
        let total = self.l.length();
        let window = self.r.min(0.25 * total);
        let (rough, _) = self.nearest_in(self.center(t_deep), t_a + window, total - 2.0 * window);
        let half = (0.5 * self.r).min(0.25 * total);
        self.nearest_in(self.center(t_a), rough - half, 2.0 * half).0
    }

    fn trace(&self, seed: f64, bound: usize) -> Result<Trace, DecomposeError> {
        let l = self.l;
        let total = l.length();
        let eps = l.tolerances().eps_param;
        let seed = l.wrap(seed);
        let mut t = seed;
        let mut travelled = 0.0;
        let (mut start, mut start_travel) = (seed, 0.0);
        let mut rolled = Vec::new();
        let mut jumps = Vec::new();
        let mut centers = vec![self.center(seed)];
        while travelled < total - eps {
            let (ds, blocked) = self.advance(t, total - travelled, &mut centers);
            travelled += ds;
            t = l.wrap(t + ds);
            let Some(deep) = blocked else { continue };
            let t_a = t;
            let t_b = self.blocking_contact(t_a, deep);
            let jump = l.forward_distance(t_a, t_b);
            if jump < eps {
                return Err(DecomposeError::ResolutionExhausted { t_a, t_b });
            }
            if travelled + jump > total + eps {
                return Err(DecomposeError::StuckState { t: t_a });
            }
            rolled.push((start, travelled - start_travel));
            jumps.push(Jump { t_a, t_b });
            if jumps.len() > bound {
                return Err(DecomposeError::NonTermination {
                    replacements: jumps.len(),
                    bound,
                });
            }
            travelled += jump;
            t = t_b;
            start = t_b;
            start_travel = travelled;
            centers.push(self.center(t_b));
        }
        let tail = (total - start_travel).max(0.0);
        if jumps.is_empty() {
            rolled = vec![(seed, total)];
        } else {
            rolled[0] = (start, tail + rolled[0].1);
        }
        Ok(Trace { rolled, jumps, centers })
    }

    fn replacement(&self, jump: Jump) -> Result<ReplacementArc, DecomposeError> {
        let l = self.l;
        let (pa, pb) = (l.point_at(jump.t_a), l.point_at(jump.t_b));
        let approx = self.center(jump.t_a);
        // Snap the centre so both contacts lie exactly on the circle.
        let center = disks_through(pa, pb, self.r, l.tolerances())
            .ok()
            .and_then(|ds| {
                ds.into_iter()
                    .map(|d| d.center)
                    .min_by(|a, b| a.dist(approx).total_cmp(&b.dist(approx)))
            })
            .filter(|c| c.dist(approx) < 1e-6 * self.r)
            .unwrap_or(approx);
        let a0 = (pa - center).angle();
        let a1 = (pb - center).angle();
        let sweep = match self.side {
            Side::Internal => -(a0 - a1).rem_euclid(TAU),
            Side::External => (a1 - a0).rem_euclid(TAU),
        };
        Ok(ReplacementArc {
            geometry: CircularArcPrim {
                center,
                radius: self.r,
                start_angle: a0,
                sweep,
            },
            pair: is_essential(l, jump.t_a, jump.t_b)?,
        })
    }

    fn region(&self, trace: &Trace) -> Result<Region, DecomposeError> {
        let mut boundary = Vec::new();
        for (i, &(start, len)) in trace.rolled.iter().enumerate() {
            boundary.extend(loop_pieces(self.l, start, len));
            if let Some(&jump) = trace.jumps.get(i) {
                boundary.push(BoundaryPiece::Replacement {
                    arc: self.replacement(jump)?,
                    reversed: false,
                });
            }
        }
        let mut region = Region {
            boundary,
            kind: RegionKind::Rolling,
            side: self.side,
            center_trace: Some(trace.centers.clone()),
            unbounded: false,
        };
        region.unbounded = self.side == Side::External && signed_area(&region.chain()) < 0.0;
        Ok(region)
    }
}

fn loop_pieces(l: &Loop, start: f64, len: f64) -> Vec<BoundaryPiece> {
    let mut out = Vec::new();
    l.walk(start, len, |p, t0| {
        out.push(BoundaryPiece::Loop {
            prim: *p,
            t_start: l.wrap(t0),
        })
    });
    out
}

/// A radius-`r` disk inside the side's closed region, tangent to the loop.
pub fn seed_disk(l: &Loop, side: Side) -> Result<Disk, DecomposeError> {
    seed_state(l, side).map(|s| s.disk)
}

/// Like [`seed_disk`], with the tangency parameter and contact set.
pub fn seed_state(l: &Loop, side: Side) -> Result<RollState, DecomposeError> {
    let tracer = Tracer::new(l, side, None);
    let guess = match side {
        Side::Internal => {
            let spec = GridSpec::for_loop(l, l.r() / 20.0).map_err(|_| DecomposeError::NoSeed { side })?;
            let field = distance_transform(l, &spec);
            let inside = side_mask(l, &spec, side);
            let mut best = (f64::NEG_INFINITY, None);
            for j in 0..spec.height {
                for i in 0..spec.width {
                    if inside.get(i, j) && field.get(i, j) > best.0 {
                        best = (field.get(i, j), Some(spec.center(i, j)));
                    }
                }
            }
            let x = best.1.ok_or(DecomposeError::NoSeed { side })?;
            l.nearest(x).0
        }
        Side::External => {
            // The nearest point to a far-away point lies on the hull, where
            // an outside tangent disk always fits.
            let (lo, hi) = l.bbox();
            let far = Point2::new(hi.x + (hi - lo).norm() + l.r(), 0.5 * (lo.y + hi.y));
            l.nearest(far).0
        }
    };
    if tracer.fits(guess) {
        return Ok(RollState::at(l, guess, side));
    }
    let n = (l.length() / tracer.step).ceil() as usize;
    (0..n)
        .map(|k| l.length() * k as f64 / n as f64)
        .filter(|&t| tracer.fits(t))
        .min_by(|a, b| l.cyclic_distance(*a, guess).total_cmp(&l.cyclic_distance(*b, guess)))
        .map(|t| RollState::at(l, t, side))
        .ok_or(DecomposeError::NoSeed { side })
}

/// Rolls the disk forward to the next piece junction or blocking contact.
pub fn roll(l: &Loop, state: &RollState, side: Side) -> Result<RollStep, DecomposeError> {
    let tracer = Tracer::new(l, side, None);
    let eps = l.tolerances().eps_param;
    let t = state.contact_t;
    let budget = l
        .junctions()
        .iter()
        .map(|&j| l.forward_distance(t, j))
        .filter(|&d| d > eps)
        .fold(f64::INFINITY, f64::min)
        .min(l.length());
    let mut centers = Vec::new();
    let (advanced, blocked) = tracer.advance(t, budget, &mut centers);
    match blocked {
        None => {
            let at = l.wrap(t + budget);
            Ok(RollStep {
                state: RollState::at(l, at, side),
                event: RollEvent::Junction { t: at },
                advanced,
                centers,
            })
        }
        Some(deep) => {
            let t_a = l.wrap(t + advanced);
            let t_b = tracer.blocking_contact(t_a, deep);
            if l.forward_distance(t_a, t_b) < eps {
                return Err(DecomposeError::StuckState { t: t_a });
            }
            Ok(RollStep {
                state: RollState::at(l, t_b, side),
                event: RollEvent::Contact {
                    t_from: t_a,
                    t_to: t_b,
                    pair: is_essential(l, t_a, t_b)?,
                },
                advanced,
                centers,
            })
        }
    }
}

/// The full region swept by rolling the seed disk once around.
pub fn rolling_region(l: &Loop, seed: &RollState, side: Side) -> Result<Region, DecomposeError> {
    let bound = find_essential_pairs(l, &SweepOptions::default()).len();
    let tracer = Tracer::new(l, side, None);
    let trace = tracer.trace(seed.contact_t, bound)?;
    tracer.region(&trace)
}

/// A neck between two replacement arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neck {
    pub region: Region,
    /// The contact pairs of the two bounding arcs.
    pub inner: [TerminalPair; 2],
    /// Whether each wall of the neck classifies as long.
    pub walls_long: [bool; 2],
}

fn pair_side(l: &Loop, t1: f64, t2: f64) -> Side {
    match chord_enclosures(l, t1, t2) {
        (EnclosureSide::InternalEnclosure, EnclosureSide::InternalEnclosure) => Side::Internal,
        _ => Side::External,
    }
}

/// The neck around an essential pair, bounded by the replacement arcs met
/// when rolling from the End of each long arc.
pub fn detect_neck(l: &Loop, pair: &TerminalPair) -> Result<Neck, DecomposeError> {
    let side = pair_side(l, pair.t1, pair.t2);
    let bound = find_essential_pairs(l, &SweepOptions::default()).len().max(1);
    let tracer = Tracer::new(l, side, None);
    let mut found = Vec::new();
    for (a, b) in [(pair.t1, pair.t2), (pair.t2, pair.t1)] {
        let end = find_end(l, a, b)?;
        let disk = tangent_disk(l, end.t1, side);
        let (fits, _) = disk_fits(l, &disk, side);
        if !fits {
            let crossings = handle_disk_intersections(l, &disk).params;
            return Err(DecomposeError::TransversalSeed { disk, crossings });
        }
        let trace = tracer.trace(end.t1, bound)?;
        let other_mid = l.wrap(b + 0.5 * l.forward_distance(b, a));
        let jump = trace
            .jumps
            .iter()
            .copied()
            .find(|j| l.forward_distance(j.t_a, other_mid) < l.forward_distance(j.t_a, j.t_b))
            .ok_or(DecomposeError::NoNeck)?;
        found.push(jump);
    }
    let (ja, jb) = (found[0], found[1]);
    let walls = [
        (ja.t_a, l.forward_distance(ja.t_a, jb.t_b)),
        (jb.t_a, l.forward_distance(jb.t_a, ja.t_b)),
    ];
    if walls[0].1 + walls[1].1 > l.length() {
        return Err(DecomposeError::NoNeck);
    }
    let (la, lb) = (tracer.replacement(ja)?, tracer.replacement(jb)?);
    let mut boundary = loop_pieces(l, walls[0].0, walls[0].1);
    boundary.push(BoundaryPiece::Replacement {
        arc: lb,
        reversed: true,
    });
    boundary.extend(loop_pieces(l, walls[1].0, walls[1].1));
    boundary.push(BoundaryPiece::Replacement {
        arc: la,
        reversed: true,
    });
    let long = |(s, len): (f64, f64)| {
        classify_subcurve(l, s, l.wrap(s + len))
            .map(|c| c.is_long)
            .unwrap_or(false)
    };
    Ok(Neck {
        region: Region {
            boundary,
            kind: RegionKind::Neck,
            side,
            center_trace: None,
            unbounded: false,
        },
        inner: [la.pair, lb.pair],
        walls_long: [long(walls[0]), long(walls[1])],
    })
}

/// Transversal crossings of a disk's circle with the loop, and the turning
/// condition applied to every pair of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskCrossings {
    pub params: Vec<f64>,
    pub candidates: Vec<TerminalPair>,
    pub essential: Vec<TerminalPair>,
}

pub fn handle_disk_intersections(l: &Loop, d: &Disk) -> DiskCrossings {
    let tol = l.tolerances();
    let mut params: Vec<f64> = Vec::new();
    for (i, p) in l.prims().iter().enumerate() {
        for hit in circle_piece_intersections(d, p, tol) {
            if hit.kind == ContactKind::Transversal {
                params.push(l.wrap(l.piece_start(i) + hit.offset));
            }
        }
    }
    params.sort_by(f64::total_cmp);
    params.dedup_by(|a, b| l.cyclic_distance(*a, *b) < 1e3 * tol.eps_param);
    if params.len() > 1 && l.cyclic_distance(params[0], params[params.len() - 1]) < 1e3 * tol.eps_param {
        params.pop();
    }
    let mut candidates = Vec::new();
    for i in 0..params.len() {
        for j in i + 1..params.len() {
            if let Ok(p) = is_essential(l, params[i], params[j]) {
                candidates.push(p);
            }
        }
    }
    let essential = candidates.iter().filter(|p| p.essential).copied().collect();
    DiskCrossings {
        params,
        candidates,
        essential,
    }
}

/// Decomposes one side of the loop with default options.
pub fn decompose(l: &Loop, side: Side) -> Result<Decomposition, DecomposeError> {
    decompose_with(l, side, &DecomposeOptions::default())
}

pub fn decompose_with(l: &Loop, side: Side, opts: &DecomposeOptions) -> Result<Decomposition, DecomposeError> {
    let families = find_essential_pairs(l, &SweepOptions { n: opts.sweep_n });
    let bound = families.len();
    let tracer = Tracer::new(l, side, opts.step);
    let total = l.length();
    let n = (total / tracer.step).ceil() as usize;
    let sample = |k: usize| total * k as f64 / n as f64;
    let fits: Vec<bool> = (0..n).into_par_iter().map(|k| tracer.fits(sample(k))).collect();
    let mut visited = vec![false; n];
    let margin = 1e-9 * total;
    let covers = |rolled: &[(f64, f64)], t: f64| {
        rolled
            .iter()
            .any(|&(s, len)| len > 2.0 * margin && l.forward_distance(s + margin, t) < len - 2.0 * margin)
    };

    let mut traces: Vec<Trace> = Vec::new();
    let mut seed = Some(seed_state(l, side)?.contact_t);
    while let Some(s) = seed {
        let trace = tracer.trace(s, bound)?;
        let touched: Vec<usize> = (0..n).filter(|&k| covers(&trace.rolled, sample(k))).collect();
        let duplicate = touched.iter().any(|&k| visited[k]);
        for &k in &touched {
            visited[k] = true;
        }
        // The seed sample itself is always consumed.
        let nearest = ((l.wrap(s) / total) * n as f64).round() as usize % n;
        visited[nearest] = true;
        if !duplicate {
            traces.push(trace);
        }
        if traces.len() > n {
            return Err(DecomposeError::StuckState { t: s });
        }
        seed = longest_run(&fits, &visited, 3).map(sample);
    }

    let mut regions = Vec::new();
    for trace in &traces {
        regions.push(tracer.region(trace)?);
    }
    for cycle in excluded_cycles(l, &traces)? {
        regions.extend(excluded_regions(&tracer, &cycle)?);
    }

    let stats = DecompositionStats {
        rolling: regions.iter().filter(|r| r.kind == RegionKind::Rolling).count(),
        excluded: regions.iter().filter(|r| r.kind == RegionKind::Excluded).count(),
        neck: regions.iter().filter(|r| r.kind == RegionKind::Neck).count(),
        replacements: traces.iter().map(|t| t.jumps.len()).sum(),
        essential_families: families.len(),
        areas: regions.iter().map(Region::area).collect(),
    };
    Ok(Decomposition { regions, side, stats })
}

/// Middle index of the longest cyclic run of fitting, unvisited samples.
fn longest_run(fits: &[bool], visited: &[bool], min_len: usize) -> Option<usize> {
    let n = fits.len();
    let free: Vec<bool> = (0..n).map(|k| fits[k] && !visited[k]).collect();
    if free.iter().all(|&f| f) {
        return Some(0);
    }
    let start = free.iter().position(|&f| !f)?;
    let mut best: Option<(usize, usize)> = None;
    let mut run: Option<(usize, usize)> = None;
    for off in 1..=n {
        let k = (start + off) % n;
        if free[k] {
            run = Some(match run {
                Some((s, len)) => (s, len + 1),
                None => (k, 1),
            });
        } else if let Some((s, len)) = run.take() {
            if len >= min_len && best.is_none_or(|(_, b)| len > b) {
                best = Some((s, len));
            }
        }
    }
    best.map(|(s, len)| (s + len / 2) % n)
}

/// An excluded boundary cycle: wall `i` (a loop stretch) is followed by the
/// reversed replacement arc `i`.
struct Cycle {
    walls: Vec<(f64, f64)>,
    arcs: Vec<Jump>,
}

fn excluded_cycles(l: &Loop, traces: &[Trace]) -> Result<Vec<Cycle>, DecomposeError> {
    let total = l.length();
    let near = 1e-9 * total;
    let mut rolled: Vec<(f64, f64)> = traces.iter().flat_map(|t| t.rolled.iter().copied()).collect();
    let jumps: Vec<Jump> = traces.iter().flat_map(|t| t.jumps.iter().copied()).collect();
    if jumps.is_empty() {
        return Ok(Vec::new());
    }
    rolled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = rolled.len();
    let gaps: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let (s, len) = rolled[i];
            let e = l.wrap(s + len);
            let next = rolled[(i + 1) % m].0;
            let mut g = l.forward_distance(e, next);
            if g > total - near {
                g = 0.0;
            }
            (e, g)
        })
        .collect();
    let mut used = vec![false; m];
    let mut cycles = Vec::new();
    for g0 in 0..m {
        if used[g0] {
            continue;
        }
        let mut cycle = Cycle {
            walls: Vec::new(),
            arcs: Vec::new(),
        };
        let mut g = g0;
        loop {
            used[g] = true;
            let (e, len) = gaps[g];
            cycle.walls.push((e, len));
            let s = l.wrap(e + len);
            let jump = jumps
                .iter()
                .copied()
                .find(|j| l.cyclic_distance(j.t_b, s) < near)
                .ok_or(DecomposeError::StuckState { t: s })?;
            cycle.arcs.push(jump);
            let next = (0..m)
                .find(|&k| l.cyclic_distance(gaps[k].0, jump.t_a) < near)
                .ok_or(DecomposeError::StuckState { t: jump.t_a })?;
            if next == g0 {
                break;
            }
            if used[next] {
                return Err(DecomposeError::StuckState { t: jump.t_a });
            }
            g = next;
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

fn excluded_regions(tracer: &Tracer, cycle: &Cycle) -> Result<Vec<Region>, DecomposeError> {
    let l = tracer.l;
    let arcs: Vec<ReplacementArc> = cycle
        .arcs
        .iter()
        .map(|&j| tracer.replacement(j))
        .collect::<Result<_, _>>()?;
    let mut boundary = Vec::new();
    for (wall, arc) in cycle.walls.iter().zip(&arcs) {
        boundary.extend(loop_pieces(l, wall.0, wall.1));
        boundary.push(BoundaryPiece::Replacement {
            arc: *arc,
            reversed: true,
        });
    }
    let whole = Region {
        boundary,
        kind: match arcs.len() {
            1 => RegionKind::Excluded,
            2 => RegionKind::Neck,
            _ => RegionKind::Excluded,
        },
        side: tracer.side,
        center_trace: None,
        unbounded: false,
    };
    if arcs.len() < 3 {
        return Ok(vec![whole]);
    }
    Ok(split_junction(tracer, cycle, &arcs, &whole.chain()).unwrap_or_else(|| vec![whole]))
}

/// Splits a region bounded by three or more replacement arcs into necks, by
/// cuts from its point of maximal clearance to the nearest point of each wall.
fn split_junction(tracer: &Tracer, cycle: &Cycle, arcs: &[ReplacementArc], chain: &[Prim]) -> Option<Vec<Region>> {
    let l = tracer.l;
    let r = tracer.r;
    let tol = l.tolerances();
    let (lo, hi) = bbox_of(chain);
    let cell = r / 32.0;
    let (nx, ny) = (
        ((hi.x - lo.x) / cell).ceil() as usize,
        ((hi.y - lo.y) / cell).ceil() as usize,
    );
    let mut best = (0.0, None);
    for j in 0..ny {
        for i in 0..nx {
            let x = Point2::new(lo.x + (i as f64 + 0.5) * cell, lo.y + (j as f64 + 0.5) * cell);
            if winding_unchecked(chain, x) == 0 {
                continue;
            }
            let d = crate::geometry::distance_to_chain(chain, x);
            if d > best.0 {
                best = (d, Some(x));
            }
        }
    }
    let hub = best.1?;
    let feet: Vec<f64> = cycle
        .walls
        .iter()
        .map(|&(s, len)| if len > 0.0 { tracer.nearest_in(hub, s, len).0 } else { s })
        .collect();
    for &t in &feet {
        let q = l.point_at(t);
        if q.dist(hub) < 10.0 * tol.eps_geom {
            return None;
        }
        let cut = Prim::segment(hub, q);
        for p in chain {
            match piece_intersections(&cut, p, tol) {
                PiecePair::Overlap => return None,
                PiecePair::Points(pts) => {
                    if pts.iter().any(|c| c.point.dist(q) > 1e-6 * r) {
                        return None;
                    }
                }
            }
        }
    }
    let k = cycle.walls.len();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let next = (i + 1) % k;
        let (s, len) = cycle.walls[i];
        let (s_next, _) = cycle.walls[next];
        let mut boundary = loop_pieces(l, feet[i], len - l.forward_distance(s, feet[i]));
        boundary.push(BoundaryPiece::Replacement {
            arc: arcs[i],
            reversed: true,
        });
        boundary.extend(loop_pieces(l, s_next, l.forward_distance(s_next, feet[next])));
        let (qi, qn) = (l.point_at(feet[i]), l.point_at(feet[next]));
        boundary.push(BoundaryPiece::Cut(SegmentPrim { from: qn, to: hub }));
        boundary.push(BoundaryPiece::Cut(SegmentPrim { from: hub, to: qi }));
        out.push(Region {
            boundary,
            kind: RegionKind::Neck,
            side: tracer.side,
            center_trace: None,
            unbounded: false,
        });
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn circle_is_one_rolling_region() {
        let c = shapes::circle(2.0, 1.0);
        for side in [Side::Internal, Side::External] {
            let d = decompose(&c, side).unwrap();
            assert_eq!(d.regions.len(), 1);
            assert_eq!(d.regions[0].kind, RegionKind::Rolling);
            assert_eq!(d.regions[0].replacement_count(), 0);
            assert_eq!(d.regions[0].unbounded, side == Side::External);
        }
    }

    #[test]
    fn longest_run_wraps() {
        let fits = [true, true, false, true, true, true, false, true, true, true];
        let visited = [false; 10];
        // The run 7..=1 wraps and has length 5.
        assert_eq!(longest_run(&fits, &visited, 3), Some(9));
    }

    #[test]
    fn seed_disk_on_circle_is_its_own_disk() {
        let c = shapes::circle(1.0, 1.0);
        let d = seed_disk(&c, Side::Internal).unwrap();
        assert!(d.center.norm() < 1e-9);
    }
}
