//! Tangent disks and whole-domain rolling verdicts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{essential_cells, is_essential, ClassifyError, TerminalPair};
use crate::curve::Loop;
use crate::geometry::{
    circle_piece_intersections, piece_intersections, winding_unchecked, ContactKind, Disk, PiecePair, Point2, Prim,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Internal,
    External,
}

impl Side {
    /// `+1` along the inward normal, `-1` along the outward one.
    pub fn sign(self) -> f64 {
        match self {
            Side::Internal => 1.0,
            Side::External => -1.0,
        }
    }
}

/// Contact set between a tangent disk's circle and the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContactClass {
    Singleton,
    AntipodalPair,
    BoundaryArc,
    /// Two or more isolated, non-antipodal touching points.
    Multiple(Vec<Point2>),
    /// The loop enters the open disk; carries crossing points.
    Transversal(Vec<Point2>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnclosureSide {
    InternalEnclosure,
    ExternalEnclosure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Direct,
    TerminalCriterion,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Obstruction {
    Contact(ContactClass),
    Pair(TerminalPair),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingFailure {
    pub t: f64,
    pub side: Side,
    pub obstruction: Obstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingReport {
    pub internal: bool,
    pub external: bool,
    pub rolling: bool,
    /// At most `MAX_FAILURES` entries per side and method.
    pub failures: Vec<RollingFailure>,
    pub total_failures: usize,
    pub method: Method,
}

pub const MAX_FAILURES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RollingError {
    #[error("direct and terminal verdicts disagree on the {side:?} side (direct {direct}, terminal {terminal}) near t = {t}")]
    MethodDisagreement {
        side: Side,
        direct: bool,
        terminal: bool,
        t: f64,
    },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Debug, Clone, Copy)]
pub struct RollingOptions {
    pub sweep_n: usize,
    /// Boundary samples for the direct method; `None` picks `max(4096, L / (r / 64))`.
    pub direct_samples: Option<usize>,
}

impl Default for RollingOptions {
    fn default() -> Self {
        Self {
            sweep_n: 512,
            direct_samples: None,
        }
    }
}

pub fn tangent_disk(l: &Loop, t: f64, side: Side) -> Disk {
    let f = l.frame_at(t);
    Disk::new(f.point + f.normal * (side.sign() * l.r()), l.r())
}

/// Whether the disk lies in the closed side region, with its contact set.
pub fn disk_fits(l: &Loop, d: &Disk, side: Side) -> (bool, ContactClass) {
    let tol = l.tolerances();
    let eps = tol.eps_geom;
    let mut nearest = (f64::INFINITY, d.center);
    for p in l.prims() {
        let (s, dist) = p.nearest(d.center);
        if dist < nearest.0 {
            nearest = (dist, p.point_at(s));
        }
    }
    let inside = l.winding(d.center) != 0;
    let center_ok = inside == (side == Side::Internal);
    let clear = nearest.0 >= d.radius - eps;

    let mut touches: Vec<Point2> = Vec::new();
    let mut crossings: Vec<Point2> = Vec::new();
    let mut arc = false;
    for p in l.prims() {
        for h in circle_piece_intersections(d, p, tol) {
            match h.kind {
                ContactKind::Coincident => arc = true,
                ContactKind::Tangential => touches.push(h.point),
                ContactKind::Transversal => crossings.push(h.point),
            }
        }
    }
    let merge = 1e-6 * d.radius;
    let dedup = |pts: &mut Vec<Point2>| {
        let mut out: Vec<Point2> = Vec::new();
        for &q in pts.iter() {
            if !out.iter().any(|o| o.dist(q) <= merge) {
                out.push(q);
            }
        }
        *pts = out;
    };
    dedup(&mut touches);
    dedup(&mut crossings);

    if !(center_ok && clear) {
        if crossings.is_empty() {
            crossings.push(nearest.1);
        }
        return (false, ContactClass::Transversal(crossings));
    }
    // crossings that survive the clearance test are grazing junction hits
    touches.extend(crossings);
    dedup(&mut touches);
    let class = if arc {
        ContactClass::BoundaryArc
    } else {
        match touches.len() {
            0 | 1 => ContactClass::Singleton,
            2 if (touches[0].dist(touches[1]) - 2.0 * d.radius).abs() <= 1e-6 * d.radius => ContactClass::AntipodalPair,
            _ => ContactClass::Multiple(touches),
        }
    };
    (true, class)
}

/// Enclosure of the region bounded by the sub-curve `t1 -> t2` and its
/// chord, judged by winding-number samples of that region against the loop.
pub fn enclosure_side(l: &Loop, t1: f64, t2: f64) -> EnclosureSide {
    let mut chain = l.subcurve_len(t1, l.forward_distance(t1, t2)).pieces;
    let (a, b) = (l.point_at(t1), l.point_at(t2));
    chain.push(Prim::segment(b, a));
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &chain {
        let (x, y) = p.bbox();
        lo = Point2::new(lo.x.min(x.x), lo.y.min(x.y));
        hi = Point2::new(hi.x.max(y.x), hi.y.max(y.y));
    }
    let margin = 1e-6 * l.r();
    let (mut inside, mut outside) = (0usize, 0usize);
    let mut k = 32;
    while inside + outside == 0 && k <= 512 {
        for j in 0..k {
            for i in 0..k {
                let x = Point2::new(
                    lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / k as f64,
                    lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / k as f64,
                );
                if winding_unchecked(&chain, x) == 0 || l.distance(x) <= margin {
                    continue;
                }
                if Prim::segment(a, b).nearest(x).1 <= margin {
                    continue;
                }
                if l.winding(x) != 0 {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        k *= 4;
    }
    match (inside, outside) {
        (_, 0) => EnclosureSide::InternalEnclosure,
        (0, _) => EnclosureSide::ExternalEnclosure,
        _ => EnclosureSide::Mixed,
    }
}

/// Enclosures of both complementary arcs of a pair, decided from the chord:
/// a chord through the interior makes both regions internal, a chord
/// through the exterior bounds one pocket and one region containing the
/// domain, and a chord crossing the loop mixes both.
pub(crate) fn chord_enclosures(l: &Loop, t1: f64, t2: f64) -> (EnclosureSide, EnclosureSide) {
    let (a, b) = (l.point_at(t1), l.point_at(t2));
    let chord = Prim::segment(a, b);
    let slack = 1e-6 * l.r();
    let tol = l.tolerances();
    let mut crosses = false;
    for p in l.prims() {
        match piece_intersections(&chord, p, tol) {
            PiecePair::Overlap => crosses = true,
            PiecePair::Points(pts) => {
                if pts.iter().any(|c| c.point.dist(a) > slack && c.point.dist(b) > slack) {
                    crosses = true;
                }
            }
        }
        if crosses {
            return (EnclosureSide::Mixed, EnclosureSide::Mixed);
        }
    }
    if l.winding(a.midpoint(b)) != 0 {
        return (EnclosureSide::InternalEnclosure, EnclosureSide::InternalEnclosure);
    }
    // which region misses the domain: probe just inside the loop on the other arc
    let len = l.forward_distance(t1, t2);
    let mut chain = l.subcurve_len(t1, len).pieces;
    chain.push(Prim::segment(b, a));
    let fr = l.frame_at(t2 + 0.5 * (l.length() - len));
    let probe = fr.point + fr.normal * (1e-4 * l.r());
    if winding_unchecked(&chain, probe) == 0 {
        (EnclosureSide::ExternalEnclosure, EnclosureSide::Mixed)
    } else {
        (EnclosureSide::Mixed, EnclosureSide::ExternalEnclosure)
    }
}

fn direct_samples(l: &Loop, opts: &RollingOptions) -> Vec<f64> {
    let n = opts
        .direct_samples
        .unwrap_or_else(|| 4096usize.max((l.length() / (l.r() / 64.0)).ceil() as usize));
    let mut ts: Vec<f64> = (0..n).map(|k| l.length() * k as f64 / n as f64).collect();
    ts.extend_from_slice(l.junctions());
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts
}

struct SideVerdict {
    holds: bool,
    failures: Vec<RollingFailure>,
    total: usize,
}

fn direct_side(l: &Loop, side: Side, ts: &[f64]) -> SideVerdict {
    let results: Vec<Option<RollingFailure>> = ts
        .par_iter()
        .map(|&t| {
            let (fits, class) = disk_fits(l, &tangent_disk(l, t, side), side);
            (!fits).then_some(RollingFailure {
                t,
                side,
                obstruction: Obstruction::Contact(class),
            })
        })
        .collect();
    let all: Vec<RollingFailure> = results.into_iter().flatten().collect();
    SideVerdict {
        holds: all.is_empty(),
        total: all.len(),
        failures: all.into_iter().take(MAX_FAILURES).collect(),
    }
}

/// Essential grid pairs with their chord-based enclosures.
fn enclosed_pairs(l: &Loop, n: usize) -> Vec<(f64, f64, EnclosureSide, EnclosureSide)> {
    essential_cells(l, n)
        .into_par_iter()
        .map(|(u, v)| {
            let (e12, e21) = chord_enclosures(l, u, v);
            (u, v, e12, e21)
        })
        .collect()
}

fn terminal_sides(l: &Loop, n: usize) -> Result<(SideVerdict, SideVerdict), ClassifyError> {
    use EnclosureSide::*;
    let pairs = enclosed_pairs(l, n);
    let mut internal = Vec::new();
    let mut external = Vec::new();
    for &(u, v, e12, e21) in &pairs {
        if e12 == InternalEnclosure && e21 == InternalEnclosure {
            internal.push((u, v));
        }
        if e12 == ExternalEnclosure || e21 == ExternalEnclosure {
            external.push((u, v));
        }
    }
    let verdict = |found: Vec<(f64, f64)>, side: Side| -> Result<SideVerdict, ClassifyError> {
        let total = found.len();
        let failures = found
            .into_iter()
            .take(MAX_FAILURES)
            .map(|(u, v)| {
                is_essential(l, u, v).map(|p| RollingFailure {
                    t: u,
                    side,
                    obstruction: Obstruction::Pair(p),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SideVerdict {
            holds: total == 0,
            failures,
            total,
        })
    };
    Ok((verdict(internal, Side::Internal)?, verdict(external, Side::External)?))
}

pub fn classify_domain(l: &Loop, method: Method, opts: &RollingOptions) -> Result<RollingReport, RollingError> {
    let report = |i: SideVerdict, e: SideVerdict, method| RollingReport {
        internal: i.holds,
        external: e.holds,
        rolling: i.holds && e.holds,
        total_failures: i.total + e.total,
        failures: i.failures.into_iter().chain(e.failures).collect(),
        method,
    };
    match method {
        Method::Direct => {
            let ts = direct_samples(l, opts);
            Ok(report(
                direct_side(l, Side::Internal, &ts),
                direct_side(l, Side::External, &ts),
                method,
            ))
        }
        Method::TerminalCriterion => {
            let (i, e) = terminal_sides(l, opts.sweep_n)?;
            Ok(report(i, e, method))
        }
        Method::Both => {
            let ts = direct_samples(l, opts);
            let (di, de) = (direct_side(l, Side::Internal, &ts), direct_side(l, Side::External, &ts));
            let (ti, te) = terminal_sides(l, opts.sweep_n)?;
            for (side, d, t) in [(Side::Internal, &di, &ti), (Side::External, &de, &te)] {
                if d.holds != t.holds {
                    let witness = d.failures.first().or(t.failures.first()).map_or(0.0, |f| f.t);
                    return Err(RollingError::MethodDisagreement {
                        side,
                        direct: d.holds,
                        terminal: t.holds,
                        t: witness,
                    });
                }
            }
            let mut out = report(di, de, method);
            let extra = report(ti, te, method);
            out.total_failures += extra.total_failures;
            out.failures.extend(extra.failures);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn unit_circle_disks() {
        let c = shapes::circle(1.0, 1.0);
        let d = tangent_disk(&c, 0.7, Side::Internal);
        assert!(d.center.norm() < 1e-12);
        let e = tangent_disk(&c, 0.0, Side::External);
        assert!(e.center.dist(Point2::new(0.0, 2.0)) < 1e-12);
        let (fits, class) = disk_fits(&c, &d, Side::Internal);
        assert!(fits);
        assert_eq!(class, ContactClass::BoundaryArc);
        assert!(disk_fits(&c, &e, Side::External).0);
    }

    #[test]
    fn stadium_internal_contacts() {
        let s = shapes::stadium(1.0, 2.0);
        let side = tangent_disk(&s, 1.0, Side::Internal);
        assert!(side.center.dist(Point2::new(0.0, 0.0)) < 1e-12);
        let (fits, class) = disk_fits(&s, &side, Side::Internal);
        assert!(fits);
        assert_eq!(class, ContactClass::AntipodalPair);
        let cap = tangent_disk(&s, 2.0 + 1.0, Side::Internal);
        assert_eq!(disk_fits(&s, &cap, Side::Internal), (true, ContactClass::BoundaryArc));
        let wide = shapes::stadium(1.0, 6.0);
        let d = tangent_disk(&wide, 0.5, Side::Internal);
        assert_eq!(disk_fits(&wide, &d, Side::Internal).1, ContactClass::AntipodalPair);
        let narrow = shapes::rounded_rectangle(4.0, 3.0, 1.0);
        let d = tangent_disk(&narrow, 2.0, Side::Internal);
        assert_eq!(disk_fits(&narrow, &d, Side::Internal), (true, ContactClass::Singleton));
    }

    #[test]
    fn circle_is_rolling_by_both_methods() {
        let c = shapes::circle(1.0, 1.0);
        let rep = classify_domain(&c, Method::Both, &RollingOptions::default()).unwrap();
        assert!(rep.internal && rep.external && rep.rolling);
    }
}
