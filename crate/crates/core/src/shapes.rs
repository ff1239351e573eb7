//! Fixture loops built from turtle motifs, plus a random loop generator.
//!
//! All fixtures use `kappa = 1` unless stated otherwise, so lengths are in
//! units of the rolling radius.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::curve::{bbox_of, CurveError, Loop, Turtle};
use crate::geometry::{Point2, Prim, Similarity};

/// Translates a chain so its bounding box is centred on the origin.
fn centered(prims: Vec<Prim>) -> Vec<Prim> {
    let (lo, hi) = bbox_of(&prims);
    let shift = Similarity::rigid(0.0, (lo + hi) * -0.5);
    prims.iter().map(|p| p.transformed(&shift)).collect()
}

fn build(prims: Vec<Prim>, kappa: f64) -> Loop {
    Loop::new(centered(prims), kappa).expect("fixture must validate")
}

/// Circle of the given radius as four clockwise quarter arcs, starting at `(0, radius)`.
pub fn circle(radius: f64, kappa: f64) -> Loop {
    let prims = (0..4)
        .map(|k| Prim::arc(Point2::ORIGIN, radius, FRAC_PI_2 - k as f64 * FRAC_PI_2, -FRAC_PI_2))
        .collect();
    Loop::new(prims, kappa).expect("circle must validate")
}

/// Two semicircular caps of `cap` radius joined by straight sides of length `side`.
pub fn stadium(cap: f64, side: f64) -> Loop {
    let mut t = Turtle::new(Point2::new(-side / 2.0, cap), 0.0);
    t.forward(side).right(cap, PI).forward(side).right(cap, PI);
    Loop::new(t.finish(), 1.0).expect("stadium must validate")
}

/// Regular `n`-gon with sides `side` and corners rounded at `corner`.
pub fn rounded_polygon(n: usize, side: f64, corner: f64) -> Loop {
    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..n {
        t.forward(side).right(corner, TAU / n as f64);
    }
    build(t.finish(), 1.0)
}

pub fn rounded_rectangle(width: f64, height: f64, corner: f64) -> Loop {
    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..2 {
        t.forward(width)
            .right(corner, FRAC_PI_2)
            .forward(height)
            .right(corner, FRAC_PI_2);
    }
    build(t.finish(), 1.0)
}

/// Parameters of an `n`-fold flower: lobes on arms of half-width `neck`.
#[derive(Debug, Clone, Copy)]
pub struct Flower {
    pub arms: usize,
    /// Half-width of each arm.
    pub neck: f64,
    pub lobe: f64,
    pub fillet: f64,
    /// Straight wall length on each side of an arm.
    pub wall: f64,
    /// Radius of the concave turn between adjacent arms.
    pub hub: f64,
}

impl Flower {
    pub fn prims(&self) -> Vec<Prim> {
        let alpha = ((self.neck + self.fillet) / (self.lobe + self.fillet)).acos();
        let beta = 2.0 * alpha + PI;
        let gamma = PI - TAU / self.arms as f64;
        let mut t = Turtle::new(Point2::ORIGIN, 0.0);
        for _ in 0..self.arms {
            t.forward(self.wall)
                .left(self.fillet, alpha)
                .right(self.lobe, beta)
                .left(self.fillet, alpha)
                .forward(self.wall);
            if gamma > 1e-12 {
                t.left(self.hub, gamma);
            }
        }
        centered(t.finish())
    }

    pub fn build(&self) -> Loop {
        Loop::new(self.prims(), 1.0).expect("flower must validate")
    }
}

/// Two radius-2 lobes joined by a neck of width 1.6 (internal rolling fails, external holds).
pub fn dumbbell() -> Loop {
    Flower {
        arms: 2,
        neck: 0.8,
        lobe: 2.0,
        fillet: 1.0,
        wall: 1.0,
        hub: 1.0,
    }
    .build()
}

/// Three lobes on arms of width 1.2 around a concave hub.
pub fn clover() -> Loop {
    Flower {
        arms: 3,
        neck: 0.6,
        lobe: 2.0,
        fillet: 1.0,
        wall: 2.5,
        hub: 1.0,
    }
    .build()
}

/// Non-convex but rolling: a waist of width 3 between radius-2.5 lobes.
pub fn peanut() -> Loop {
    Flower {
        arms: 2,
        neck: 1.5,
        lobe: 2.5,
        fillet: 1.0,
        wall: 1.0,
        hub: 1.0,
    }
    .build()
}

/// Closed channel gadget: a narrow slot of half-width `half` and depth
/// `depth` ending in a round cavity, cut into a side the turtle is walking.
/// Net turning is zero; the turtle advances by `2 * lip + 2 * half`.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    pub half: f64,
    pub lip: f64,
    pub depth: f64,
    pub cavity: f64,
    pub fillet: f64,
}

impl Channel {
    pub const NARROW: Channel = Channel {
        half: 0.6,
        lip: 1.0,
        depth: 1.5,
        cavity: 2.0,
        fillet: 1.0,
    };

    pub fn advance(&self) -> f64 {
        2.0 * self.lip + 2.0 * self.half
    }

    pub fn draw(&self, t: &mut Turtle) {
        let alpha = ((self.half + self.fillet) / (self.cavity + self.fillet)).acos();
        let beta = 2.0 * alpha + PI;
        t.right(self.lip, FRAC_PI_2)
            .forward(self.depth)
            .right(self.fillet, alpha)
            .left(self.cavity, beta)
            .right(self.fillet, alpha)
            .forward(self.depth)
            .right(self.lip, FRAC_PI_2);
    }
}

/// Rounded slab with two slots opening to the outside. Internal rolling
/// holds; external rolling fails inside the slots.
pub fn keyhole() -> Loop {
    keyhole_with(Channel::NARROW)
}

pub fn keyhole_with(ch: Channel) -> Loop {
    let corner = 2.0;
    let (before, after) = (2.0, 10.8);
    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..2 {
        t.forward(before);
        ch.draw(&mut t);
        t.forward(after)
            .right(corner, FRAC_PI_2)
            .forward(6.0)
            .right(corner, FRAC_PI_2);
    }
    build(t.finish(), 1.0)
}

/// Dumbbell whose rectangular lobes carry slots: fails both sides.
pub fn neither() -> Loop {
    let ch = Channel::NARROW;
    let (neck, wall, corner, lobe_h) = (0.8, 1.0, 2.0, 6.0);
    let (before, after) = (3.0, 2.0);
    let above = 3.0;
    let below = lobe_h + 2.0 * corner - above - 4.0 - 2.0 * neck;
    let bottom = before + ch.advance() + after;
    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..2 {
        t.forward(wall)
            .left(1.0, FRAC_PI_2)
            .forward(above)
            .right(1.0, FRAC_PI_2)
            .forward(before);
        ch.draw(&mut t);
        t.forward(after)
            .right(corner, FRAC_PI_2)
            .forward(lobe_h)
            .right(corner, FRAC_PI_2)
            .forward(bottom)
            .right(1.0, FRAC_PI_2)
            .forward(below)
            .left(1.0, FRAC_PI_2)
            .forward(wall);
    }
    build(t.finish(), 1.0)
}

/// `n` convex bulges of radius `bulge` separated by concave dips of radius `dip`
/// turning through `dip_angle`.
pub fn gear(n: usize, bulge: f64, dip: f64, dip_angle: f64) -> Loop {
    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..n {
        t.right(bulge, TAU / n as f64 + dip_angle).left(dip, dip_angle);
    }
    build(t.finish(), 1.0)
}

/// A named fixture with its expected rolling verdicts.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub shape: Loop,
    pub internal: bool,
    pub external: bool,
}

/// Shape corpus: convex shapes, the four qualitative categories, and extras.
pub fn corpus() -> Vec<Fixture> {
    let f = |name, shape, internal, external| Fixture {
        name,
        shape,
        internal,
        external,
    };
    vec![
        f("circle", circle(1.0, 1.0), true, true),
        f("circle-1.5", circle(1.5, 1.0), true, true),
        f("circle-4", circle(4.0, 1.0), true, true),
        f("stadium", stadium(1.0, 2.0), true, true),
        f("stadium-wide", stadium(1.5, 5.0), true, true),
        f("rounded-triangle", rounded_polygon(3, 3.0, 1.0), true, true),
        f("rounded-square", rounded_polygon(4, 2.0, 1.2), true, true),
        f("rounded-hexagon", rounded_polygon(6, 1.5, 2.0), true, true),
        f("rounded-rectangle", rounded_rectangle(4.0, 1.0, 1.0), true, true),
        f("dumbbell", dumbbell(), false, true),
        f(
            "dumbbell-narrow",
            Flower {
                arms: 2,
                neck: 0.6,
                lobe: 2.0,
                fillet: 1.0,
                wall: 2.0,
                hub: 1.0,
            }
            .build(),
            false,
            true,
        ),
        f("clover", clover(), false, true),
        f(
            "flower-4",
            Flower {
                arms: 4,
                neck: 0.7,
                lobe: 1.8,
                fillet: 1.0,
                wall: 3.0,
                hub: 1.0,
            }
            .build(),
            false,
            true,
        ),
        f("peanut", peanut(), true, true),
        f(
            "peanut-slim",
            Flower {
                arms: 2,
                neck: 1.2,
                lobe: 2.0,
                fillet: 1.0,
                wall: 0.5,
                hub: 1.0,
            }
            .build(),
            true,
            true,
        ),
        f(
            "trefoil-wide",
            Flower {
                arms: 3,
                neck: 1.3,
                lobe: 2.2,
                fillet: 1.0,
                wall: 2.0,
                hub: 1.0,
            }
            .build(),
            true,
            true,
        ),
        f("keyhole", keyhole(), true, false),
        f(
            "keyhole-wide",
            keyhole_with(Channel {
                half: 1.2,
                ..Channel::NARROW
            }),
            true,
            true,
        ),
        f("neither", neither(), false, false),
        f("gear-5", gear(5, 3.0, 2.0, 0.4), true, true),
        f("gear-7", gear(7, 2.5, 1.0, 0.5), true, true),
        f("gear-8-shallow", gear(8, 4.0, 3.0, 0.2), true, true),
    ]
}

/// Draws a random valid loop built from an `n`-fold motif of runs and turns,
/// then applies a random similarity. Rejects and retries until the result
/// validates.
pub fn random_loop<R: Rng>(rng: &mut R) -> Loop {
    loop {
        if let Ok(l) = try_random_loop(rng) {
            return l;
        }
    }
}

fn try_random_loop<R: Rng>(rng: &mut R) -> Result<Loop, CurveError> {
    let n = rng.gen_range(2..=6usize);
    let steps = rng.gen_range(1..=3usize);
    let mut motif = Vec::with_capacity(steps + 1);
    let mut turned = 0.0;
    for _ in 0..steps {
        let run = if rng.gen_bool(0.6) {
            rng.gen_range(0.0..2.0)
        } else {
            0.0
        };
        let radius = rng.gen_range(1.0..4.0);
        let angle = rng.gen_range(-1.5..1.0);
        turned += angle;
        motif.push((run, radius, angle));
    }
    let last = -TAU / n as f64 - turned;
    motif.push((rng.gen_range(0.0..1.5), rng.gen_range(1.0..3.0), last));

    let mut t = Turtle::new(Point2::ORIGIN, 0.0);
    for _ in 0..n {
        for &(run, radius, angle) in &motif {
            t.forward(run).turn(radius, angle);
        }
    }
    let scale = rng.gen_range(0.5..2.0);
    let sim = Similarity {
        scale,
        angle: rng.gen_range(-PI..PI),
        offset: Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
    };
    let prims = t.finish().iter().map(|p| p.transformed(&sim)).collect();
    Loop::new(prims, 1.0 / scale)
}

/// Splits every piece into `parts` equal pieces; geometry is unchanged.
pub fn subdivided(l: &Loop, parts: usize) -> Loop {
    let mut prims = Vec::with_capacity(l.prims().len() * parts);
    for p in l.prims() {
        let len = p.length();
        for k in 0..parts {
            let s0 = len * k as f64 / parts as f64;
            let s1 = len * (k + 1) as f64 / parts as f64;
            prims.push(p.trim(s0, s1));
        }
    }
    Loop::new(prims, l.kappa()).expect("subdivision preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn corpus_validates() {
        let c = corpus();
        assert!(c.len() >= 20);
        for f in &c {
            assert!(f.shape.length() >= TAU * f.shape.r(), "{}", f.name);
        }
        assert!(c.iter().filter(|f| f.shape.is_convex()).count() >= 8);
    }

    #[test]
    fn dumbbell_is_not_convex() {
        assert!(!dumbbell().is_convex());
        assert!(stadium(1.0, 2.0).is_convex());
    }

    #[test]
    fn random_loops_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let l = random_loop(&mut rng);
            assert!(l.length() >= TAU * l.r() - 1e-9);
        }
    }

    #[test]
    fn subdivision_keeps_length() {
        let d = dumbbell();
        let s = subdivided(&d, 10);
        assert_eq!(s.pieces().len(), 10 * d.pieces().len());
        assert!((s.length() - d.length()).abs() < 1e-9);
    }
}
