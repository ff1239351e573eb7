//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use kappa_roll::classify::{
    classify_subcurve, find_end, find_essential_pairs, find_long_arc, find_parallel_tangents, nonconvexity_witness,
    verify_half_disk, End, SweepOptions,
};
use kappa_roll::cli::run_with;
use kappa_roll::curve::Loop;
use kappa_roll::decompose::{decompose, Decomposition, RegionKind};
use kappa_roll::io::{write_loop, Metadata};
use kappa_roll::oracle::{opening, oracle_rolling, side_mask, GridMask, GridSpec};
use kappa_roll::rolling::{classify_domain, Method, RollingOptions, Side};
use kappa_roll::shapes::{self, Fixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FUZZ_LOOPS: usize = 200;
const FUZZ_SEED: u64 = 0x6b61_7070;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

struct Fuzzed {
    shape: Loop,
    long_arc: Option<(f64, f64)>,
    ends: Vec<End>,
    essential: usize,
}

fn fuzz_corpus() -> Vec<Loop> {
    let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
    (0..FUZZ_LOOPS).map(|_| shapes::random_loop(&mut rng)).collect()
}

/// Long arc and ends of one loop, as the `ends` command finds them.
fn analyse(l: Loop) -> Result<Fuzzed, String> {
    let sweep = SweepOptions::default();
    let pairs = find_essential_pairs(&l, &sweep);
    let mut ends = Vec::new();
    let mut long_arc = None;
    if pairs.is_empty() {
        let (a, b) = find_long_arc(&l, &sweep).map_err(|e| e.to_string())?;
        long_arc = Some((a, b));
        ends.push(find_end(&l, a, b).map_err(|e| e.to_string())?);
    }
    for p in &pairs {
        ends.push(find_end(&l, p.t1, p.t2).map_err(|e| e.to_string())?);
        ends.push(find_end(&l, p.t2, p.t1).map_err(|e| e.to_string())?);
    }
    Ok(Fuzzed {
        shape: l,
        long_arc,
        ends,
        essential: pairs.len(),
    })
}

fn length_bounds(fuzz: &[Fuzzed], elapsed: f64) -> Outcome {
    let mut checked = (0, 0, 0);
    for (i, f) in fuzz.iter().enumerate() {
        let l = &f.shape;
        let r = l.r();
        let tol = 1e-6 * r;
        ensure!(
            l.length() >= 2.0 * PI * r - tol,
            "loop {i}: length {} < 2 pi r",
            l.length()
        );
        if let Some((a, b)) = f.long_arc {
            let len = l.forward_distance(a, b);
            ensure!(len >= PI * r - tol, "loop {i}: long arc length {len} < pi r");
            ensure!(l.length() >= len - tol, "loop {i}: long arc longer than loop");
            let (_, section) = find_parallel_tangents(l, a, b).map_err(|e| format!("loop {i}: {e}"))?;
            ensure!(
                section.length >= 2.0 * r - tol,
                "loop {i}: cross section {} < 2r",
                section.length
            );
            checked.2 += 1;
            checked.1 += 1;
        }
        for e in &f.ends {
            let chord = l.point_at(e.t1).dist(l.point_at(e.t2));
            ensure!((chord - 2.0 * r).abs() <= tol, "loop {i}: end chord {chord} != 2r");
            ensure!(e.length >= PI * r - tol, "loop {i}: end length {} < pi r", e.length);
            ensure!(
                e.length >= chord - tol && l.length() >= e.length - tol,
                "loop {i}: length chain broken"
            );
            if let Some((a, b)) = f.long_arc {
                ensure!(
                    l.forward_distance(a, b) >= e.length - tol,
                    "loop {i}: end longer than its long arc"
                );
            }
            checked.0 += 1;
        }
    }
    ensure!(elapsed < 60.0, "took {elapsed:.1} s, budget 60 s");
    Ok(format!(
        "{} loops, {} ends, {} long arcs, {} cross sections in {elapsed:.1} s",
        fuzz.len(),
        checked.0,
        checked.1,
        checked.2
    ))
}

fn half_disks(fuzz: &[Fuzzed]) -> Outcome {
    let results: Vec<Result<(), String>> = fuzz
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, f)| {
            f.ends.iter().map(move |e| {
                verify_half_disk(&f.shape, e)
                    .map(|_| ())
                    .map_err(|err| format!("loop {i}: {err}"))
            })
        })
        .collect();
    let n = results.len();
    if let Some(Err(e)) = results.into_iter().find(Result::is_err) {
        return Err(e);
    }
    ensure!(n > 0, "no ends to check");
    Ok(format!("{n} ends, 1026 samples each, no violations"))
}

fn equivalence(corpus: &[Fixture]) -> Outcome {
    ensure!(corpus.len() >= 20, "corpus has only {} shapes", corpus.len());
    let categories = [(true, false), (false, true), (false, false)];
    for c in categories {
        ensure!(
            corpus.iter().any(|f| (f.internal, f.external) == c),
            "no fixture with verdicts {c:?}"
        );
    }
    ensure!(
        corpus.iter().any(|f| f.internal && f.external && !f.shape.is_convex()),
        "no rolling non-convex fixture"
    );
    let opts = RollingOptions::default();
    let mut disagreements = Vec::new();
    for f in corpus {
        let l = &f.shape;
        let direct = classify_domain(l, Method::Direct, &opts).map_err(|e| e.to_string())?;
        let terminal = classify_domain(l, Method::TerminalCriterion, &opts).map_err(|e| e.to_string())?;
        let cell = l.r() / 100.0;
        let oracle = (
            oracle_rolling(l, Side::Internal, cell)
                .map_err(|e| e.to_string())?
                .holds,
            oracle_rolling(l, Side::External, cell)
                .map_err(|e| e.to_string())?
                .holds,
        );
        let d = (direct.internal, direct.external);
        if d != (terminal.internal, terminal.external) || d != oracle {
            disagreements.push(f.name);
        }
    }
    ensure!(disagreements.is_empty(), "disagreements on {disagreements:?}");
    Ok(format!("{} shapes, direct = terminal = oracle at r/100", corpus.len()))
}

fn blaschke(corpus: &[Fixture]) -> Outcome {
    let opts = RollingOptions::default();
    let convex: Vec<&Fixture> = corpus.iter().filter(|f| f.shape.is_convex()).collect();
    ensure!(!convex.is_empty(), "no convex fixtures");
    for f in &convex {
        let l = &f.shape;
        for method in [Method::Direct, Method::TerminalCriterion] {
            let report = classify_domain(l, method, &opts).map_err(|e| e.to_string())?;
            ensure!(report.rolling, "{} not rolling by {method:?}", f.name);
        }
        let cell = l.r() / 100.0;
        for side in [Side::Internal, Side::External] {
            let v = oracle_rolling(l, side, cell).map_err(|e| e.to_string())?;
            ensure!(v.holds, "{} fails the {side:?} oracle", f.name);
        }
    }
    Ok(format!("{} convex shapes rolling by all three methods", convex.len()))
}

fn non_convexity(corpus: &[Fixture]) -> Outcome {
    let mut with_pairs = 0;
    for f in corpus {
        if !find_essential_pairs(&f.shape, &SweepOptions::default()).is_empty() {
            with_pairs += 1;
            ensure!(!f.shape.is_convex(), "{} has essential pairs but is convex", f.name);
        }
    }
    for (name, l) in [("dumbbell", shapes::dumbbell()), ("clover", shapes::clover())] {
        let ts = nonconvexity_witness(&l).map_err(|e| format!("{name}: {e}"))?;
        let dir = l.tangent_at(ts[0]);
        for &t in &ts[1..] {
            ensure!(
                dir.cross(l.tangent_at(t)).abs() < 1e-9,
                "{name}: tangents at {ts:?} not parallel"
            );
        }
        ensure!(
            ts[0] < ts[1] && ts[1] < ts[2],
            "{name}: witness parameters not distinct"
        );
    }
    Ok(format!(
        "{with_pairs} shapes with essential pairs, all non-convex; witnesses on dumbbell and clover"
    ))
}

/// Sub-curves between nearby terminals, seen in the chord frame with the
/// terminals on the x-axis. If the sub-curve stays in the open half band
/// `|x| < r, y >= 0`, it must stay on or below the radius-`r` circle through
/// the terminals whose centre is on the non-positive y-axis.
fn band_violation(l: &Loop, t1: f64, span: f64, flip: bool) -> Option<bool> {
    let r = l.r();
    let eps = l.tolerances().eps_geom;
    let (a, b) = (l.point_at(t1), l.point_at(t1 + span));
    let chord = a.dist(b);
    if chord >= 2.0 * r || chord <= 1e-6 * r {
        return None;
    }
    let m = a.midpoint(b);
    let u = (b - a) * (1.0 / chord);
    let v = if flip { -u.perp() } else { u.perp() };
    let depth = (r * r - 0.25 * chord * chord).sqrt();
    let samples = 128;
    let h = span / samples as f64;
    // Between samples the curve can bulge by at most h^2 / (8 r).
    let slack = h * h / (8.0 * r) + eps;
    let mut above = false;
    for k in 0..=samples {
        let p = l.point_at(t1 + h * k as f64) - m;
        let (x, y) = (p.dot(u), p.dot(v));
        if x.abs() >= r - slack || y < -eps {
            return None;
        }
        let cap = (r * r - x * x).sqrt() - depth;
        above |= y > cap + 1e3 * eps;
    }
    Some(above)
}

fn exclusivity_and_band(fuzz: &[Fuzzed]) -> Outcome {
    const SUBCURVES: usize = 100_000;
    let per_loop = SUBCURVES.div_ceil(fuzz.len());
    let counts: Vec<Result<(usize, usize, usize), String>> = fuzz
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let l = &f.shape;
            let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED ^ i as u64);
            let (mut sampled, mut in_band, mut classified) = (0, 0, 0);
            for _ in 0..per_loop {
                let t1 = rng.gen_range(0.0..l.length());
                let span = rng.gen_range(1e-3..PI) * l.r();
                let flip = rng.gen_bool(0.5);
                sampled += 1;
                if let Some(above) = band_violation(l, t1, span, flip) {
                    in_band += 1;
                    if above {
                        return Err(format!("loop {i}: sub-curve at {t1} of length {span} leaves the cap"));
                    }
                }
                if sampled % 10 == 0 {
                    let t2 = rng.gen_range(0.0..l.length());
                    if let Ok(c) = classify_subcurve(l, t1, t2) {
                        classified += 1;
                        if c.is_short && c.is_long {
                            return Err(format!("loop {i}: [{t1}, {t2}] is short and long"));
                        }
                    }
                }
            }
            Ok((sampled, in_band, classified))
        })
        .collect();
    let (mut sampled, mut in_band, mut classified) = (0, 0, 0);
    for c in counts {
        let (s, b, k) = c?;
        sampled += s;
        in_band += b;
        classified += k;
    }
    ensure!(sampled >= SUBCURVES, "only {sampled} sub-curves");
    Ok(format!(
        "{sampled} sub-curves ({in_band} inside a band), {classified} classified, no violations"
    ))
}

fn check_decomposition(l: &Loop, d: &Decomposition, cell: f64) -> Result<(), String> {
    let r = l.r();
    let spec = GridSpec::for_loop(l, cell).map_err(|e| e.to_string())?;
    let side = side_mask(l, &spec, d.side);
    let masks: Vec<GridMask> = d.regions.iter().map(|g| g.rasterize(&spec)).collect();

    let mut union = spec.empty_mask();
    for m in &masks {
        union = union.or(m);
    }
    let sym = union.and_not(&side).count() + side.and_not(&union).count();
    let ratio = sym as f64 / side.count() as f64;
    ensure!(ratio <= 0.005, "coverage symmetric difference {:.3}%", 100.0 * ratio);

    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            let overlap = masks[i].and(&masks[j]).count() as f64;
            let smaller = masks[i].count().min(masks[j].count()) as f64;
            ensure!(
                overlap <= 0.001 * smaller,
                "regions {i} and {j} overlap in {overlap} cells"
            );
        }
    }

    let opts = RollingOptions::default();
    for (k, (region, mask)) in d.regions.iter().zip(&masks).enumerate() {
        match region.kind {
            RegionKind::Rolling => {
                let own = region.as_loop(l.kappa()).map_err(|e| format!("region {k}: {e}"))?;
                let report = classify_domain(&own, Method::Direct, &opts).map_err(|e| e.to_string())?;
                let ok = if region.unbounded {
                    report.external
                } else {
                    report.internal
                };
                ensure!(ok, "rolling region {k} does not re-validate");
            }
            RegionKind::Excluded | RegionKind::Neck => {
                let field = spec.distance_to(&spec.boundary(&region.chain()));
                let eroded = field.at_least(mask, r - 1e-9 * r).count();
                ensure!(
                    eroded == 0,
                    "{:?} region {k} has {eroded} cells of r-erosion",
                    region.kind
                );
            }
        }
    }

    let field = spec.distance_to(&spec.boundary(l.prims()));
    let components = opening(&field, &side, r).components().len();
    let rolling = d.count(RegionKind::Rolling);
    ensure!(
        components == rolling,
        "{components} opening components vs {rolling} rolling regions"
    );
    Ok(())
}

fn decomposition() -> Outcome {
    let mut notes = Vec::new();
    for (name, l, rolling, necks) in [
        ("dumbbell", shapes::dumbbell(), 2, 1),
        ("clover", shapes::clover(), 3, 3),
    ] {
        let d = decompose(&l, Side::Internal).map_err(|e| format!("{name}: {e}"))?;
        let counts = (
            d.count(RegionKind::Rolling),
            d.count(RegionKind::Neck),
            d.count(RegionKind::Excluded),
        );
        ensure!(counts == (rolling, necks, 0), "{name}: got {counts:?}");
        check_decomposition(&l, &d, l.r() / 100.0).map_err(|e| format!("{name}: {e}"))?;

        let parts = 100usize.div_ceil(l.pieces().len()).max(2);
        let fine = shapes::subdivided(&l, parts);
        let start = Instant::now();
        let df = decompose(&fine, Side::Internal).map_err(|e| format!("{name} subdivided: {e}"))?;
        let secs = start.elapsed().as_secs_f64();
        ensure!(
            secs < 30.0,
            "{name} with {} pieces took {secs:.1} s",
            fine.pieces().len()
        );
        ensure!(
            df.count(RegionKind::Rolling) == rolling && df.count(RegionKind::Neck) == necks,
            "{name} subdivided: counts changed"
        );
        notes.push(format!(
            "{name} {rolling}+{necks} ({} pieces in {secs:.2} s)",
            fine.pieces().len()
        ));
    }
    Ok(notes.join(", "))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kappa-roll").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, out)
}

fn determinism(dir: &Path) -> Outcome {
    let mut runs = 0;
    for (name, l) in [("dumbbell", shapes::dumbbell()), ("keyhole", shapes::keyhole())] {
        let path = dir.join(format!("{name}.loop"));
        std::fs::write(&path, write_loop(&l, Metadata::default())).map_err(|e| e.to_string())?;
        let p = path.to_str().unwrap();
        let commands: [&[&str]; 7] = [
            &["validate", p],
            &["classify", p],
            &["terminals", p],
            &["ends", p],
            &["decompose", p, "--side", "external"],
            &["oracle", p, "--resolution", "0.05"],
            &[
                "render",
                p,
                "--overlay",
                "decomposition",
                "--overlay",
                "ends",
                "--overlay",
                "lenses",
            ],
        ];
        for args in commands {
            let a = cli(args);
            let b = cli(args);
            ensure!(a == b, "{name}: `{}` differs between runs", args[0]);
            runs += 1;
        }
    }
    Ok(format!("{runs} commands byte-identical across repeated runs"))
}

fn run(outcome: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(outcome)) {
        Ok(o) => o,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

fn main() {
    let start = Instant::now();
    let analysed: Result<Vec<Fuzzed>, String> = fuzz_corpus().into_par_iter().map(analyse).collect();
    let fuzz_secs = start.elapsed().as_secs_f64();
    let corpus = shapes::corpus();
    let dir = tempfile::tempdir().expect("temp dir");

    let fuzz_outcome = |f: &dyn Fn(&[Fuzzed]) -> Outcome| match &analysed {
        Ok(fz) => run(|| f(fz)),
        Err(e) => Err(format!("fuzz corpus analysis failed: {e}")),
    };
    let results = [
        ("length bounds", fuzz_outcome(&|fz| length_bounds(fz, fuzz_secs))),
        ("half-disk containment", fuzz_outcome(&half_disks)),
        ("method equivalence", run(|| equivalence(&corpus))),
        ("convex loops roll", run(|| blaschke(&corpus))),
        ("essential pairs imply non-convex", run(|| non_convexity(&corpus))),
        ("exclusivity and band", fuzz_outcome(&exclusivity_and_band)),
        ("decomposition", run(decomposition)),
        ("determinism", run(|| determinism(dir.path()))),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    if let Ok(fz) = &analysed {
        let essential = fz.iter().filter(|f| f.essential > 0).count();
        println!("fuzz corpus: {} loops, {essential} with essential pairs", fz.len());
    }
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
