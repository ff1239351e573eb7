use kappa_roll::decompose::{decompose, RegionKind};
use kappa_roll::oracle::{opening_components, oracle_rolling, rasterize};
use kappa_roll::rolling::{classify_domain, Method, RollingOptions, Side};
use kappa_roll::shapes;

#[test]
fn oracle_agrees_with_direct_method() {
    let opts = RollingOptions::default();
    for f in shapes::corpus() {
        let cell = f.shape.r() / 100.0;
        let report = classify_domain(&f.shape, Method::Direct, &opts).unwrap();
        let internal = oracle_rolling(&f.shape, Side::Internal, cell).unwrap();
        let external = oracle_rolling(&f.shape, Side::External, cell).unwrap();
        assert_eq!(internal.holds, report.internal, "{} internal", f.name);
        assert_eq!(external.holds, report.external, "{} external", f.name);
    }
}

#[test]
fn opening_components_match_rolling_regions() {
    for f in shapes::corpus() {
        let cell = f.shape.r() / 50.0;
        for side in [Side::Internal, Side::External] {
            let components = opening_components(&f.shape, side, cell).unwrap();
            let d = decompose(&f.shape, side).unwrap();
            assert_eq!(components.len(), d.count(RegionKind::Rolling), "{} {side:?}", f.name);
        }
    }
}

#[test]
fn refining_keeps_clear_verdicts() {
    for f in shapes::corpus() {
        let coarse = f.shape.r() / 25.0;
        for side in [Side::Internal, Side::External] {
            let a = oracle_rolling(&f.shape, side, coarse).unwrap();
            let threshold = f.shape.r() - 2.0 * coarse;
            let margin = (a.min_clearance - threshold).abs() / coarse;
            if margin < 4.0 {
                continue;
            }
            let b = oracle_rolling(&f.shape, side, coarse / 2.0).unwrap();
            assert_eq!(a.holds, b.holds, "{} {side:?} flips on refinement", f.name);
        }
    }
}

#[test]
fn raster_area_converges() {
    let c = shapes::circle(2.0, 1.0);
    let mask = rasterize(&c, 0.01).unwrap();
    let area = std::f64::consts::PI * 4.0;
    assert!((mask.area() - area).abs() < 1e-3 * area);
}
