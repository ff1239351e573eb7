use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use kappa_roll::io::{write_loop, Metadata};
use kappa_roll::shapes;
use kappa_roll_ffi::*;

fn parse(l: &kappa_roll::curve::Loop) -> *mut KrLoop {
    let text = CString::new(write_loop(l, Metadata::default())).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kr_loop_parse(text.as_ptr(), &mut out) }, KrStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = kr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { kr_string_free(p) };
    s
}

#[test]
fn loop_queries() {
    let l = parse(&shapes::stadium(1.0, 2.0));
    unsafe {
        let mut n = 0usize;
        assert_eq!(kr_loop_piece_count(l, &mut n), KrStatus::Ok);
        assert_eq!(n, 4);
        let mut len = 0.0;
        assert_eq!(kr_loop_length(l, &mut len), KrStatus::Ok);
        assert!((len - (2.0 * std::f64::consts::PI + 4.0)).abs() < 1e-12);
        let mut kappa = 0.0;
        assert_eq!(kr_loop_kappa(l, &mut kappa), KrStatus::Ok);
        assert_eq!(kappa, 1.0);
        let mut convex = false;
        assert_eq!(kr_loop_is_convex(l, &mut convex), KrStatus::Ok);
        assert!(convex);
        let (mut x, mut y) = (f64::NAN, f64::NAN);
        assert_eq!(kr_loop_point_at(l, len, &mut x, &mut y), KrStatus::Ok);
        let (mut x0, mut y0) = (f64::NAN, f64::NAN);
        kr_loop_point_at(l, 0.0, &mut x0, &mut y0);
        assert!((x - x0).abs() < 1e-12 && (y - y0).abs() < 1e-12);

        let mut v = KrVerdict::default();
        assert_eq!(kr_classify(l, KrMethod::Both, &mut v), KrStatus::Ok);
        assert!(v.internal && v.external && v.rolling);

        let mut json = ptr::null_mut();
        assert_eq!(kr_loop_to_json(l, &mut json), KrStatus::Ok);
        let text = take_string(json);
        assert_eq!(kappa_roll::io::parse_loop(&text).unwrap().pieces().len(), 4);
        kr_loop_free(l);
    }
}

#[test]
fn dumbbell_analysis() {
    let l = parse(&shapes::dumbbell());
    unsafe {
        let mut v = KrVerdict::default();
        assert_eq!(kr_classify(l, KrMethod::Terminal, &mut v), KrStatus::Ok);
        assert!(!v.internal && !v.rolling);
        let mut pairs = 0usize;
        assert_eq!(kr_essential_pair_count(l, 512, &mut pairs), KrStatus::Ok);
        assert!(pairs >= 1);
        assert_eq!(kr_essential_pair_count(l, 2, &mut pairs), KrStatus::OutOfRange);

        let mut d = ptr::null_mut();
        assert_eq!(kr_decompose(l, KrSide::Internal, &mut d), KrStatus::Ok);
        let mut n = 0usize;
        assert_eq!(kr_decomposition_region_count(d, &mut n), KrStatus::Ok);
        assert_eq!(n, 3);
        let mut kinds = Vec::new();
        for i in 0..n {
            let mut info = std::mem::MaybeUninit::<KrRegionInfo>::uninit();
            assert_eq!(kr_decomposition_region(d, i, info.as_mut_ptr()), KrStatus::Ok);
            let info = info.assume_init();
            assert!(!info.unbounded && info.area > 0.0);
            kinds.push(info.kind);
        }
        assert_eq!(kinds.iter().filter(|k| **k == KrRegionKind::Rolling).count(), 2);
        assert_eq!(kinds.iter().filter(|k| **k == KrRegionKind::Neck).count(), 1);

        let mut info = std::mem::MaybeUninit::<KrRegionInfo>::uninit();
        assert_eq!(kr_decomposition_region(d, n, info.as_mut_ptr()), KrStatus::OutOfRange);
        assert!(last_error().contains("region 3 of 3"));

        let mut json = ptr::null_mut();
        assert_eq!(kr_decomposition_to_json(d, &mut json), KrStatus::Ok);
        assert!(take_string(json).contains("\"Neck\""));

        let mut svg = ptr::null_mut();
        assert_eq!(kr_render_svg(l, d, &mut svg), KrStatus::Ok);
        assert!(take_string(svg).contains("class=\"neck\""));
        assert_eq!(kr_render_svg(l, ptr::null(), &mut svg), KrStatus::Ok);
        assert!(!take_string(svg).contains("class=\"neck\""));

        kr_decomposition_free(d);
        kr_loop_free(l);
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(kr_loop_parse(ptr::null(), &mut out), KrStatus::NullArgument);
        assert!(out.is_null());
        let text = CString::new("{\"kappa\": 1.0").unwrap();
        assert_eq!(kr_loop_parse(text.as_ptr(), ptr::null_mut()), KrStatus::NullArgument);
        assert_eq!(kr_loop_parse(text.as_ptr(), &mut out), KrStatus::Parse);
        assert!(last_error().contains("syntax"));

        let tight = CString::new(
            r#"{"kappa": 1.0, "pieces": [{"type": "arc", "center": [0.0, 0.0], "radius": 0.5, "start_angle": 0.0, "sweep": -6.283185307179586}]}"#,
        )
        .unwrap();
        assert_eq!(kr_loop_parse(tight.as_ptr(), &mut out), KrStatus::InvalidLoop);
        assert!(last_error().contains("piece 0"));

        let bad_utf8 = [0x7bu8, 0xff, 0x00];
        assert_eq!(kr_loop_parse(bad_utf8.as_ptr().cast(), &mut out), KrStatus::InvalidUtf8);

        let mut len = 0.0;
        assert_eq!(kr_loop_length(ptr::null(), &mut len), KrStatus::NullArgument);
        kr_loop_free(ptr::null_mut());
        kr_decomposition_free(ptr::null_mut());
        kr_string_free(ptr::null_mut());
    }
    let version = unsafe { CStr::from_ptr(kr_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_per_thread() {
    let text = CString::new("[").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kr_loop_parse(text.as_ptr(), &mut out) }, KrStatus::Parse);
    std::thread::spawn(|| assert!(kr_last_error().is_null()))
        .join()
        .unwrap();
    assert!(!kr_last_error().is_null());
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(crate_dir().join("include/kappa_roll.h")).unwrap();
    for name in [
        "kr_loop_parse",
        "kr_loop_free",
        "kr_classify",
        "kr_decompose",
        "kr_decomposition_region",
        "kr_render_svg",
        "kr_last_error",
        "KR_STATUS_INVALID_LOOP",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the static library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    // Test binaries live in <target>/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libkappa_roll_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");

    let input = dir.path().join("dumbbell.loop");
    std::fs::write(&input, write_loop(&shapes::dumbbell(), Metadata::default())).unwrap();
    let out = Command::new(&bin).arg(&input).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("internal=0"), "{stdout}");
    assert!(stdout.contains("regions=3 rolling=2 neck=1"), "{stdout}");
}
