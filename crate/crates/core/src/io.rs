//! Loop files, analysis reports and SVG rendering.
//!
//! Loops and reports are JSON. Every float is written with 17 significant
//! digits, so files round-trip exactly and golden outputs are byte-stable.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use thiserror::Error;

use crate::classify::{End, HalfDisk, TerminalPair};
use crate::curve::{CurveError, Loop, ValidateOptions};
use crate::decompose::{Decomposition, Region, RegionKind};
use crate::geometry::{CircularArcPrim, Disk, Lens, Point2, Prim, Tolerances};
use crate::oracle::OracleVerdict;
use crate::rolling::RollingReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {message}", locus(.piece, .field))]
    Schema {
        piece: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("{}: {source}", locus(.piece, .field))]
    Validation {
        piece: Option<usize>,
        field: Option<String>,
        source: CurveError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn locus(piece: &Option<usize>, field: &Option<String>) -> String {
    match (*piece, field) {
        (Some(i), Some(f)) => format!("piece {i}, field `{f}`"),
        (Some(i), None) => format!("piece {i}"),
        (None, Some(f)) => format!("field `{f}`"),
        (None, None) => "loop".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PieceSpec {
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    Segment {
        from: [f64; 2],
        to: [f64; 2],
    },
}

impl PieceSpec {
    pub fn to_prim(&self) -> Prim {
        match *self {
            PieceSpec::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Prim::arc(Point2::new(center[0], center[1]), radius, start_angle, sweep),
            PieceSpec::Segment { from, to } => Prim::segment(Point2::new(from[0], from[1]), Point2::new(to[0], to[1])),
        }
    }

    pub fn from_prim(p: &Prim) -> Self {
        match p {
            Prim::Arc(a) => PieceSpec::Arc {
                center: [a.center.x, a.center.y],
                radius: a.radius,
                start_angle: a.start_angle,
                sweep: a.sweep,
            },
            Prim::Segment(s) => PieceSpec::Segment {
                from: [s.from.x, s.from.y],
                to: [s.to.x, s.to.y],
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

/// On-disk form of a loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub kappa: f64,
    pub pieces: Vec<PieceSpec>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl LoopSpec {
    pub fn from_loop(l: &Loop, metadata: Metadata) -> Self {
        Self {
            kappa: l.kappa(),
            pieces: l.prims().iter().map(PieceSpec::from_prim).collect(),
            metadata,
        }
    }

    /// Validates into a loop, with an optional curvature bound and tolerance
    /// override.
    pub fn to_loop(&self, kappa: Option<f64>, tolerances: Option<Tolerances>) -> Result<Loop, IoError> {
        let prims = self.pieces.iter().map(PieceSpec::to_prim).collect();
        let kappa = kappa.unwrap_or(self.kappa);
        Loop::validate(
            prims,
            kappa,
            ValidateOptions {
                tolerances,
                ..ValidateOptions::default()
            },
        )
        .map_err(validation_error)
    }
}

fn validation_error(source: CurveError) -> IoError {
    let (piece, field) = match &source {
        CurveError::BadKappa(_) => (None, Some("kappa")),
        CurveError::DegeneratePiece { index } => (Some(*index), None),
        CurveError::NotClosed { index, .. } => (Some(*index), None),
        CurveError::NotC1 { junction, .. } => (Some(*junction), None),
        CurveError::CurvatureExceeded { index, .. } => (Some(*index), Some("radius")),
        CurveError::SelfIntersecting { a, .. } => (Some(*a), None),
        _ => (None, None),
    };
    IoError::Validation {
        piece,
        field: field.map(str::to_string),
        source,
    }
}

/// Parses loop-file text into its spec, reporting the locus of any error.
pub fn parse_loop_spec(text: &str) -> Result<LoopSpec, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let schema = |piece: Option<usize>, field: Option<&str>, message: String| IoError::Schema {
        piece,
        field: field.map(str::to_string),
        message,
    };
    let obj = value
        .as_object()
        .ok_or_else(|| schema(None, None, "expected an object".into()))?;
    let kappa = obj
        .get("kappa")
        .and_then(Value::as_f64)
        .ok_or_else(|| schema(None, Some("kappa"), "missing or not a number".into()))?;
    let raw = obj
        .get("pieces")
        .and_then(Value::as_array)
        .ok_or_else(|| schema(None, Some("pieces"), "missing or not a list".into()))?;
    let mut pieces = Vec::with_capacity(raw.len());
    for (i, p) in raw.iter().enumerate() {
        let piece: PieceSpec = serde_json::from_value(p.clone()).map_err(|e| {
            let message = e.to_string();
            let field = message
                .split('`')
                .nth(1)
                .filter(|_| message.contains("field"))
                .map(str::to_string);
            IoError::Schema {
                piece: Some(i),
                field,
                message,
            }
        })?;
        pieces.push(piece);
    }
    let metadata = match obj.get("metadata") {
        None | Some(Value::Null) => Metadata::default(),
        Some(m) => serde_json::from_value(m.clone()).map_err(|e| schema(None, Some("metadata"), e.to_string()))?,
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "kappa" | "pieces" | "metadata") {
            return Err(schema(None, Some(key), "unknown field".into()));
        }
    }
    Ok(LoopSpec {
        kappa,
        pieces,
        metadata,
    })
}

/// Parses and validates a loop file.
pub fn parse_loop(text: &str) -> Result<Loop, IoError> {
    parse_loop_spec(text)?.to_loop(None, None)
}

/// Pretty JSON with every float as `{:.16e}`.
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value as pretty JSON with exact floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}

pub fn write_loop(l: &Loop, metadata: Metadata) -> String {
    to_json(&LoopSpec::from_loop(l, metadata))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolutions {
    pub sweep_n: usize,
    /// Raster cell size, when a raster was used.
    pub cell: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Validation {
        pieces: usize,
        length: f64,
        convex: bool,
    },
    Rolling(RollingReport),
    Terminals {
        pairs: Vec<TerminalPair>,
    },
    Ends {
        ends: Vec<End>,
    },
    Decomposition(Decomposition),
    Oracle {
        internal: OracleVerdict,
        external: OracleVerdict,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub kappa: f64,
    pub tolerances: Tolerances,
    pub resolutions: Resolutions,
    pub body: ReportBody,
}

impl ReportDoc {
    pub fn new(command: &str, l: &Loop, resolutions: Resolutions, body: ReportBody) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input: None,
            kappa: l.kappa(),
            tolerances: *l.tolerances(),
            resolutions,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// Extra geometry drawn over the loop.
#[derive(Debug, Clone)]
pub enum Overlay {
    /// The lens through a terminal pair.
    Lens {
        t1: f64,
        t2: f64,
    },
    /// Chord between two loop parameters.
    Chord {
        t1: f64,
        t2: f64,
    },
    /// An End: its chord and its half disk.
    End(End),
    HalfDisk(HalfDisk),
    Disk(Disk),
    Region(Region),
    Decomposition(Decomposition),
}

const STYLE: &str = "\
.domain{fill:#eef3fb;stroke:none}\
.loop{fill:none;stroke:#1d2b53;stroke-width:0.04}\
.lens{fill:#9db4e8;fill-opacity:0.45;stroke:#3d5a9e;stroke-width:0.02}\
.chord{fill:none;stroke:#b3261e;stroke-width:0.03}\
.half-disk{fill:#f2b8b5;fill-opacity:0.5;stroke:#b3261e;stroke-width:0.02}\
.disk{fill:none;stroke:#2e7d32;stroke-width:0.03}\
.rolling{fill:#8fd18f;fill-opacity:0.55;fill-rule:evenodd;stroke:#2e7d32;stroke-width:0.02}\
.excluded{fill:#f2a07b;fill-opacity:0.6;stroke:#a0461e;stroke-width:0.02}\
.neck{fill:#f5d76e;fill-opacity:0.6;stroke:#8a6d00;stroke-width:0.02}\
.trace{fill:none;stroke:#555;stroke-width:0.015;stroke-dasharray:0.06 0.04}";

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        "0.000000".to_string()
    } else {
        s
    }
}

fn xy(p: Point2) -> String {
    format!("{} {}", num(p.x), num(-p.y))
}

/// Path data for a chain; arcs are split into quarter turns or less.
fn path_data(chain: &[Prim], close: bool) -> String {
    let mut d = String::new();
    let Some(first) = chain.first() else {
        return d;
    };
    write!(d, "M{}", xy(first.start())).unwrap();
    for p in chain {
        match p {
            Prim::Segment(s) => write!(d, " L{}", xy(s.to)).unwrap(),
            Prim::Arc(a) => {
                let n = (a.sweep.abs() / FRAC_PI_2).ceil().max(1.0) as usize;
                // y is flipped, so counter-clockwise arcs draw clockwise.
                let flag = u8::from(a.sweep > 0.0);
                for k in 1..=n {
                    let end = a.point_at_angle(a.start_angle + a.sweep * k as f64 / n as f64);
                    write!(d, " A{} {} 0 0 {flag} {}", num(a.radius), num(a.radius), xy(end)).unwrap();
                }
            }
        }
    }
    if close {
        d.push_str(" Z");
    }
    d
}

fn minor_arc(center: Point2, radius: f64, from: Point2, to: Point2) -> Prim {
    let a0 = (from - center).angle();
    let a1 = (to - center).angle();
    let sweep = crate::geometry::normalize_angle(a1 - a0);
    Prim::Arc(CircularArcPrim {
        center,
        radius,
        start_angle: a0,
        sweep,
    })
}

fn region_class(kind: RegionKind) -> &'static str {
    match kind {
        RegionKind::Rolling => "rolling",
        RegionKind::Excluded => "excluded",
        RegionKind::Neck => "neck",
    }
}

/// Deterministic SVG of the loop with overlays.
pub fn render_svg(l: &Loop, overlays: &[Overlay]) -> String {
    let r = l.r();
    let (lo, hi) = l.bbox();
    let pad = 2.0 * r;
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let frame = format!(
        "M{} {} H{} V{} H{} Z",
        num(x0),
        num(-(y0 + h)),
        num(x0 + w),
        num(-y0),
        num(x0)
    );
    let scale = 60.0;
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(w * scale),
        num(h * scale),
        num(x0),
        num(-(y0 + h)),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(s, "<style>{STYLE}</style>").unwrap();
    let outline = path_data(l.prims(), true);
    writeln!(s, r#"<path class="domain" d="{outline}"/>"#).unwrap();

    let mut traces = Vec::new();
    let mut region = |s: &mut String, reg: &Region| {
        let mut d = path_data(&reg.chain(), true);
        if reg.unbounded {
            d = format!("{frame} {d}");
        }
        writeln!(s, r#"<path class="{}" d="{d}"/>"#, region_class(reg.kind)).unwrap();
        if let Some(trace) = &reg.center_trace {
            traces.push(trace.clone());
        }
    };
    for o in overlays {
        match o {
            Overlay::Region(reg) => region(&mut s, reg),
            Overlay::Decomposition(d) => d.regions.iter().for_each(|reg| region(&mut s, reg)),
            _ => {}
        }
    }
    for trace in &traces {
        let pts: Vec<String> = trace.iter().map(|p| format!("{},{}", num(p.x), num(-p.y))).collect();
        writeln!(s, r#"<polyline class="trace" points="{}"/>"#, pts.join(" ")).unwrap();
    }

    writeln!(s, r#"<path class="loop" d="{outline}"/>"#).unwrap();
    for o in overlays {
        match o {
            Overlay::Lens { t1, t2 } => {
                let (a, b) = (l.point_at(*t1), l.point_at(*t2));
                if let Ok(lens) = Lens::through(a, b, r, l.tolerances()) {
                    let [d1, d2] = lens.disks();
                    let chain = [minor_arc(d1.center, r, a, b), minor_arc(d2.center, r, b, a)];
                    writeln!(s, r#"<path class="lens" d="{}"/>"#, path_data(&chain, true)).unwrap();
                }
            }
            Overlay::Chord { t1, t2 } => {
                let chain = [Prim::segment(l.point_at(*t1), l.point_at(*t2))];
                writeln!(s, r#"<path class="chord" d="{}"/>"#, path_data(&chain, false)).unwrap();
            }
            Overlay::End(end) => {
                let (a, b) = (l.point_at(end.t1), l.point_at(end.t2));
                writeln!(
                    s,
                    r#"<path class="chord" d="{}"/>"#,
                    path_data(&[Prim::segment(a, b)], false)
                )
                .unwrap();
                let hd = crate::classify::half_disk(l, end);
                writeln!(s, r#"<path class="half-disk" d="{}"/>"#, half_disk_path(&hd)).unwrap();
            }
            Overlay::HalfDisk(hd) => {
                writeln!(s, r#"<path class="half-disk" d="{}"/>"#, half_disk_path(hd)).unwrap();
            }
            Overlay::Disk(d) => {
                writeln!(
                    s,
                    r#"<circle class="disk" cx="{}" cy="{}" r="{}"/>"#,
                    num(d.center.x),
                    num(-d.center.y),
                    num(d.radius)
                )
                .unwrap();
            }
            Overlay::Region(_) | Overlay::Decomposition(_) => {}
        }
    }
    s.push_str("</svg>\n");
    s
}

fn half_disk_path(hd: &HalfDisk) -> String {
    let dir = hd.direction.normalized();
    let side = dir.perp();
    let a = hd.center + side * hd.radius;
    let b = hd.center - side * hd.radius;
    // The half toward `direction`: from `a` clockwise through the apex to `b`.
    let arc = Prim::Arc(CircularArcPrim {
        center: hd.center,
        radius: hd.radius,
        start_angle: (a - hd.center).angle(),
        sweep: -std::f64::consts::PI,
    });
    path_data(&[arc, Prim::segment(b, a)], true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn floats_are_written_with_seventeen_digits() {
        let json = to_json(&vec![0.1, 1.0, -2.5e-300]);
        assert!(json.contains("1.0000000000000001e-1"), "{json}");
        assert!(json.contains("1.0000000000000000e0"));
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![0.1, 1.0, -2.5e-300]);
    }

    #[test]
    fn loop_round_trips_exactly() {
        let l = shapes::clover();
        let text = write_loop(&l, Metadata::default());
        let back = parse_loop(&text).unwrap();
        assert_eq!(back.prims(), l.prims());
    }

    #[test]
    fn half_disk_points_along_its_direction() {
        let hd = HalfDisk {
            center: Point2::ORIGIN,
            radius: 1.0,
            direction: Point2::new(0.0, 1.0),
        };
        // Apex at (0, 1) maps to (0, -1) in SVG space.
        let d = half_disk_path(&hd);
        assert!(d.starts_with("M-1.000000 0.000000"), "{d}");
        assert!(d.contains("0.000000 -1.000000"), "{d}");
    }
}
