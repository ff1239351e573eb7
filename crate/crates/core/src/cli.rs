//! The `kappa-roll` command line.
//!
//! Exit codes: 0 success, 1 the analysed property is false, 2 bad input,
//! 3 internal disagreement or search failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{find_end, find_essential_pairs, find_long_arc, ClassifyError, SweepOptions};
use crate::curve::Loop;
use crate::decompose::{decompose_with, DecomposeError, DecomposeOptions};
use crate::geometry::Tolerances;
use crate::io::{parse_loop_spec, render_svg, IoError, Overlay, ReportBody, ReportDoc, Resolutions};
use crate::oracle::{distance_transform, oracle_rolling, side_mask, GridSpec, OracleError};
use crate::rolling::{classify_domain, tangent_disk, Method, RollingError, RollingOptions, Side};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "KAPPA_ROLL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "kappa-roll",
    version,
    about = "Rolling-disk analysis of curvature-bounded loops"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Curvature bound, overriding the loop file.
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Geometric tolerance (default 1e-9 r).
    #[arg(long, global = true)]
    eps_geom: Option<f64>,
    /// Arc-length tolerance (default 1e-9 L).
    #[arg(long, global = true)]
    eps_param: Option<f64>,
    /// Grid size of the terminal-pair sweep.
    #[arg(long, global = true, default_value_t = 512)]
    sweep_n: usize,
    /// Raster cell size for the oracle (default r / 100).
    #[arg(long, global = true)]
    resolution: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Terminal,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Internal,
    External,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Internal => Side::Internal,
            SideArg::External => Side::External,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OverlayArg {
    TangentDisks,
    Terminals,
    Lenses,
    Ends,
    Decomposition,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a loop file describes a valid loop.
    Validate { file: PathBuf },
    /// Internal, external and overall rolling verdicts.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Essential terminal pairs, one per family.
    Terminals { file: PathBuf },
    /// Ends of every essential pair, or of one long arc when there are none.
    Ends { file: PathBuf },
    /// Maximal rolling regions and excluded regions of one side.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "internal")]
        side: SideArg,
    },
    /// Raster disk-fit verdicts.
    Oracle {
        file: PathBuf,
        /// Directory for graymap dumps of masks and clearance fields.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Draw the loop as SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        overlay: Vec<OverlayArg>,
        #[arg(long, value_enum, default_value = "internal")]
        side: SideArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
    /// The reader of stdout went away.
    ClosedOutput,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::BrokenPipe => Failure::ClosedOutput,
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<RollingError> for Failure {
    fn from(e: RollingError) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::Curve(_) => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

/// Runs the command line with process stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    configure_threads();
    match dispatch(&cli, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FALSE,
        Err(Failure::ClosedOutput) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails harmlessly when the pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn load(path: &Path, g: &GlobalArgs) -> Result<Loop, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let spec = parse_loop_spec(&text)?;
    let kappa = g.kappa.unwrap_or(spec.kappa);
    let tolerances = (g.eps_geom.is_some() || g.eps_param.is_some()).then(|| {
        let total: f64 = spec.pieces.iter().map(|p| p.to_prim().length()).sum();
        let base = Tolerances::for_scale(1.0 / kappa, total);
        Tolerances {
            eps_geom: g.eps_geom.unwrap_or(base.eps_geom),
            eps_param: g.eps_param.unwrap_or(base.eps_param),
        }
    });
    Ok(spec.to_loop(Some(kappa), tolerances)?)
}

fn emit(out: &mut dyn Write, path: &Path, doc: ReportDoc) -> Result<(), Failure> {
    let doc = ReportDoc {
        input: Some(path.display().to_string()),
        ..doc
    };
    out.write_all(doc.to_json().as_bytes())?;
    Ok(())
}

/// Runs one command; `Ok(false)` means the property was found false.
fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<bool, Failure> {
    let g = &cli.global;
    let sweep = SweepOptions { n: g.sweep_n };
    let res = |cell: Option<f64>| Resolutions {
        sweep_n: g.sweep_n,
        cell,
    };
    match &cli.command {
        Command::Validate { file } => {
            let l = load(file, g)?;
            let body = ReportBody::Validation {
                pieces: l.pieces().len(),
                length: l.length(),
                convex: l.is_convex(),
            };
            emit(out, file, ReportDoc::new("validate", &l, res(None), body))?;
            Ok(true)
        }
        Command::Classify { file, method } => {
            let l = load(file, g)?;
            let method = match method {
                MethodArg::Direct => Method::Direct,
                MethodArg::Terminal => Method::TerminalCriterion,
                MethodArg::Both => Method::Both,
            };
            let opts = RollingOptions {
                sweep_n: g.sweep_n,
                ..RollingOptions::default()
            };
            let report = classify_domain(&l, method, &opts)?;
            let rolling = report.rolling;
            emit(
                out,
                file,
                ReportDoc::new("classify", &l, res(None), ReportBody::Rolling(report)),
            )?;
            Ok(rolling)
        }
        Command::Terminals { file } => {
            let l = load(file, g)?;
            let pairs = find_essential_pairs(&l, &sweep);
            let none = pairs.is_empty();
            emit(
                out,
                file,
                ReportDoc::new("terminals", &l, res(None), ReportBody::Terminals { pairs }),
            )?;
            Ok(none)
        }
        Command::Ends { file } => {
            let l = load(file, g)?;
            let pairs = find_essential_pairs(&l, &sweep);
            let mut ends = Vec::new();
            if pairs.is_empty() {
                let (a, b) = find_long_arc(&l, &sweep)?;
                ends.push(find_end(&l, a, b)?);
            }
            for p in &pairs {
                ends.push(find_end(&l, p.t1, p.t2)?);
                ends.push(find_end(&l, p.t2, p.t1)?);
            }
            emit(
                out,
                file,
                ReportDoc::new("ends", &l, res(None), ReportBody::Ends { ends }),
            )?;
            Ok(true)
        }
        Command::Decompose { file, side } => {
            let l = load(file, g)?;
            let opts = DecomposeOptions {
                sweep_n: g.sweep_n,
                ..DecomposeOptions::default()
            };
            let d = decompose_with(&l, (*side).into(), &opts)?;
            emit(
                out,
                file,
                ReportDoc::new("decompose", &l, res(None), ReportBody::Decomposition(d)),
            )?;
            Ok(true)
        }
        Command::Oracle { file, dump } => {
            let l = load(file, g)?;
            let cell = g.resolution.unwrap_or(l.r() / 100.0);
            let internal = oracle_rolling(&l, Side::Internal, cell)?;
            let external = oracle_rolling(&l, Side::External, cell)?;
            if let Some(dir) = dump {
                std::fs::create_dir_all(dir)?;
                let spec = GridSpec::for_loop(&l, cell)?;
                side_mask(&l, &spec, Side::Internal).write_pgm(&dir.join("inside.pgm"))?;
                distance_transform(&l, &spec).write_pgm(&dir.join("clearance.pgm"))?;
            }
            let holds = internal.holds && external.holds;
            let body = ReportBody::Oracle { internal, external };
            emit(out, file, ReportDoc::new("oracle", &l, res(Some(cell)), body))?;
            Ok(holds)
        }
        Command::Render {
            file,
            overlay,
            side,
            output,
        } => {
            let l = load(file, g)?;
            let side: Side = (*side).into();
            let mut overlays = Vec::new();
            let needs_pairs = overlay
                .iter()
                .any(|o| matches!(o, OverlayArg::Terminals | OverlayArg::Lenses | OverlayArg::Ends));
            let pairs = if needs_pairs {
                find_essential_pairs(&l, &sweep)
            } else {
                Vec::new()
            };
            for o in overlay {
                match o {
                    OverlayArg::TangentDisks => {
                        let n = 12;
                        for k in 0..n {
                            let t = l.length() * k as f64 / n as f64;
                            overlays.push(Overlay::Disk(tangent_disk(&l, t, side)));
                        }
                    }
                    OverlayArg::Terminals => {
                        overlays.extend(pairs.iter().map(|p| Overlay::Chord { t1: p.t1, t2: p.t2 }))
                    }
                    OverlayArg::Lenses => overlays.extend(pairs.iter().map(|p| Overlay::Lens { t1: p.t1, t2: p.t2 })),
                    OverlayArg::Ends => {
                        for p in &pairs {
                            overlays.push(Overlay::End(find_end(&l, p.t1, p.t2)?));
                            overlays.push(Overlay::End(find_end(&l, p.t2, p.t1)?));
                        }
                    }
                    OverlayArg::Decomposition => {
                        let opts = DecomposeOptions {
                            sweep_n: g.sweep_n,
                            ..DecomposeOptions::default()
                        };
                        overlays.push(Overlay::Decomposition(decompose_with(&l, side, &opts)?));
                    }
                }
            }
            let svg = render_svg(&l, &overlays);
            match output {
                Some(path) => std::fs::write(path, svg)?,
                None => out.write_all(svg.as_bytes())?,
            }
            Ok(true)
        }
    }
}
