//! Command-line front end.
//!
//! Every command reads a [`Config`]; flags given on the command line are
//! written over the entries of the `--config` file before dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{basin_grid, lyapunov_max_with_radius, ClassifyOptions, OrbitKind, Window};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::invariant::{
    admissible_interval, snap_to_curve, trace_boundary_curve, AdmissibilityStatus, BoundaryFamily, CurveKind, CurveTrace,
};
use crate::map::{iterate_orbit, step, MapParams, ParamId, Point2};
use crate::render::{bifurcation_image, phase_portrait, scan_image, PortraitLayers};
use crate::scan::{overlay_boundaries, scan_1d, scan_2d, Axis, Projection, Scan1dOptions, ScanSpec, SeedStrategy};
use crate::symbolic::{eigen_slope_at_one, SymbolicSequence};

#[derive(Debug, Parser)]
#[command(name = "wqa", version, about = "Orbits, invariant sets and parameter scans of a discontinuous piecewise linear map")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, ValueEnum)]
pub enum Command {
    /// Classify a two-parameter grid and render it.
    Scan2d,
    /// Final-state diagram along one parameter.
    Scan1d,
    /// Basin colouring with attractor cloud and invariant lines.
    Phase,
    /// Basin grid as CSV and image.
    Basin,
    /// Trace a bifurcation curve through a parameter window.
    Boundary,
    /// Iterate one orbit.
    Orbit,
    /// Largest Lyapunov exponent along one orbit.
    Lyapunov,
    /// Maximal admissible segment set of a symbolic sequence.
    Segments,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Map parameters `delta_L,delta_R,tau_L,tau_R`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// `x0,x1,y0,y1`; phase-plane window, or parameter ranges for scan2d.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// `NX,NY` or `N`.
    #[arg(long, global = true)]
    pub res: Option<String>,
    /// Output path stem; extensions are appended per file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `default`, `jittered`, or `x,y;x,y;…`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub seeds: Option<String>,
    /// Any other configuration key.
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub set: Vec<String>,
}

impl CommonArgs {
    /// Configuration file contents with flags applied on top.
    pub fn to_config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::new(),
        };
        let flags = [
            ("params", self.params.clone()),
            ("window", self.window.clone()),
            ("res", self.res.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("threads", self.threads.map(|t| t.to_string())),
            ("seeds", self.seeds.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v);
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k, v.trim());
        }
        Ok(cfg)
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl Report {
    fn file(&mut self, p: PathBuf) -> &Path {
        self.files.push(p);
        self.files.last().unwrap()
    }

    fn say(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.common.to_config().and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(rep) => {
            let mut out = std::io::stdout().lock();
            for l in &rep.lines {
                let _ = writeln!(out, "{l}");
            }
            for f in &rep.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("wqa: {e}");
            e.exit_code()
        }
    }
}

/// Runs `cmd` on `cfg`, inside a dedicated thread pool when `threads` is set.
pub fn run(cmd: Command, cfg: &Config) -> Result<Report> {
    match cfg.get::<usize>("threads")? {
        Some(0) => Err(Error::Config("threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cmd, cfg)),
        None => dispatch(cmd, cfg),
    }
}

fn dispatch(cmd: Command, cfg: &Config) -> Result<Report> {
    match cmd {
        Command::Scan2d => cmd_scan2d(cfg),
        Command::Scan1d => cmd_scan1d(cfg),
        Command::Phase => cmd_phase(cfg),
        Command::Basin => cmd_basin(cfg),
        Command::Boundary => cmd_boundary(cfg),
        Command::Orbit => cmd_orbit(cfg),
        Command::Lyapunov => cmd_lyapunov(cfg),
        Command::Segments => cmd_segments(cfg),
    }
}

fn out_path(cfg: &Config, suffix: &str) -> PathBuf {
    let stem = cfg.raw("out").unwrap_or("wqa_out");
    PathBuf::from(format!("{stem}{suffix}"))
}

fn resolution(cfg: &Config, default: (usize, usize)) -> Result<(usize, usize)> {
    let Some(r) = cfg.raw("res") else {
        return Ok(default);
    };
    let v: Vec<usize> = r
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("res = {r}: expected N or NX,NY")))?;
    match v[..] {
        [n] if n > 0 => Ok((n, n)),
        [nx, ny] if nx > 0 && ny > 0 => Ok((nx, ny)),
        _ => Err(Error::Config(format!("res = {r}: expected positive N or NX,NY"))),
    }
}

/// Classifier options from `max_iter`, `transient`, `escape_radius`,
/// `origin_tol` and `fingerprint_samples`.
pub fn classify_options(cfg: &Config, defaults: ClassifyOptions) -> Result<ClassifyOptions> {
    let o = ClassifyOptions {
        max_iter: cfg.get_or("max_iter", defaults.max_iter)?,
        transient: cfg.get_or("transient", defaults.transient)?,
        escape_radius: cfg.get_or("escape_radius", defaults.escape_radius)?,
        origin_tolerance: cfg.get_or("origin_tol", defaults.origin_tolerance)?,
        fingerprint_samples: cfg.get_or("fingerprint_samples", defaults.fingerprint_samples)?,
        estimate_lyapunov: false,
    };
    o.validate()?;
    Ok(o)
}

/// Scan defaults: a shorter fingerprint than single-orbit classification.
fn scan_defaults() -> ClassifyOptions {
    ClassifyOptions {
        max_iter: 100_000,
        transient: 10_000,
        fingerprint_samples: 20_000,
        ..Default::default()
    }
}

fn range(cfg: &Config, key: &str) -> Result<(f64, f64)> {
    let v: Vec<f64> = cfg.list(key, ',')?;
    match v[..] {
        [a, b] if a < b => Ok((a, b)),
        _ => Err(Error::Config(format!("{key} must be 'lo,hi' with lo < hi"))),
    }
}

/// Parses `B_LRn1:2-9` into the families with periods 2 through 9.
fn family_range(s: &str) -> Result<Vec<BoundaryFamily>> {
    let (k, n) = s.split_once(':').unwrap_or((s, ""));
    let kind: CurveKind = k.trim().parse()?;
    let (a, b) = match n.split_once('-') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (n.trim(), n.trim()),
    };
    let parse = |t: &str, d: usize| -> Result<usize> {
        if t.is_empty() {
            Ok(d)
        } else {
            t.parse().map_err(|_| Error::Config(format!("bad period range in '{s}'")))
        }
    };
    let (a, b) = (parse(a, kind.min_n())?, parse(b, kind.min_n())?);
    let mut out = Vec::new();
    // Period 2 of the basic families is the single curve B_LR.
    if a <= 2 && b >= 2 && matches!(kind, CurveKind::BLRn1 | CurveKind::BRLn1) {
        out.push(BoundaryFamily::new(CurveKind::BLR, 2)?);
    }
    for n in a.max(kind.min_n())..=b.min(kind.max_n()) {
        out.push(BoundaryFamily::new(kind, n)?);
    }
    Ok(out)
}

fn families(cfg: &Config, key: &str) -> Result<Vec<BoundaryFamily>> {
    let mut out = Vec::new();
    for s in cfg.list::<String>(key, ',')? {
        out.extend(family_range(&s)?);
    }
    Ok(out)
}

pub fn cmd_scan2d(cfg: &Config) -> Result<Report> {
    let base: MapParams = cfg.require("params")?;
    let axes: Vec<ParamId> = match cfg.raw("axes") {
        Some(_) => cfg.list("axes", ',')?,
        None => vec![ParamId::TauL, ParamId::TauR],
    };
    let [p1, p2] = axes[..] else {
        return Err(Error::Config("axes must name two parameters".into()));
    };
    let win: Window = cfg.require("window")?;
    let (nx, ny) = resolution(cfg, (200, 200))?;
    let spec = ScanSpec {
        axis1: Axis::new(p1, win.x0, win.x1, nx)?,
        axis2: Some(Axis::new(p2, win.y0, win.y1, ny)?),
        base,
        seeds: cfg.get_or("seeds", SeedStrategy::Default)?,
        opts: classify_options(cfg, scan_defaults())?,
    };
    let mut grid = scan_2d(&spec)?;
    let fams = families(cfg, "overlays")?;
    if !fams.is_empty() {
        overlay_boundaries(&mut grid, &fams)?;
    }
    let mut rep = Report::default();
    grid.write_binary(rep.file(out_path(cfg, ".wqas")))?;
    grid.write_csv(rep.file(out_path(cfg, ".csv")))?;
    scan_image(&grid).write(rep.file(out_path(cfg, &image_ext(cfg))))?;
    if !grid.overlays.is_empty() {
        write_overlays(&grid.overlays, rep.file(out_path(cfg, ".curves.csv")))?;
    }
    for c in crate::scan::CellClass::ALL {
        let n = grid.cells.iter().filter(|r| r.class == c).count();
        rep.say(format!("{c}: {n}"));
    }
    Ok(rep)
}

fn image_ext(cfg: &Config) -> String {
    match cfg.raw("image_format") {
        Some("ppm") => ".ppm".into(),
        _ => ".png".into(),
    }
}

fn write_overlays(curves: &[crate::invariant::BoundaryCurve], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| crate::invariant::csv_err(path, e))?;
    w.write_record(["family", "sweep_axis", "sweep_value", "solve_value", "admissibility_status"])
        .map_err(|e| crate::invariant::csv_err(path, e))?;
    for c in curves {
        for p in &c.points {
            w.write_record([
                format!("{}:{}", c.family.kind.name(), c.family.n),
                c.sweep_axis.to_string(),
                p.sweep.to_string(),
                p.solve.to_string(),
                p.status.to_string(),
            ])
            .map_err(|e| crate::invariant::csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn cmd_scan1d(cfg: &Config) -> Result<Report> {
    let base: MapParams = cfg.require("params")?;
    let param: ParamId = cfg.get_or("axis", ParamId::TauL)?;
    let (lo, hi) = range(cfg, "range")?;
    let (n, _) = resolution(cfg, (400, 1))?;
    let spec = ScanSpec {
        axis1: Axis::new(param, lo, hi, n)?,
        axis2: None,
        base,
        seeds: cfg.get_or("seeds", SeedStrategy::Default)?,
        opts: classify_options(cfg, scan_defaults())?,
    };
    let o1 = Scan1dOptions {
        projection: cfg.get_or("projection", Projection::X)?,
        tail_points: cfg.get_or("tail", Scan1dOptions::default().tail_points)?,
        continuation: cfg.get_or("continuation", false)?,
    };
    let b = scan_1d(&spec, &o1)?;
    let mut rep = Report::default();
    b.write_csv(rep.file(out_path(cfg, ".csv")))?;
    bifurcation_image(&b, cfg.get_or("height", 400)?).write(rep.file(out_path(cfg, &image_ext(cfg))))?;
    let empty = b.samples.iter().filter(|s| s.is_empty()).count();
    rep.say(format!("{} sweep values, {empty} divergent", b.values.len()));
    Ok(rep)
}

/// With `snap = <param>`, moves that parameter onto `P_σ(1) = 0` so that the
/// `σ` cycles are exactly nonhyperbolic.
fn snapped(cfg: &Config, params: MapParams, sigma: Option<&SymbolicSequence>, rep: &mut Report) -> Result<MapParams> {
    let (Some(axis), Some(sigma)) = (cfg.get::<ParamId>("snap")?, sigma) else {
        return Ok(params);
    };
    let q = snap_to_curve(&params, sigma, axis, params.get(axis), cfg.get_or("snap_width", 1e-3)?)?;
    rep.say(format!("snapped {axis} to {} on B_{sigma}", q.get(axis)));
    Ok(q)
}

fn phase_setup(cfg: &Config) -> Result<(MapParams, Window, (usize, usize), ClassifyOptions)> {
    let params: MapParams = cfg.require("params")?;
    let win: Window = cfg.require("window")?;
    let res = resolution(cfg, (300, 300))?;
    let defaults = ClassifyOptions {
        max_iter: 20_000,
        transient: 2_000,
        fingerprint_samples: 10_000,
        ..Default::default()
    };
    Ok((params, win, res, classify_options(cfg, defaults)?))
}

pub fn cmd_basin(cfg: &Config) -> Result<Report> {
    let (params, win, res, opts) = phase_setup(cfg)?;
    let basin = basin_grid(&params, &win, res, &opts)?;
    let mut rep = Report::default();
    basin.write_csv(rep.file(out_path(cfg, ".csv")))?;
    phase_portrait(&basin, &PortraitLayers::default(), cfg.get_or("scale", 1)?)
        .write(rep.file(out_path(cfg, &image_ext(cfg))))?;
    for k in [OrbitKind::ConvergedToO, OrbitKind::Diverged, OrbitKind::BoundedAperiodic] {
        rep.say(format!("{k}: {}", basin.count(k)));
    }
    rep.say(format!("attractors: {}", basin.attractor_count()));
    Ok(rep)
}

pub fn cmd_phase(cfg: &Config) -> Result<Report> {
    let (params, win, res, opts) = phase_setup(cfg)?;
    let mut rep = Report::default();
    let words = cfg.list::<SymbolicSequence>("segments", ',')?;
    let params = snapped(cfg, params, words.first(), &mut rep)?;
    let basin = basin_grid(&params, &win, res, &opts)?;
    let mut layers = PortraitLayers::default();

    let cloud_points: usize = cfg.get_or("cloud_points", 20_000)?;
    let mut seen = std::collections::BTreeSet::new();
    for j in 0..basin.ny {
        for i in 0..basin.nx {
            let Some(k) = basin.cell(i, j).cluster else { continue };
            if !seen.insert(k) {
                continue;
            }
            let mut p = win.cell_center(i, j, basin.nx, basin.ny);
            for _ in 0..opts.transient {
                p = step(&params, p);
            }
            for _ in 0..cloud_points {
                p = step(&params, p);
                if !p.is_finite() || p.norm() > opts.escape_radius {
                    break;
                }
                layers.cloud.push(p);
            }
        }
    }

    for sigma in words {
        match admissible_interval(&params, &sigma) {
            Ok(r) if r.status != AdmissibilityStatus::Virtual => {
                rep.say(format!("segment set {sigma}: {} pieces", r.segments.as_ref().map_or(0, |s| s.len())));
                layers.segment_sets.extend(r.segments);
            }
            Ok(_) => rep.say(format!("segment set {sigma}: virtual, not drawn")),
            Err(e) => rep.say(format!("segment set {sigma}: {e}")),
        }
    }
    for sigma in cfg.list::<SymbolicSequence>("eigenvectors", ',')? {
        match eigen_slope_at_one(&params, &sigma) {
            Ok(s) => layers.eigenvectors.push(s.direction()),
            Err(e) => rep.say(format!("eigenvector {sigma}: {e}")),
        }
    }

    phase_portrait(&basin, &layers, cfg.get_or("scale", 1)?).write(rep.file(out_path(cfg, &image_ext(cfg))))?;
    basin.write_csv(rep.file(out_path(cfg, ".csv")))?;
    rep.say(format!("attractors: {}", basin.attractor_count()));
    Ok(rep)
}

pub fn cmd_boundary(cfg: &Config) -> Result<Report> {
    let base: MapParams = cfg.require("params")?;
    let family: BoundaryFamily = cfg.require("family")?;
    let sweep: ParamId = cfg.get_or("sweep", ParamId::TauL)?;
    let solve: ParamId = cfg.get_or("solve", ParamId::TauR)?;
    if sweep == solve {
        return Err(Error::Config("sweep and solve must be different parameters".into()));
    }
    let mut trace = CurveTrace::new(
        family,
        base,
        sweep,
        solve,
        range(cfg, "sweep_range")?,
        range(cfg, "solve_range")?,
        cfg.get_or("steps", 200)?,
    );
    trace.brackets = cfg.get_or("brackets", trace.brackets)?;
    let curve = trace_boundary_curve(&trace)?;
    let mut rep = Report::default();
    curve.write_csv(rep.file(out_path(cfg, ".csv")))?;
    rep.say(format!("{family}: {} points", curve.points.len()));
    Ok(rep)
}

pub fn cmd_orbit(cfg: &Config) -> Result<Report> {
    let params: MapParams = cfg.require("params")?;
    let p0: Point2 = cfg.get_or("p0", Point2::new(0.1, 0.1))?;
    let steps: usize = cfg.get_or("steps", 1000)?;
    let radius: f64 = cfg.get_or("escape_radius", crate::map::DEFAULT_ESCAPE_RADIUS)?;
    let orbit = iterate_orbit(&params, p0, steps, radius)?;
    let mut rep = Report::default();
    let path = rep.file(out_path(cfg, ".csv")).to_path_buf();
    let mut w = csv::Writer::from_path(&path).map_err(|e| crate::invariant::csv_err(&path, e))?;
    w.write_record(["n", "x", "y", "partition"])
        .map_err(|e| crate::invariant::csv_err(&path, e))?;
    for (n, p) in orbit.points.iter().enumerate() {
        let side = crate::map::side_of_x(p.x).letter().to_string();
        w.write_record([n.to_string(), p.x.to_string(), p.y.to_string(), side])
            .map_err(|e| crate::invariant::csv_err(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    rep.say(format!("itinerary: {}", orbit.word()));
    if let Some(k) = orbit.escaped_at {
        rep.say(format!("escaped at step {k}"));
    }
    Ok(rep)
}

pub fn cmd_lyapunov(cfg: &Config) -> Result<Report> {
    let params: MapParams = cfg.require("params")?;
    let p0: Point2 = cfg.get_or("p0", Point2::new(0.1, 0.1))?;
    let steps: usize = cfg.get_or("steps", 1_000_000)?;
    let transient: usize = cfg.get_or("transient", 10_000)?;
    let radius: f64 = cfg.get_or("escape_radius", crate::map::DEFAULT_ESCAPE_RADIUS)?;
    let lambda = lyapunov_max_with_radius(&params, p0, steps, transient, radius)?;
    let mut rep = Report::default();
    let path = rep.file(out_path(cfg, ".csv")).to_path_buf();
    std::fs::write(
        &path,
        format!("steps,transient,lyapunov\n{steps},{transient},{lambda}\n"),
    )
    .map_err(|e| Error::io(&path, e))?;
    rep.say(format!("lyapunov: {lambda}"));
    Ok(rep)
}

pub fn cmd_segments(cfg: &Config) -> Result<Report> {
    let params: MapParams = cfg.require("params")?;
    let sigma: SymbolicSequence = cfg.require("sigma")?;
    let mut rep = Report::default();
    let params = snapped(cfg, params, Some(&sigma), &mut rep)?;
    let r = admissible_interval(&params, &sigma)?;
    rep.say(format!(
        "{sigma}: {:?} on t in ({}, {})",
        r.status, r.interval.0, r.interval.1
    ));
    match &r.segments {
        Some(set) if r.status != AdmissibilityStatus::Virtual => {
            set.write_csv(rep.file(out_path(cfg, ".csv")))?;
            Ok(rep)
        }
        _ => Err(Error::Virtual(sigma.to_string())),
    }
}
