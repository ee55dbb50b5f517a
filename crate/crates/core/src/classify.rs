//! Fate of trajectories and local structure of the map.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fingerprint::{AttractorClusters, AttractorFingerprint, BBox};
use crate::linalg::{eigen2, EigenKind};
use crate::map::{branch_matrix, inverse_images, parse_reals, side_of_x, step, MapParams, Partition, Point2, BORDER_X};

/// Half-width of the parameter band treated as lying on a stability boundary.
pub const STABILITY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub max_iter: usize,
    pub transient: usize,
    pub escape_radius: f64,
    pub origin_tolerance: f64,
    /// Length of the orbit tail rasterised into a fingerprint, capped by
    /// `max_iter − transient`.
    pub fingerprint_samples: usize,
    pub estimate_lyapunov: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_iter: 1_000_000,
            transient: 10_000,
            escape_radius: 1e8,
            origin_tolerance: 1e-9,
            fingerprint_samples: 100_000,
            estimate_lyapunov: false,
        }
    }
}

impl ClassifyOptions {
    /// Options with the given budget, other fields at their defaults.
    pub fn with_budget(max_iter: usize, transient: usize) -> Self {
        ClassifyOptions {
            max_iter,
            transient,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.transient >= self.max_iter {
            return Err(Error::Config(format!(
                "transient ({}) must be below max_iter ({})",
                self.transient, self.max_iter
            )));
        }
        if !(self.escape_radius > 0.0 && self.escape_radius.is_finite()) {
            return Err(Error::Config("escape_radius must be positive".into()));
        }
        if !(self.origin_tolerance > 0.0) {
            return Err(Error::Config("origin_tolerance must be positive".into()));
        }
        if self.fingerprint_samples == 0 {
            return Err(Error::Config("fingerprint_samples must be positive".into()));
        }
        Ok(())
    }

    fn tail(&self) -> usize {
        self.fingerprint_samples.min(self.max_iter - self.transient)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    ConvergedToO,
    Diverged,
    BoundedAperiodic,
}

impl OrbitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitKind::ConvergedToO => "converged",
            OrbitKind::Diverged => "diverged",
            OrbitKind::BoundedAperiodic => "bounded",
        }
    }
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClass {
    pub kind: OrbitKind,
    pub fingerprint: Option<AttractorFingerprint>,
    pub lyapunov_estimate: Option<f64>,
    /// Iterations performed before the verdict.
    pub steps: usize,
    /// Point reached after `steps` iterations.
    pub last: Point2,
}

/// Whether `O` attracts a whole neighbourhood, i.e. `J_R` is a contraction
/// up to a change of norm.
fn origin_attracts(params: &MapParams) -> bool {
    eigen2(&branch_matrix(params, Partition::R)).spectral_radius() < 1.0
}

/// Iterates from `p0` and sorts the trajectory into convergence to `O`,
/// divergence, or a bounded non-converging tail with its fingerprint.
pub fn classify_orbit(params: &MapParams, p0: Point2, opts: &ClassifyOptions) -> Result<OrbitClass> {
    opts.validate()?;
    if !p0.is_finite() {
        return Err(Error::NonFinite("seed point"));
    }
    let attracting = origin_attracts(params);
    let r2 = opts.escape_radius * opts.escape_radius;
    let tol2 = opts.origin_tolerance * opts.origin_tolerance;
    let tail_start = opts.max_iter - opts.tail();
    let lyap_start = opts.transient;

    let mut p = p0;
    let mut bbox = BBox::EMPTY;
    let mut tail_seed = p0;
    let mut tangent = Point2::new(1.0, 0.0);
    let mut log_sum = 0.0;

    for k in 1..=opts.max_iter {
        if opts.estimate_lyapunov && k > lyap_start {
            let j = branch_matrix(params, side_of_x(p.x));
            tangent = j.apply(tangent);
            let n = tangent.norm();
            log_sum += n.ln();
            tangent = tangent * (1.0 / n);
        }
        p = step(params, p);
        let n2 = p.norm_sq();
        if !(n2 <= r2) {
            return Ok(OrbitClass {
                kind: OrbitKind::Diverged,
                fingerprint: None,
                lyapunov_estimate: None,
                steps: k,
                last: p,
            });
        }
        if n2 < tol2 && (attracting || n2 == 0.0) {
            return Ok(OrbitClass {
                kind: OrbitKind::ConvergedToO,
                fingerprint: None,
                lyapunov_estimate: None,
                steps: k,
                last: p,
            });
        }
        if k == tail_start {
            tail_seed = p;
        }
        if k > tail_start {
            bbox.add(p);
        }
    }
    if p.norm_sq() < tol2 {
        return Ok(OrbitClass {
            kind: OrbitKind::ConvergedToO,
            fingerprint: None,
            lyapunov_estimate: None,
            steps: opts.max_iter,
            last: p,
        });
    }
    let mut q = tail_seed;
    let tail = std::iter::from_fn(|| {
        q = step(params, q);
        Some(q)
    })
    .take(opts.tail());
    let fingerprint = AttractorFingerprint::from_points(bbox, tail);
    let lyapunov_estimate = opts
        .estimate_lyapunov
        .then(|| log_sum / (opts.max_iter - lyap_start) as f64);
    Ok(OrbitClass {
        kind: OrbitKind::BoundedAperiodic,
        fingerprint: Some(fingerprint),
        lyapunov_estimate,
        steps: opts.max_iter,
        last: p,
    })
}

/// Largest Lyapunov exponent along the orbit of `p0`, from the growth of a
/// renormalised tangent vector over `n_steps` steps after `transient`.
pub fn lyapunov_max(params: &MapParams, p0: Point2, n_steps: usize, transient: usize) -> Result<f64> {
    lyapunov_max_with_radius(params, p0, n_steps, transient, crate::map::DEFAULT_ESCAPE_RADIUS)
}

pub fn lyapunov_max_with_radius(
    params: &MapParams,
    p0: Point2,
    n_steps: usize,
    transient: usize,
    escape_radius: f64,
) -> Result<f64> {
    if n_steps == 0 {
        return Err(Error::Precondition("lyapunov_max needs n_steps >= 1".into()));
    }
    if !p0.is_finite() {
        return Err(Error::NonFinite("seed point"));
    }
    let r2 = escape_radius * escape_radius;
    let jl = branch_matrix(params, Partition::L);
    let jr = branch_matrix(params, Partition::R);
    let mut p = p0;
    for k in 1..=transient {
        p = step(params, p);
        if !(p.norm_sq() <= r2) {
            return Err(Error::Escaped { step: k });
        }
    }
    let mut v = Point2::new(1.0, 0.0);
    let mut sum = 0.0;
    for k in 1..=n_steps {
        let j = if p.x < BORDER_X { &jl } else { &jr };
        v = j.apply(v);
        let n = v.norm();
        sum += n.ln();
        v = v * (1.0 / n);
        p = step(params, p);
        if !(p.norm_sq() <= r2) {
            return Err(Error::Escaped {
                step: transient + k,
            });
        }
    }
    Ok(sum / n_steps as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// `τ_R = 1 + δ_R`: an eigenvalue `+1`.
    DegeneratePlusOne,
    /// `τ_R = −1 − δ_R`: an eigenvalue `−1`.
    DegenerateFlip,
    /// `δ_R = 1`, `|τ_R| < 2`: complex eigenvalues on the unit circle.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Attracting,
    Saddle,
    Repelling,
    NonhyperbolicBoundary(BoundaryKind),
}

impl StabilityClass {
    pub fn boundary_kind(&self) -> Option<BoundaryKind> {
        match *self {
            StabilityClass::NonhyperbolicBoundary(k) => Some(k),
            _ => None,
        }
    }
}

/// Stability of the fixed point `O`, which always lies in `D_R`.
pub fn fixed_point_stability(params: &MapParams) -> StabilityClass {
    let (d, t) = (params.delta_r, params.tau_r);
    let band = STABILITY_BAND * (1.0 + d.abs());
    if (t - (1.0 + d)).abs() <= band {
        return StabilityClass::NonhyperbolicBoundary(BoundaryKind::DegeneratePlusOne);
    }
    if (t + 1.0 + d).abs() <= band {
        return StabilityClass::NonhyperbolicBoundary(BoundaryKind::DegenerateFlip);
    }
    if (d - 1.0).abs() <= STABILITY_BAND && t.abs() < 2.0 {
        return StabilityClass::NonhyperbolicBoundary(BoundaryKind::Center);
    }
    let e = eigen2(&branch_matrix(params, Partition::R));
    let inside = [e.lambda1, e.lambda2]
        .iter()
        .filter(|l| l.norm() < 1.0)
        .count();
    match (e.kind, inside) {
        (_, 2) => StabilityClass::Attracting,
        (EigenKind::ComplexConjugate, _) | (_, 0) => StabilityClass::Repelling,
        _ => StabilityClass::Saddle,
    }
}

/// How the plane is covered by images of `D_L` and `D_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertibilityType {
    /// `0 < δ_R < δ_L` or `δ_L < δ_R < 0`.
    Z1Z0Z1,
    /// `δ_R < δ_L < 0` or `0 < δ_L < δ_R`.
    Z1Z2Z1,
    /// `δ_L δ_R < 0`.
    Z0Z1Z2,
    /// `δ_L = 0 ≠ δ_R`.
    Z1ZinfZ1Z0,
    /// `δ_R = 0 ≠ δ_L`.
    Z0ZinfZ0Z1,
    /// `δ_L = δ_R ≠ 0`: the critical lines coincide.
    Z1Z2Z1Coincident,
    /// `δ_L = δ_R = 0`: the whole plane collapses onto one line.
    Collapsed,
}

impl InvertibilityType {
    /// Zone sequence from bottom to top in the notation `Z1-Z0-Z1`.
    pub fn label(&self) -> &'static str {
        match self {
            InvertibilityType::Z1Z0Z1 => "Z1-Z0-Z1",
            InvertibilityType::Z1Z2Z1 | InvertibilityType::Z1Z2Z1Coincident => "Z1-Z2-Z1",
            InvertibilityType::Z0Z1Z2 => "Z0-Z1-Z2",
            InvertibilityType::Z1ZinfZ1Z0 => "Z1-Zinf-Z1-Z0",
            InvertibilityType::Z0ZinfZ0Z1 => "Z0-Zinf-Z0-Z1",
            InvertibilityType::Collapsed => "Zinf",
        }
    }

    /// Letter of the generic or degenerate case, `a` to `f`.
    pub fn case(&self) -> char {
        match self {
            InvertibilityType::Z1Z0Z1 => 'a',
            InvertibilityType::Z1Z2Z1 => 'b',
            InvertibilityType::Z0Z1Z2 => 'c',
            InvertibilityType::Z1ZinfZ1Z0 => 'd',
            InvertibilityType::Z0ZinfZ0Z1 => 'e',
            InvertibilityType::Z1Z2Z1Coincident => 'f',
            InvertibilityType::Collapsed => '-',
        }
    }
}

pub fn invertibility_type(params: &MapParams) -> InvertibilityType {
    let (dl, dr) = (params.delta_l, params.delta_r);
    if dl == 0.0 && dr == 0.0 {
        InvertibilityType::Collapsed
    } else if dl == 0.0 {
        InvertibilityType::Z1ZinfZ1Z0
    } else if dr == 0.0 {
        InvertibilityType::Z0ZinfZ0Z1
    } else if dl == dr {
        InvertibilityType::Z1Z2Z1Coincident
    } else if dl * dr < 0.0 {
        InvertibilityType::Z0Z1Z2
    } else if (0.0 < dr && dr < dl) || (dl < dr && dr < 0.0) {
        InvertibilityType::Z1Z0Z1
    } else {
        InvertibilityType::Z1Z2Z1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Z0,
    Z1,
    Z2,
    /// On a critical line that a whole half-plane collapses onto.
    Infinite,
}

/// Number of preimages of `p`.
pub fn zone_of_point(params: &MapParams, p: Point2) -> Result<Zone> {
    if !p.is_finite() {
        return Err(Error::NonFinite("phase point"));
    }
    if params.delta_l == 0.0 || params.delta_r == 0.0 {
        return Err(Error::NongenericDeterminant {
            branch: if params.delta_l == 0.0 { 'L' } else { 'R' },
        });
    }
    Ok(match inverse_images(params, p)?.len() {
        0 => Zone::Z0,
        1 => Zone::Z1,
        _ => Zone::Z2,
    })
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Config(format!(
                "window needs x0 < x1 and y0 < y1, got {x0},{x1},{y0},{y1}"
            )));
        }
        Ok(Window { x0, x1, y0, y1 })
    }

    /// Center of cell `(i, j)` of an `nx × ny` grid; `j = 0` is the bottom row.
    pub fn cell_center(&self, i: usize, j: usize, nx: usize, ny: usize) -> Point2 {
        Point2::new(
            self.x0 + (i as f64 + 0.5) * (self.x1 - self.x0) / nx as f64,
            self.y0 + (j as f64 + 0.5) * (self.y1 - self.y0) / ny as f64,
        )
    }

    /// Cell holding `p`, if inside.
    pub fn cell_of(&self, p: Point2, nx: usize, ny: usize) -> Option<(usize, usize)> {
        let fx = (p.x - self.x0) / (self.x1 - self.x0);
        let fy = (p.y - self.y0) / (self.y1 - self.y0);
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fy) {
            return None;
        }
        Some(((fx * nx as f64) as usize, (fy * ny as f64) as usize))
    }
}

impl FromStr for Window {
    type Err = Error;

    /// Parses `x0,x1,y0,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_reals(s, 4, "window")?;
        Window::new(v[0], v[1], v[2], v[3])
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.x1, self.y0, self.y1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasinCell {
    pub kind: OrbitKind,
    /// Attractor id for bounded cells, in order of first discovery.
    pub cluster: Option<u32>,
}

/// Phase-plane grid of trajectory fates. Row 0 is the bottom of the window.
#[derive(Debug, Clone)]
pub struct BasinGrid {
    pub params: MapParams,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<BasinCell>,
    pub clusters: AttractorClusters,
}

impl BasinGrid {
    pub fn cell(&self, i: usize, j: usize) -> BasinCell {
        self.cells[j * self.nx + i]
    }

    pub fn attractor_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn count(&self, kind: OrbitKind) -> usize {
        self.cells.iter().filter(|c| c.kind == kind).count()
    }

    /// Rows `x,y,class,cluster` in row-major order, bottom row first.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| crate::invariant::csv_err(path, e))?;
        w.write_record(["x", "y", "class", "cluster"])
            .map_err(|e| crate::invariant::csv_err(path, e))?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let c = self.cell(i, j);
                let p = self.window.cell_center(i, j, self.nx, self.ny);
                w.write_record([
                    p.x.to_string(),
                    p.y.to_string(),
                    c.kind.to_string(),
                    c.cluster.map(|k| k.to_string()).unwrap_or_default(),
                ])
                .map_err(|e| crate::invariant::csv_err(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Cells classified per parallel batch; bounds the number of fingerprints
/// alive at once.
const BASIN_BATCH: usize = 2048;

/// Classifies the orbit of every cell center and groups bounded tails into
/// attractors by fingerprint similarity.
pub fn basin_grid(
    params: &MapParams,
    window: &Window,
    (nx, ny): (usize, usize),
    opts: &ClassifyOptions,
) -> Result<BasinGrid> {
    if nx == 0 || ny == 0 {
        return Err(Error::Config("basin resolution must be positive".into()));
    }
    opts.validate()?;
    let total = nx * ny;
    let mut cells = Vec::with_capacity(total);
    let mut clusters = AttractorClusters::new();
    let mut start = 0;
    while start < total {
        let end = (start + BASIN_BATCH).min(total);
        let batch: Vec<OrbitClass> = (start..end)
            .into_par_iter()
            .map(|idx| {
                let p = window.cell_center(idx % nx, idx / nx, nx, ny);
                classify_orbit(params, p, opts)
            })
            .collect::<Result<_>>()?;
        for oc in batch {
            let cluster = oc.fingerprint.as_ref().map(|fp| clusters.assign(fp) as u32);
            cells.push(BasinCell {
                kind: oc.kind,
                cluster,
            });
        }
        start = end;
    }
    Ok(BasinGrid {
        params: *params,
        window: *window,
        nx,
        ny,
        cells,
        clusters,
    })
}
