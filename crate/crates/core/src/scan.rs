//! One- and two-parameter scans of trajectory fates.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classify::{classify_orbit, ClassifyOptions, OrbitKind};
use crate::error::{Error, Result};
use crate::fingerprint::AttractorClusters;
use crate::invariant::{csv_err, trace_boundary_curve, BoundaryCurve, BoundaryFamily, CurveTrace};
use crate::map::{step, MapParams, ParamId, Point2};

/// A swept parameter with `samples` evenly spaced values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: ParamId,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Axis {
    pub fn new(param: ParamId, lo: f64, hi: f64, samples: usize) -> Result<Self> {
        let a = Axis {
            param,
            lo,
            hi,
            samples,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config(format!("{}: need at least 1 sample", self.param)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!(
                "{}: range must satisfy lo < hi, got {}..{}",
                self.param, self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Sample `i`; a single-sample axis sits at `lo`.
    pub fn value(&self, i: usize) -> f64 {
        if i == 0 {
            self.lo
        } else if i + 1 == self.samples {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.samples - 1) as f64
        }
    }

    /// Spacing between neighbouring samples, or the whole range for one sample.
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.samples.max(2) - 1) as f64
    }

    /// Index of the sample nearest `v`, if `v` is within half a step of the range.
    pub fn nearest(&self, v: f64) -> Option<usize> {
        let f = (v - self.lo) / self.step();
        let i = f.round();
        (i >= 0.0 && i <= (self.samples - 1) as f64).then_some(i as usize)
    }
}

/// Jitter applied to the ring seeds by [`SeedStrategy::Jittered`]:
/// (radius factor, angle offset).
const JITTER: [(f64, f64); 8] = [
    (1.07, 0.11),
    (0.93, -0.17),
    (1.13, 0.23),
    (0.89, -0.05),
    (1.03, 0.31),
    (0.97, -0.29),
    (1.11, 0.07),
    (0.91, -0.13),
];

/// Initial points tried in every scan cell.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedStrategy {
    /// Eight points on a logarithmic spiral with `0.5 ≤ ‖p‖ ≤ 20`, plus a point
    /// just left of the border at height `δ_L`.
    Default,
    /// [`SeedStrategy::Default`] plus a jittered copy of the eight ring points.
    Jittered,
    Custom(Vec<Point2>),
}

impl SeedStrategy {
    fn ring(i: usize, rf: f64, da: f64) -> Point2 {
        let r = 0.5 * 40f64.powf(i as f64 / 7.0) * rf;
        let a = std::f64::consts::TAU * i as f64 / 8.0 + 0.3 + da;
        Point2::new(r * a.cos(), r * a.sin())
    }

    pub fn seeds(&self, params: &MapParams) -> Vec<Point2> {
        let near_border = Point2::new(-1.0 - 1e-3, params.delta_l);
        match self {
            SeedStrategy::Default => (0..8)
                .map(|i| Self::ring(i, 1.0, 0.0))
                .chain([near_border])
                .collect(),
            SeedStrategy::Jittered => (0..8)
                .map(|i| Self::ring(i, 1.0, 0.0))
                .chain([near_border])
                .chain((0..8).map(|i| Self::ring(i, JITTER[i].0, JITTER[i].1)))
                .collect(),
            SeedStrategy::Custom(v) => v.clone(),
        }
    }

    fn tag(&self) -> u8 {
        match self {
            SeedStrategy::Default => 0,
            SeedStrategy::Jittered => 1,
            SeedStrategy::Custom(_) => 2,
        }
    }
}

impl fmt::Display for SeedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedStrategy::Default => f.write_str("default"),
            SeedStrategy::Jittered => f.write_str("jittered"),
            SeedStrategy::Custom(v) => {
                let parts: Vec<String> = v.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

impl FromStr for SeedStrategy {
    type Err = Error;

    /// `default`, `jittered`, or explicit points `x,y;x,y;…`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(SeedStrategy::Default),
            "jittered" | "jitter" => Ok(SeedStrategy::Jittered),
            other => {
                let pts = other
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(str::parse::<Point2>)
                    .collect::<Result<Vec<_>>>()?;
                if pts.is_empty() {
                    return Err(Error::Config(format!("no seed points in '{s}'")));
                }
                Ok(SeedStrategy::Custom(pts))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    /// Values of the parameters not swept.
    pub base: MapParams,
    pub seeds: SeedStrategy,
    pub opts: ClassifyOptions,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.param == self.axis1.param {
                return Err(Error::Config("scan axes must be distinct parameters".into()));
            }
        }
        self.base.validate()?;
        self.opts.validate()?;
        if self.seeds.seeds(&self.base).is_empty() {
            return Err(Error::Config("seed strategy yields no seeds".into()));
        }
        Ok(())
    }

    /// Map parameters of cell `(i, j)`.
    pub fn params_at(&self, i: usize, j: usize) -> MapParams {
        let p = self.base.with(self.axis1.param, self.axis1.value(i));
        match &self.axis2 {
            Some(a2) => p.with(a2.param, a2.value(j)),
            None => p,
        }
    }
}

/// Combined outcome of all seeds in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    /// Every seed converges to `O`.
    OOnly,
    /// One bounded attractor and nothing else.
    Wqa,
    /// `O` together with a bounded attractor, or several bounded attractors.
    Coexistence,
    DivergenceOnly,
    /// Some seeds diverge, others do not.
    MixedWithDivergence,
}

impl CellClass {
    pub const ALL: [CellClass; 5] = [
        CellClass::OOnly,
        CellClass::Wqa,
        CellClass::Coexistence,
        CellClass::DivergenceOnly,
        CellClass::MixedWithDivergence,
    ];

    pub fn code(&self) -> u8 {
        match self {
            CellClass::OOnly => 0,
            CellClass::Wqa => 1,
            CellClass::Coexistence => 2,
            CellClass::DivergenceOnly => 3,
            CellClass::MixedWithDivergence => 4,
        }
    }

    pub fn from_code(c: u8) -> Option<CellClass> {
        CellClass::ALL.get(c as usize).copied()
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CellClass::OOnly => "o-only",
            CellClass::Wqa => "wqa",
            CellClass::Coexistence => "coexistence",
            CellClass::DivergenceOnly => "divergence-only",
            CellClass::MixedWithDivergence => "mixed-with-divergence",
        }
    }

    pub fn has_divergence(&self) -> bool {
        matches!(self, CellClass::DivergenceOnly | CellClass::MixedWithDivergence)
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fate of a single seed: converged, diverged, or bounded attractor `k` of its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedOutcome {
    Converged,
    Diverged,
    Attractor(u8),
}

impl SeedOutcome {
    fn code(&self) -> u8 {
        match *self {
            SeedOutcome::Converged => 0,
            SeedOutcome::Diverged => 1,
            SeedOutcome::Attractor(k) => 2 + k,
        }
    }

    fn from_code(c: u8) -> SeedOutcome {
        match c {
            0 => SeedOutcome::Converged,
            1 => SeedOutcome::Diverged,
            k => SeedOutcome::Attractor(k - 2),
        }
    }
}

impl fmt::Display for SeedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedOutcome::Converged => f.write_str("o"),
            SeedOutcome::Diverged => f.write_str("d"),
            SeedOutcome::Attractor(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRecord {
    pub class: CellClass,
    /// Distinct bounded attractors among the seeds.
    pub attractors: u8,
    pub seeds: Vec<SeedOutcome>,
}

impl CellRecord {
    fn from_outcomes(seeds: Vec<SeedOutcome>, attractors: u8) -> Self {
        let has_o = seeds.contains(&SeedOutcome::Converged);
        let has_div = seeds.contains(&SeedOutcome::Diverged);
        let class = match (has_div, has_o, attractors) {
            (true, false, 0) => CellClass::DivergenceOnly,
            (true, _, _) => CellClass::MixedWithDivergence,
            (false, true, 0) => CellClass::OOnly,
            (false, false, 1) => CellClass::Wqa,
            _ => CellClass::Coexistence,
        };
        CellRecord {
            class,
            attractors,
            seeds,
        }
    }

    pub fn has_o(&self) -> bool {
        self.seeds.contains(&SeedOutcome::Converged)
    }

    pub fn has_divergence(&self) -> bool {
        self.seeds.contains(&SeedOutcome::Diverged)
    }
}

/// Classifies every seed at `params` and groups bounded tails into attractors.
pub fn classify_cell(params: &MapParams, seeds: &[Point2], opts: &ClassifyOptions) -> Result<CellRecord> {
    let mut clusters = AttractorClusters::new();
    let mut outcomes = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let c = classify_orbit(params, s, opts)?;
        outcomes.push(match c.kind {
            OrbitKind::ConvergedToO => SeedOutcome::Converged,
            OrbitKind::Diverged => SeedOutcome::Diverged,
            OrbitKind::BoundedAperiodic => {
                let fp = c.fingerprint.as_ref().expect("bounded orbits carry a fingerprint");
                SeedOutcome::Attractor(clusters.assign(fp).min(253) as u8)
            }
        });
    }
    Ok(CellRecord::from_outcomes(outcomes, clusters.len().min(253) as u8))
}

/// Result of a two-parameter scan. Row `j` follows `axis2`, column `i` follows `axis1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub spec: ScanSpec,
    pub cells: Vec<CellRecord>,
    /// Curves attached by [`overlay_boundaries`]; not serialised.
    pub overlays: Vec<BoundaryCurve>,
}

impl ScanGrid {
    pub fn nx(&self) -> usize {
        self.spec.axis1.samples
    }

    pub fn ny(&self) -> usize {
        self.spec.axis2.map_or(1, |a| a.samples)
    }

    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[j * self.nx() + i]
    }

    /// Grid position of the parameter pair `(v1, v2)`, if inside the scan.
    pub fn locate(&self, v1: f64, v2: f64) -> Option<(usize, usize)> {
        let i = self.spec.axis1.nearest(v1)?;
        let j = match &self.spec.axis2 {
            Some(a) => a.nearest(v2)?,
            None => 0,
        };
        Some((i, j))
    }

    /// Whether cell `(i, j)` differs in divergence from a neighbour within `radius` cells.
    pub fn near_divergence_transition(&self, i: usize, j: usize, radius: usize) -> bool {
        let (nx, ny) = (self.nx() as i64, self.ny() as i64);
        let r = radius as i64;
        let mut seen = [false; 2];
        for dj in -r..=r {
            for di in -r..=r {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if (0..nx).contains(&a) && (0..ny).contains(&b) {
                    seen[self.cell(a as usize, b as usize).class.has_divergence() as usize] = true;
                }
            }
        }
        seen[0] && seen[1]
    }

    /// Rows `axis1,axis2,class,attractors,seeds` with seed outcomes joined by `;`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        let a1 = self.spec.axis1;
        let a2_name = self.spec.axis2.map_or("-".to_string(), |a| a.param.to_string());
        w.write_record([a1.param.name(), &a2_name, "class", "attractors", "seeds"])
            .map_err(|e| csv_err(path, e))?;
        for j in 0..self.ny() {
            for i in 0..self.nx() {
                let c = self.cell(i, j);
                let v2 = self.spec.axis2.map_or(String::new(), |a| a.value(j).to_string());
                let seeds: Vec<String> = c.seeds.iter().map(|s| s.to_string()).collect();
                w.write_record([
                    a1.value(i).to_string(),
                    v2,
                    c.class.to_string(),
                    c.attractors.to_string(),
                    seeds.join(";"),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        self.encode(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: &Path) -> Result<ScanGrid> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        ScanGrid::decode(&mut std::io::BufReader::new(f))
    }

    /// Little-endian layout: magic `WQAS`, version, axes, fixed parameters,
    /// seeds, options, then one record per cell in row-major order.
    pub fn encode(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(GRID_MAGIC)?;
        w.write_all(&GRID_VERSION.to_le_bytes())?;
        put_axis(w, &self.spec.axis1)?;
        match &self.spec.axis2 {
            Some(a) => {
                w.write_all(&[1])?;
                put_axis(w, a)?;
            }
            None => w.write_all(&[0])?,
        }
        let b = &self.spec.base;
        for v in [b.delta_l, b.delta_r, b.tau_l, b.tau_r] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&[self.spec.seeds.tag()])?;
        if let SeedStrategy::Custom(pts) = &self.spec.seeds {
            w.write_all(&(pts.len() as u32).to_le_bytes())?;
            for p in pts {
                w.write_all(&p.x.to_le_bytes())?;
                w.write_all(&p.y.to_le_bytes())?;
            }
        }
        let o = &self.spec.opts;
        w.write_all(&(o.max_iter as u64).to_le_bytes())?;
        w.write_all(&(o.transient as u64).to_le_bytes())?;
        w.write_all(&o.escape_radius.to_le_bytes())?;
        w.write_all(&o.origin_tolerance.to_le_bytes())?;
        w.write_all(&(o.fingerprint_samples as u64).to_le_bytes())?;
        w.write_all(&(self.cells.len() as u32).to_le_bytes())?;
        for c in &self.cells {
            w.write_all(&[c.class.code(), c.attractors, c.seeds.len() as u8])?;
            let codes: Vec<u8> = c.seeds.iter().map(SeedOutcome::code).collect();
            w.write_all(&codes)?;
        }
        Ok(())
    }

    pub fn decode(r: &mut impl Read) -> Result<ScanGrid> {
        let mut rd = Reader(r);
        let mut magic = [0u8; 4];
        rd.fill(&mut magic)?;
        if &magic != GRID_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes(rd.array()?);
        if version != GRID_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let axis1 = rd.axis()?;
        let axis2 = match rd.u8()? {
            0 => None,
            1 => Some(rd.axis()?),
            t => return Err(Error::Format(format!("bad axis flag {t}"))),
        };
        let base = MapParams::new(rd.f64()?, rd.f64()?, rd.f64()?, rd.f64()?)
            .map_err(|_| Error::Format("non-finite parameters".into()))?;
        let seeds = match rd.u8()? {
            0 => SeedStrategy::Default,
            1 => SeedStrategy::Jittered,
            2 => {
                let n = rd.u32()? as usize;
                let mut v = Vec::with_capacity(n.min(1 << 16));
                for _ in 0..n {
                    v.push(Point2::new(rd.f64()?, rd.f64()?));
                }
                SeedStrategy::Custom(v)
            }
            t => return Err(Error::Format(format!("bad seed tag {t}"))),
        };
        let opts = ClassifyOptions {
            max_iter: rd.u64()? as usize,
            transient: rd.u64()? as usize,
            escape_radius: rd.f64()?,
            origin_tolerance: rd.f64()?,
            fingerprint_samples: rd.u64()? as usize,
            estimate_lyapunov: false,
        };
        let spec = ScanSpec {
            axis1,
            axis2,
            base,
            seeds,
            opts,
        };
        let n = rd.u32()? as usize;
        if n != axis1.samples * axis2.map_or(1, |a| a.samples) {
            return Err(Error::Format("cell count does not match axes".into()));
        }
        let mut cells = Vec::with_capacity(n);
        for _ in 0..n {
            let class = CellClass::from_code(rd.u8()?)
                .ok_or_else(|| Error::Format("bad cell class".into()))?;
            let attractors = rd.u8()?;
            let k = rd.u8()? as usize;
            let mut codes = vec![0u8; k];
            rd.fill(&mut codes)?;
            cells.push(CellRecord {
                class,
                attractors,
                seeds: codes.into_iter().map(SeedOutcome::from_code).collect(),
            });
        }
        Ok(ScanGrid {
            spec,
            cells,
            overlays: Vec::new(),
        })
    }
}

const GRID_MAGIC: &[u8; 4] = b"WQAS";
const GRID_VERSION: u16 = 1;

fn put_axis(w: &mut impl Write, a: &Axis) -> std::io::Result<()> {
    w.write_all(&[a.param.code()])?;
    w.write_all(&a.lo.to_le_bytes())?;
    w.write_all(&a.hi.to_le_bytes())?;
    w.write_all(&(a.samples as u32).to_le_bytes())
}

struct Reader<'a, R: Read>(&'a mut R);

impl<R: Read> Reader<'_, R> {
    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.0
            .read_exact(buf)
            .map_err(|e| Error::Format(format!("truncated grid file: {e}")))
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.fill(&mut b)?;
        Ok(b)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn axis(&mut self) -> Result<Axis> {
        let param = ParamId::from_code(self.u8()?).ok_or_else(|| Error::Format("bad parameter id".into()))?;
        let lo = self.f64()?;
        let hi = self.f64()?;
        let samples = self.u32()? as usize;
        Axis::new(param, lo, hi, samples).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Classifies every cell of a two-parameter grid.
pub fn scan_2d(spec: &ScanSpec) -> Result<ScanGrid> {
    spec.validate()?;
    let a2 = spec
        .axis2
        .ok_or_else(|| Error::Config("scan_2d needs a second axis".into()))?;
    let nx = spec.axis1.samples;
    let cells = (0..nx * a2.samples)
        .into_par_iter()
        .map(|idx| {
            let params = spec.params_at(idx % nx, idx / nx);
            classify_cell(&params, &spec.seeds.seeds(&params), &spec.opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid {
        spec: spec.clone(),
        cells,
        overlays: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    X,
    Y,
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "X" => Ok(Projection::X),
            "y" | "Y" => Ok(Projection::Y),
            _ => Err(Error::Config(format!("projection must be x or y, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scan1dOptions {
    pub projection: Projection,
    /// Tail points recorded per non-divergent seed.
    pub tail_points: usize,
    /// Seed each sweep value from the end state of the previous one.
    pub continuation: bool,
}

impl Default for Scan1dOptions {
    fn default() -> Self {
        Scan1dOptions {
            projection: Projection::X,
            tail_points: 200,
            continuation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bifurcation1D {
    pub param: ParamId,
    pub projection: Projection,
    pub values: Vec<f64>,
    /// Post-transient coordinates per sweep value; empty when every seed diverges.
    pub samples: Vec<Vec<f64>>,
    pub classes: Vec<CellClass>,
}

impl Bifurcation1D {
    /// Rows `value,class,coordinate`; divergent values get one row with an empty coordinate.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        let coord = match self.projection {
            Projection::X => "x",
            Projection::Y => "y",
        };
        w.write_record([self.param.name(), "class", coord])
            .map_err(|e| csv_err(path, e))?;
        for ((v, c), s) in self.values.iter().zip(&self.classes).zip(&self.samples) {
            if s.is_empty() {
                w.write_record([v.to_string(), c.to_string(), String::new()])
                    .map_err(|e| csv_err(path, e))?;
            }
            for x in s {
                w.write_record([v.to_string(), c.to_string(), x.to_string()])
                    .map_err(|e| csv_err(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn sweep_point(
    params: &MapParams,
    seeds: &[Point2],
    opts: &ClassifyOptions,
    o1: &Scan1dOptions,
) -> Result<(CellClass, Vec<f64>, Option<Point2>)> {
    let mut clusters = AttractorClusters::new();
    let mut outcomes = Vec::with_capacity(seeds.len());
    let mut samples = Vec::new();
    let mut end_state = None;
    for &s in seeds {
        let c = classify_orbit(params, s, opts)?;
        let outcome = match c.kind {
            OrbitKind::Diverged => SeedOutcome::Diverged,
            OrbitKind::ConvergedToO => {
                samples.push(0.0);
                SeedOutcome::Converged
            }
            OrbitKind::BoundedAperiodic => {
                let mut p = c.last;
                for _ in 0..o1.tail_points {
                    samples.push(match o1.projection {
                        Projection::X => p.x,
                        Projection::Y => p.y,
                    });
                    p = step(params, p);
                }
                end_state.get_or_insert(c.last);
                let fp = c.fingerprint.as_ref().expect("bounded orbits carry a fingerprint");
                SeedOutcome::Attractor(clusters.assign(fp).min(253) as u8)
            }
        };
        outcomes.push(outcome);
    }
    let rec = CellRecord::from_outcomes(outcomes, clusters.len().min(253) as u8);
    Ok((rec.class, samples, end_state))
}

/// Final-state diagram along a single parameter axis.
pub fn scan_1d(spec: &ScanSpec, o1: &Scan1dOptions) -> Result<Bifurcation1D> {
    spec.validate()?;
    if spec.axis2.is_some() {
        return Err(Error::Config("scan_1d takes a single axis".into()));
    }
    let a = spec.axis1;
    let rows: Vec<(CellClass, Vec<f64>)> = if o1.continuation {
        let mut prev: Option<Point2> = None;
        let mut out = Vec::with_capacity(a.samples);
        for i in 0..a.samples {
            let params = spec.params_at(i, 0);
            let seeds = match prev {
                Some(p) => vec![p],
                None => spec.seeds.seeds(&params),
            };
            let (class, s, end) = sweep_point(&params, &seeds, &spec.opts, o1)?;
            prev = end;
            out.push((class, s));
        }
        out
    } else {
        (0..a.samples)
            .into_par_iter()
            .map(|i| {
                let params = spec.params_at(i, 0);
                sweep_point(&params, &spec.seeds.seeds(&params), &spec.opts, o1).map(|(c, s, _)| (c, s))
            })
            .collect::<Result<_>>()?
    };
    let (classes, samples) = rows.into_iter().unzip();
    Ok(Bifurcation1D {
        param: a.param,
        projection: o1.projection,
        values: (0..a.samples).map(|i| a.value(i)).collect(),
        samples,
        classes,
    })
}

/// Traces each family across the scan window and attaches the curves.
///
/// Every family is traced twice, once per axis as the sweep direction, so
/// that arcs nearly parallel to either axis are sampled densely.
pub fn overlay_boundaries(grid: &mut ScanGrid, families: &[BoundaryFamily]) -> Result<()> {
    let a2 = match grid.spec.axis2 {
        Some(a) => a,
        None if families.is_empty() => return Ok(()),
        None => return Err(Error::Config("boundary overlays need a two-parameter grid".into())),
    };
    let a1 = grid.spec.axis1;
    for &family in families {
        for (sweep, solve) in [(a1, a2), (a2, a1)] {
            let spec = CurveTrace::new(
                family,
                grid.spec.base,
                sweep.param,
                solve.param,
                (sweep.lo, sweep.hi),
                (solve.lo, solve.hi),
                2 * sweep.samples,
            );
            grid.overlays.push(trace_boundary_curve(&spec)?);
        }
    }
    Ok(())
}
