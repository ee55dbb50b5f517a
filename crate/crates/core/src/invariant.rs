//! Divergence boundaries, segment sets of nonhyperbolic cycles and cycles
//! at infinity.
//!
//! A word `σ` with `P_σ(1) = 0` has a line of fixed points of the linear map
//! `F_σ`. Whether part of that line is made of genuine `σ`-cycles of `F` is
//! decided by [`admissible_interval`]; the admissible part is a
//! [`SegmentSet`]. Where the segments are halflines the parameter point lies
//! on the boundary of a divergence region.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigen2, EigenKind, Slope};
use crate::map::{branch_matrix, MapParams, ParamId, Partition, Point2, BORDER_X};
use crate::roots::bracket_roots;
use crate::symbolic::{
    char_poly_at, composite_matrix, recurrence_a, recurrence_b, unit_eigen_scale,
    SymbolicSequence, UNIT_EIGEN_TOL,
};

/// Slack on partition membership at segment endpoints.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Parameter offset used to probe either side of a curve.
pub const SIDE_OFFSET: f64 = 1e-3;

/// Closed-form curve families. `n` is carried separately in [`BoundaryFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// `P_{LR^{n−1}}(1) = 0`
    BLRn1,
    /// `P_{L²R^{n−2}}(1) = 0`
    BL2Rn2,
    BRLn1,
    BR2Ln2,
    /// Zero discriminant of `J_{LR^{n−1}}`.
    ELRn1,
    EL2Rn2,
    ERLn1,
    ER2Ln2,
    /// Horizontal `λ`-eigenvectors of `J_{LR^{n−1}}`.
    HLRn1,
    HRLn1,
    /// `P_{LR}(1) = 0`, the two-cycle case.
    BLR,
}

impl CurveKind {
    pub const ALL: [CurveKind; 11] = [
        CurveKind::BLRn1,
        CurveKind::BL2Rn2,
        CurveKind::BRLn1,
        CurveKind::BR2Ln2,
        CurveKind::ELRn1,
        CurveKind::EL2Rn2,
        CurveKind::ERLn1,
        CurveKind::ER2Ln2,
        CurveKind::HLRn1,
        CurveKind::HRLn1,
        CurveKind::BLR,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::BLRn1 => "B_LRn1",
            CurveKind::BL2Rn2 => "B_L2Rn2",
            CurveKind::BRLn1 => "B_RLn1",
            CurveKind::BR2Ln2 => "B_R2Ln2",
            CurveKind::ELRn1 => "E_LRn1",
            CurveKind::EL2Rn2 => "E_L2Rn2",
            CurveKind::ERLn1 => "E_RLn1",
            CurveKind::ER2Ln2 => "E_R2Ln2",
            CurveKind::HLRn1 => "H_LRn1",
            CurveKind::HRLn1 => "H_RLn1",
            CurveKind::BLR => "B_LR",
        }
    }

    pub fn letter(&self) -> char {
        self.name().as_bytes()[0] as char
    }

    /// Branch that opens the associated word.
    pub fn first(&self) -> Partition {
        use CurveKind::*;
        match self {
            BLRn1 | BL2Rn2 | ELRn1 | EL2Rn2 | HLRn1 | BLR => Partition::L,
            _ => Partition::R,
        }
    }

    fn is_complementary(&self) -> bool {
        use CurveKind::*;
        matches!(self, BL2Rn2 | BR2Ln2 | EL2Rn2 | ER2Ln2)
    }

    pub fn min_n(&self) -> usize {
        match self {
            CurveKind::BLR => 2,
            _ => 3,
        }
    }

    pub fn max_n(&self) -> usize {
        match self {
            CurveKind::BLR => 2,
            _ => 64,
        }
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace(['_', '-', ' '], "").to_ascii_uppercase();
        CurveKind::ALL
            .iter()
            .find(|k| k.name().replace('_', "").to_ascii_uppercase() == key)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown curve family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryFamily {
    pub kind: CurveKind,
    pub n: usize,
}

impl BoundaryFamily {
    pub fn new(kind: CurveKind, n: usize) -> Result<Self> {
        if n < kind.min_n() || n > kind.max_n() {
            return Err(Error::Config(format!(
                "{} needs {} <= n <= {}, got {n}",
                kind.name(),
                kind.min_n(),
                kind.max_n()
            )));
        }
        Ok(BoundaryFamily { kind, n })
    }

    /// The word whose composite Jacobian defines this curve.
    pub fn sigma(&self) -> SymbolicSequence {
        let first = self.kind.first();
        if self.kind.is_complementary() {
            SymbolicSequence::complementary(first, self.n)
        } else {
            SymbolicSequence::basic(first, self.n)
        }
        .expect("n validated on construction")
    }

    /// Word of the competing cycle at infinity across an `H` curve.
    fn h_partner(&self) -> Option<SymbolicSequence> {
        match self.kind {
            CurveKind::HLRn1 | CurveKind::HRLn1 => {
                SymbolicSequence::complementary(self.kind.first(), self.n).ok()
            }
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryFamily {
    /// Label such as `B_{LR^4}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{}}}", self.kind.letter(), self.sigma())
    }
}

impl FromStr for BoundaryFamily {
    type Err = Error;

    /// Parses `B_LRn1:5`, `E_RLn1/5` or `B_LR`.
    fn from_str(s: &str) -> Result<Self> {
        let (k, n) = match s.split_once([':', '/']) {
            Some((k, n)) => (
                k,
                n.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad period in '{s}'")))?,
            ),
            None => (s, 2),
        };
        BoundaryFamily::new(k.parse()?, n)
    }
}

/// Signed residual of the closed-form curve equation; zero on the curve.
pub fn boundary_residual(params: &MapParams, family: &BoundaryFamily) -> f64 {
    let MapParams {
        delta_l: dl,
        delta_r: dr,
        tau_l: tl,
        tau_r: tr,
    } = *params;
    let n = family.n as i32;
    let a = |k: i32| recurrence_a(params, k).expect("n validated on construction");
    let b = |k: i32| recurrence_b(params, k).expect("n validated on construction");
    let s = dl + dr;
    match family.kind {
        CurveKind::BLR => 1.0 - tl * tr + dr + dl + dr * dl,
        CurveKind::BLRn1 => 1.0 - tl * a(n - 1) + s * a(n - 2) + dl * dr.powi(n - 1),
        CurveKind::BRLn1 => 1.0 - tr * b(n - 1) + s * b(n - 2) + dr * dl.powi(n - 1),
        CurveKind::BL2Rn2 => {
            1.0 + (tl * s - dl * tr) * a(n - 3) - (tl * tl - 2.0 * dl) * a(n - 2)
                + dl * dl * dr.powi(n - 2)
        }
        CurveKind::BR2Ln2 => {
            1.0 + (tr * s - dr * tl) * b(n - 3) - (tr * tr - 2.0 * dr) * b(n - 2)
                + dr * dr * dl.powi(n - 2)
        }
        CurveKind::ELRn1 => {
            let t = tl * a(n - 1) - s * a(n - 2);
            t * t - 4.0 * dl * dr.powi(n - 1)
        }
        CurveKind::ERLn1 => {
            let t = tr * b(n - 1) - s * b(n - 2);
            t * t - 4.0 * dr * dl.powi(n - 1)
        }
        CurveKind::EL2Rn2 => {
            let t = (dl * tr - tl * s) * a(n - 3) + (tl * tl - 2.0 * dl) * a(n - 2);
            t * t - 4.0 * dl * dl * dr.powi(n - 2)
        }
        CurveKind::ER2Ln2 => {
            let t = (dr * tl - tr * s) * b(n - 3) + (tr * tr - 2.0 * dr) * b(n - 2);
            t * t - 4.0 * dr * dr * dl.powi(n - 2)
        }
        CurveKind::HLRn1 => dl * a(n - 3) - tl * a(n - 2),
        CurveKind::HRLn1 => dr * b(n - 3) - tr * b(n - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityStatus {
    AdmissibleUnbounded,
    AdmissibleBounded,
    Virtual,
}

impl AdmissibilityStatus {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, AdmissibilityStatus::Virtual)
    }
}

/// End of a segment: a point, or the direction of a halfline's far end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Finite(Point2),
    AtInfinity(Point2),
}

impl Endpoint {
    pub fn finite(&self) -> Option<Point2> {
        match *self {
            Endpoint::Finite(p) => Some(p),
            Endpoint::AtInfinity(_) => None,
        }
    }
}

/// One piece `S_j` of a segment set, `{t·dir : lo < t < hi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub side: Partition,
    pub dir: Point2,
    pub lo: f64,
    pub hi: f64,
    pub slope: Slope,
}

impl Segment {
    pub fn start(&self) -> Endpoint {
        end_at(self.dir, self.lo)
    }

    pub fn end(&self) -> Endpoint {
        end_at(self.dir, self.hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn point(&self, t: f64) -> Point2 {
        self.dir * t
    }

    /// Line coordinate at fraction `u ∈ (0, 1)` of the segment. Halflines are
    /// mapped through `u / (1 − u)` measured from their finite end.
    pub fn coord_at(&self, u: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + u * (self.hi - self.lo),
            (true, false) => self.lo + self.lo.abs().max(1.0) * u / (1.0 - u),
            (false, true) => self.hi - self.hi.abs().max(1.0) * u / (1.0 - u),
            (false, false) => (u - 0.5) / (u * (1.0 - u)),
        }
    }

    /// Whether `p` lies on the segment within `tol`, relative to `‖p‖`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let d2 = self.dir.norm_sq();
        let t = (p.x * self.dir.x + p.y * self.dir.y) / d2;
        let scale = tol * (1.0 + p.norm());
        let off_line = (p - self.dir * t).norm();
        let span = self.dir.norm();
        off_line <= scale && t * span >= self.lo * span - scale && t * span <= self.hi * span + scale
    }
}

fn end_at(dir: Point2, t: f64) -> Endpoint {
    if t.is_finite() {
        Endpoint::Finite(dir * t)
    } else {
        let u = dir * (t.signum() / dir.norm());
        Endpoint::AtInfinity(u)
    }
}

/// Cyclic pieces `S_0 … S_{n−1}` with `F(S_j) = S_{j+1 mod n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    pub sigma: SymbolicSequence,
    pub segments: Vec<Segment>,
}

impl SegmentSet {
    pub fn is_bounded(&self) -> bool {
        self.segments.iter().all(Segment::is_bounded)
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `count` points on `S_0`, spread over the interior.
    pub fn sample_first(&self, count: usize) -> Vec<Point2> {
        let s = &self.segments[0];
        (0..count)
            .map(|i| s.point(s.coord_at((i as f64 + 0.5) / count as f64)))
            .collect()
    }

    /// Writes `segment,side,x0,y0,x1,y1,slope` rows; infinite ends carry `inf`
    /// in place of coordinates and a unit direction in a trailing pair.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record([
            "segment", "side", "start_x", "start_y", "end_x", "end_y", "slope",
        ])
        .map_err(|e| csv_err(path, e))?;
        for (j, s) in self.segments.iter().enumerate() {
            let fmt_end = |e: Endpoint| match e {
                Endpoint::Finite(p) => (p.x.to_string(), p.y.to_string()),
                Endpoint::AtInfinity(d) => (format!("inf*{}", d.x), format!("inf*{}", d.y)),
            };
            let (a, b) = fmt_end(s.start());
            let (c, d) = fmt_end(s.end());
            w.write_record([
                j.to_string(),
                s.side.to_string(),
                a,
                b,
                c,
                d,
                s.slope.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityResult {
    pub status: AdmissibilityStatus,
    /// Admissible range of the coordinate `t` along `t·v` on the eigenline.
    pub interval: (f64, f64),
    pub segments: Option<SegmentSet>,
}

/// Images `w_j = J_{σ_{j−1}} ⋯ J_{σ_0} v` for `j = 0..n`.
fn orbit_of_direction(params: &MapParams, sigma: &SymbolicSequence, v: Point2) -> Vec<Point2> {
    let mut w = Vec::with_capacity(sigma.len());
    let mut cur = v;
    for &s in sigma.letters() {
        w.push(cur);
        cur = branch_matrix(params, s).apply(cur);
    }
    w
}

/// Largest interval of `t` for which `t·w_j` lies in `D_{σ_j}` for every `j`,
/// with closed partitions widened by [`MEMBERSHIP_SLACK`]. `None` when empty.
fn membership_interval(sigma: &SymbolicSequence, w: &[Point2]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (&s, wj) in sigma.letters().iter().zip(w) {
        let c = wj.x;
        if c.abs() <= 1e-14 * wj.norm() {
            // The whole image line is vertical through the origin, x = 0 > −1.
            match s {
                Partition::L => return None,
                Partition::R => continue,
            }
        }
        let bound = match s {
            Partition::L => (BORDER_X + MEMBERSHIP_SLACK) / c,
            Partition::R => (BORDER_X - MEMBERSHIP_SLACK) / c,
        };
        // L: t·c ≤ bound·c, R: t·c ≥ bound·c
        let upper = (s == Partition::L) == (c > 0.0);
        if upper {
            hi = hi.min(bound);
        } else {
            lo = lo.max(bound);
        }
    }
    (lo < hi).then_some((lo, hi))
}

fn build_segments(
    params: &MapParams,
    sigma: &SymbolicSequence,
    v: Point2,
    (lo, hi): (f64, f64),
) -> SegmentSet {
    let w = orbit_of_direction(params, sigma, v);
    let segments = sigma
        .letters()
        .iter()
        .zip(&w)
        .map(|(&side, &dir)| Segment {
            side,
            dir,
            lo,
            hi,
            slope: Slope::of_direction(dir),
        })
        .collect();
    SegmentSet {
        sigma: sigma.clone(),
        segments,
    }
}

fn require_unit_eigenvalue(params: &MapParams, sigma: &SymbolicSequence) -> Result<Point2> {
    let m = composite_matrix(params, sigma);
    let p1 = m.char_poly(1.0);
    if !(p1.abs() <= UNIT_EIGEN_TOL * unit_eigen_scale(&m)) {
        return Err(Error::Precondition(format!(
            "P_{sigma}(1) = {p1:e}; move the parameters onto the curve first"
        )));
    }
    // With both eigenvalues at 1 and J_σ ≠ I the eigenline is still unique;
    // J_σ = I would make every line invariant.
    let v = m
        .eigenvector(1.0)
        .ok_or_else(|| Error::Precondition(format!("J_{sigma} is the identity")))?;
    Ok(Slope::of_direction(v).direction())
}

/// Maximal admissible part of the line of fixed points of `F_σ`.
pub fn admissible_interval(
    params: &MapParams,
    sigma: &SymbolicSequence,
) -> Result<AdmissibilityResult> {
    let v = require_unit_eigenvalue(params, sigma)?;
    let w = orbit_of_direction(params, sigma, v);
    Ok(match membership_interval(sigma, &w) {
        None => AdmissibilityResult {
            status: AdmissibilityStatus::Virtual,
            interval: (f64::NAN, f64::NAN),
            segments: None,
        },
        Some(iv) => AdmissibilityResult {
            status: if iv.0.is_finite() && iv.1.is_finite() {
                AdmissibilityStatus::AdmissibleBounded
            } else {
                AdmissibilityStatus::AdmissibleUnbounded
            },
            interval: iv,
            segments: Some(build_segments(params, sigma, v, iv)),
        },
    })
}

/// The segment set of nonhyperbolic `σ`-cycles; an error when it is virtual.
pub fn segment_set_at(params: &MapParams, sigma: &SymbolicSequence) -> Result<SegmentSet> {
    admissible_interval(params, sigma)?
        .segments
        .ok_or_else(|| Error::Virtual(sigma.to_string()))
}

/// An expanding `σ`-cycle at infinity: halflines along an eigenvector of
/// `J_σ` with eigenvalue `λ > 1` whose images follow `σ` out to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleAtInfinity {
    pub lambda: f64,
    /// Unit direction of the escaping end of the halfline in `D_{σ_0}`.
    pub direction: Point2,
    pub segments: SegmentSet,
}

pub fn cycle_at_infinity(params: &MapParams, sigma: &SymbolicSequence) -> Option<CycleAtInfinity> {
    let m = composite_matrix(params, sigma);
    let e = eigen2(&m);
    if e.kind == EigenKind::ComplexConjugate {
        return None;
    }
    let lambda = e.lambda1.re;
    if !(lambda > 1.0) {
        return None;
    }
    let v = e.slope1?.direction();
    let w = orbit_of_direction(params, sigma, v);
    let iv = membership_interval(sigma, &w)?;
    let sign = match (iv.0.is_finite(), iv.1.is_finite()) {
        (true, true) => return None,
        (true, false) => 1.0,
        (false, true) => -1.0,
        (false, false) => 1.0,
    };
    Some(CycleAtInfinity {
        lambda,
        direction: v * (sign / v.norm()),
        segments: build_segments(params, sigma, v, iv),
    })
}

/// Moves parameter `axis` within `guess ± half_width` onto `P_σ(1) = 0`,
/// taking the root nearest `guess`.
pub fn snap_to_curve(
    params: &MapParams,
    sigma: &SymbolicSequence,
    axis: ParamId,
    guess: f64,
    half_width: f64,
) -> Result<MapParams> {
    let f = |v: f64| char_poly_at(&params.with(axis, v), sigma, 1.0);
    bracket_roots(f, guess - half_width, guess + half_width, 64)
        .into_iter()
        .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
        .map(|v| params.with(axis, v))
        .ok_or_else(|| {
            Error::Precondition(format!(
                "P_{sigma}(1) has no sign change for {axis} in {guess} ± {half_width}"
            ))
        })
}

/// How a traced curve point relates to the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveStatus {
    /// Halflines of nonhyperbolic cycles: a divergence-region boundary.
    AdmissibleUnbounded,
    /// Bounded segments; not a divergence boundary.
    AdmissibleBounded,
    Virtual,
    /// `J_σ = I`; the admissibility test is undefined.
    Singular,
    /// Discriminant curves carry no admissibility meaning.
    NotApplicable,
    /// `H` point with a cycle at infinity on both sides.
    InsideDivergence,
}

impl CurveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveStatus::AdmissibleUnbounded => "admissible-unbounded",
            CurveStatus::AdmissibleBounded => "admissible-bounded",
            CurveStatus::Virtual => "virtual",
            CurveStatus::Singular => "singular",
            CurveStatus::NotApplicable => "not-applicable",
            CurveStatus::InsideDivergence => "inside-divergence",
        }
    }
}

impl fmt::Display for CurveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub sweep: f64,
    pub solve: f64,
    pub status: CurveStatus,
}

/// Set-up for [`trace_boundary_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    pub family: BoundaryFamily,
    /// Supplies the two parameters that are neither swept nor solved for.
    pub base: MapParams,
    pub sweep_axis: ParamId,
    pub solve_axis: ParamId,
    pub sweep_range: (f64, f64),
    pub solve_range: (f64, f64),
    /// Number of sweep samples, endpoints included.
    pub steps: usize,
    /// Number of equal brackets scanned along the solve axis.
    pub brackets: usize,
}

impl CurveTrace {
    pub fn new(
        family: BoundaryFamily,
        base: MapParams,
        sweep_axis: ParamId,
        solve_axis: ParamId,
        sweep_range: (f64, f64),
        solve_range: (f64, f64),
        steps: usize,
    ) -> Self {
        CurveTrace {
            family,
            base,
            sweep_axis,
            solve_axis,
            sweep_range,
            solve_range,
            steps,
            brackets: 256,
        }
    }

    fn sweep_value(&self, i: usize) -> f64 {
        let (a, b) = self.sweep_range;
        if self.steps <= 1 {
            a
        } else {
            a + (b - a) * i as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub family: BoundaryFamily,
    pub sweep_axis: ParamId,
    pub solve_axis: ParamId,
    /// Roots in sweep order, ascending solve value within one sweep sample.
    pub points: Vec<CurvePoint>,
}

impl BoundaryCurve {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record(["sweep_value", "solve_value", "admissibility_status"])
            .map_err(|e| csv_err(path, e))?;
        for p in &self.points {
            w.write_record([
                p.sweep.to_string(),
                p.solve.to_string(),
                p.status.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Same content as [`Self::write_csv`], to any writer.
    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        writeln!(out, "sweep_value,solve_value,admissibility_status").unwrap();
        for p in &self.points {
            writeln!(out, "{},{},{}", p.sweep, p.solve, p.status).unwrap();
        }
        String::from_utf8(out).unwrap()
    }
}

/// Status of a curve point at parameters `at`.
pub fn classify_curve_point(family: &BoundaryFamily, at: &MapParams, solve_axis: ParamId) -> Option<CurveStatus> {
    match family.kind.letter() {
        'B' => Some(match admissible_interval(at, &family.sigma()) {
            Ok(r) => match r.status {
                AdmissibilityStatus::AdmissibleUnbounded => CurveStatus::AdmissibleUnbounded,
                AdmissibilityStatus::AdmissibleBounded => CurveStatus::AdmissibleBounded,
                AdmissibilityStatus::Virtual => CurveStatus::Virtual,
            },
            Err(_) => CurveStatus::Singular,
        }),
        'E' => Some(CurveStatus::NotApplicable),
        _ => {
            let basic = family.sigma();
            let partner = family.h_partner()?;
            let v = at.get(solve_axis);
            let certified = [v - SIDE_OFFSET, v + SIDE_OFFSET].iter().all(|&u| {
                let q = at.with(solve_axis, u);
                cycle_at_infinity(&q, &basic).is_some() || cycle_at_infinity(&q, &partner).is_some()
            });
            certified.then_some(CurveStatus::InsideDivergence)
        }
    }
}

/// Traces the zero set of [`boundary_residual`] in a two-parameter plane.
///
/// Every root along the solve axis is reported for each sweep sample. `H`
/// curves keep only the points that are inside a divergence region.
pub fn trace_boundary_curve(spec: &CurveTrace) -> Result<BoundaryCurve> {
    if spec.sweep_axis == spec.solve_axis {
        return Err(Error::Config("sweep and solve axes must differ".into()));
    }
    spec.base.validate()?;
    let per_sample: Vec<Vec<CurvePoint>> = (0..spec.steps.max(1))
        .into_par_iter()
        .map(|i| {
            let s = spec.sweep_value(i);
            let at = spec.base.with(spec.sweep_axis, s);
            let f = |v: f64| boundary_residual(&at.with(spec.solve_axis, v), &spec.family);
            bracket_roots(f, spec.solve_range.0, spec.solve_range.1, spec.brackets)
                .into_iter()
                .filter_map(|v| {
                    let q = at.with(spec.solve_axis, v);
                    classify_curve_point(&spec.family, &q, spec.solve_axis).map(|status| CurvePoint {
                        sweep: s,
                        solve: v,
                        status,
                    })
                })
                .collect()
        })
        .collect();
    Ok(BoundaryCurve {
        family: spec.family,
        sweep_axis: spec.sweep_axis,
        solve_axis: spec.solve_axis,
        points: per_sample.into_iter().flatten().collect(),
    })
}
