//! The two-branch map, its partitions and inverse branches.
//!
//! Phase points left of the border line `x = -1` are advanced by the left
//! companion matrix, all others by the right one. Both branches are linear
//! and share the fixed point at the origin.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Mat2;

/// Abscissa of the border line.
pub const BORDER_X: f64 = -1.0;

/// Default escape radius for iteration.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub delta_l: f64,
    pub delta_r: f64,
    pub tau_l: f64,
    pub tau_r: f64,
}

impl MapParams {
    pub fn new(delta_l: f64, delta_r: f64, tau_l: f64, tau_r: f64) -> Result<Self> {
        let p = MapParams {
            delta_l,
            delta_r,
            tau_l,
            tau_r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.delta_l, self.delta_r, self.tau_l, self.tau_r]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::NonFinite("map parameters"))
        }
    }

    pub fn get(&self, id: ParamId) -> f64 {
        match id {
            ParamId::DeltaL => self.delta_l,
            ParamId::DeltaR => self.delta_r,
            ParamId::TauL => self.tau_l,
            ParamId::TauR => self.tau_r,
        }
    }

    pub fn with(mut self, id: ParamId, value: f64) -> Self {
        match id {
            ParamId::DeltaL => self.delta_l = value,
            ParamId::DeltaR => self.delta_r = value,
            ParamId::TauL => self.tau_l = value,
            ParamId::TauR => self.tau_r = value,
        }
        self
    }

    /// Parameters with the roles of the two branches exchanged.
    pub fn mirrored(&self) -> Self {
        MapParams {
            delta_l: self.delta_r,
            delta_r: self.delta_l,
            tau_l: self.tau_r,
            tau_r: self.tau_l,
        }
    }

    pub fn determinant(&self, side: Partition) -> f64 {
        match side {
            Partition::L => self.delta_l,
            Partition::R => self.delta_r,
        }
    }

    pub fn trace(&self, side: Partition) -> f64 {
        match side {
            Partition::L => self.tau_l,
            Partition::R => self.tau_r,
        }
    }
}

impl fmt::Display for MapParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.delta_l, self.delta_r, self.tau_l, self.tau_r
        )
    }
}

impl FromStr for MapParams {
    type Err = Error;

    /// Parses `delta_L,delta_R,tau_L,tau_R`.
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_reals(s, 4, "params")?;
        MapParams::new(v[0], v[1], v[2], v[3]).map_err(|_| Error::Config(format!("params: {s}")))
    }
}

pub(crate) fn parse_reals(s: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("{what}: {e} in '{s}'")))?;
    if v.len() != count {
        return Err(Error::Config(format!(
            "{what}: expected {count} comma-separated numbers, got '{s}'"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{what}: non-finite value in '{s}'")));
    }
    Ok(v)
}

/// One of the four map parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamId {
    DeltaL,
    DeltaR,
    TauL,
    TauR,
}

impl ParamId {
    pub const ALL: [ParamId; 4] = [ParamId::DeltaL, ParamId::DeltaR, ParamId::TauL, ParamId::TauR];

    pub fn name(&self) -> &'static str {
        match self {
            ParamId::DeltaL => "delta_L",
            ParamId::DeltaR => "delta_R",
            ParamId::TauL => "tau_L",
            ParamId::TauR => "tau_R",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            ParamId::DeltaL => 0,
            ParamId::DeltaR => 1,
            ParamId::TauL => 2,
            ParamId::TauR => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<ParamId> {
        ParamId::ALL.get(c as usize).copied()
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delta_l" | "dl" | "deltal" => Ok(ParamId::DeltaL),
            "delta_r" | "dr" | "deltar" => Ok(ParamId::DeltaR),
            "tau_l" | "tl" | "taul" => Ok(ParamId::TauL),
            "tau_r" | "tr" | "taur" => Ok(ParamId::TauR),
            _ => Err(Error::Config(format!("unknown parameter '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, o: Point2) -> f64 {
        (*self - o).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl FromStr for Point2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = parse_reals(s, 2, "point")?;
        Ok(Point2::new(v[0], v[1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partition {
    L,
    R,
}

impl Partition {
    pub fn letter(&self) -> char {
        match self {
            Partition::L => 'L',
            Partition::R => 'R',
        }
    }

    pub fn other(&self) -> Partition {
        match self {
            Partition::L => Partition::R,
            Partition::R => Partition::L,
        }
    }

    /// Whether `x` lies in the closure of this half-plane, widened by `slack`.
    pub fn contains_x(&self, x: f64, slack: f64) -> bool {
        match self {
            Partition::L => x <= BORDER_X + slack,
            Partition::R => x >= BORDER_X - slack,
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Partition label of an abscissa. The border line itself belongs to `R`.
#[inline]
pub fn side_of_x(x: f64) -> Partition {
    if x < BORDER_X {
        Partition::L
    } else {
        Partition::R
    }
}

pub fn partition_of(p: Point2) -> Result<Partition> {
    if !p.is_finite() {
        return Err(Error::NonFinite("phase point"));
    }
    Ok(side_of_x(p.x))
}

pub fn branch_matrix(params: &MapParams, side: Partition) -> Mat2 {
    let (d, t) = (params.determinant(side), params.trace(side));
    Mat2::new(t, 1.0, -d, 0.0)
}

/// One application of the map. Overflow shows up as a non-finite result.
#[inline]
pub fn step(params: &MapParams, p: Point2) -> Point2 {
    if p.x < BORDER_X {
        Point2::new(params.tau_l * p.x + p.y, -params.delta_l * p.x)
    } else {
        Point2::new(params.tau_r * p.x + p.y, -params.delta_r * p.x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub points: Vec<Point2>,
    pub itinerary: Vec<Partition>,
    /// Index of the first iterate that left the escape disc (not stored).
    pub escaped_at: Option<usize>,
}

impl Orbit {
    /// The itinerary as an `L`/`R` word.
    pub fn word(&self) -> String {
        self.itinerary.iter().map(Partition::letter).collect()
    }
}

/// Iterates `n_steps` times from `p0`, keeping `p0` as the first point.
///
/// Iteration stops at the first iterate whose norm exceeds `escape_radius`
/// or is not finite; that iterate's index is stored in `escaped_at`.
pub fn iterate_orbit(
    params: &MapParams,
    p0: Point2,
    n_steps: usize,
    escape_radius: f64,
) -> Result<Orbit> {
    if n_steps == 0 || !(escape_radius > 0.0) {
        return Err(Error::Precondition(
            "iterate_orbit needs n_steps >= 1 and escape_radius > 0".into(),
        ));
    }
    let first_side = partition_of(p0)?;
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut itinerary = Vec::with_capacity(n_steps + 1);
    points.push(p0);
    itinerary.push(first_side);
    let mut p = p0;
    let mut escaped_at = None;
    let r2 = escape_radius * escape_radius;
    for k in 1..=n_steps {
        p = step(params, p);
        if !(p.norm_sq() <= r2) {
            escaped_at = Some(k);
            break;
        }
        points.push(p);
        itinerary.push(side_of_x(p.x));
    }
    Ok(Orbit {
        points,
        itinerary,
        escaped_at,
    })
}

/// Preimages of `p` under the two branches that land in the matching partition.
pub fn inverse_images(params: &MapParams, p: Point2) -> Result<Vec<Point2>> {
    if !p.is_finite() {
        return Err(Error::NonFinite("phase point"));
    }
    let mut out = Vec::with_capacity(2);
    for side in [Partition::L, Partition::R] {
        let d = params.determinant(side);
        if d == 0.0 {
            return Err(Error::NongenericDeterminant {
                branch: side.letter(),
            });
        }
        let x = -p.y / d;
        let q = Point2::new(x, p.x - params.trace(side) * x);
        if side_of_x(q.x) == side {
            out.push(q);
        }
    }
    Ok(out)
}

/// Ordinates of the images of the border line under the left and right branches.
pub fn critical_lines(params: &MapParams) -> (f64, f64) {
    (params.delta_l, params.delta_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coexisting() -> MapParams {
        MapParams::new(0.9, 0.7, -2.0, 1.1).unwrap()
    }

    #[test]
    fn partition_labels() {
        assert_eq!(partition_of(Point2::new(-2.0, 0.0)).unwrap(), Partition::L);
        assert_eq!(partition_of(Point2::new(0.0, 0.0)).unwrap(), Partition::R);
        assert_eq!(partition_of(Point2::new(-1.0, 5.0)).unwrap(), Partition::R);
        assert!(partition_of(Point2::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn border_point_uses_right_branch() {
        let p = MapParams::new(0.9, 0.7, -2.0, 1.16).unwrap();
        let q = step(&p, Point2::new(-1.0, 0.0));
        assert_eq!(q, Point2::new(-1.16, 0.7));
    }

    #[test]
    fn branch_matrices() {
        let p = MapParams::new(0.9, 0.7, -2.0, 1.16).unwrap();
        assert_eq!(branch_matrix(&p, Partition::L), Mat2::new(-2.0, 1.0, -0.9, 0.0));
        assert_eq!(branch_matrix(&p, Partition::R), Mat2::new(1.16, 1.0, -0.7, 0.0));
        let m = branch_matrix(&p, Partition::L);
        assert_eq!(m.det(), 0.9);
        assert_eq!(m.trace(), -2.0);
    }

    #[test]
    fn step_by_hand() {
        let p = MapParams::new(0.9, 0.7, -2.0, 1.16).unwrap();
        assert_eq!(step(&p, Point2::ORIGIN), Point2::ORIGIN);
        let q = step(&p, Point2::new(-2.0, 0.5));
        assert!((q.x - 4.5).abs() < 1e-15 && (q.y - 1.8).abs() < 1e-15);
        let q = step(&p, Point2::new(1.0, 1.0));
        assert!((q.x - 2.16).abs() < 1e-15 && (q.y + 0.7).abs() < 1e-15);
    }

    #[test]
    fn origin_orbit_is_constant() {
        let o = iterate_orbit(&coexisting(), Point2::ORIGIN, 50, 1e8).unwrap();
        assert_eq!(o.points.len(), 51);
        assert!(o.points.iter().all(|p| *p == Point2::ORIGIN));
        assert_eq!(o.escaped_at, None);
        assert_eq!(o.word(), "R".repeat(51));
    }

    #[test]
    fn far_seed_escapes_in_divergence_regime() {
        let o = iterate_orbit(&coexisting(), Point2::new(-3.9, -1.2), 10_000, 1e8).unwrap();
        let k = o.escaped_at.expect("orbit should escape");
        assert_eq!(o.points.len(), k);
        assert_eq!(o.itinerary.len(), k);
    }

    #[test]
    fn focus_contracts() {
        let p = MapParams::new(0.9, 0.7, -2.0, 1.5).unwrap();
        let o = iterate_orbit(&p, Point2::new(0.1, 0.1), 400, 1e8).unwrap();
        assert!(o.itinerary.iter().all(|s| *s == Partition::R));
        // The norm spirals down like 0.7^(k/2); compare maxima over blocks of 20 steps.
        let norms: Vec<f64> = o.points.iter().map(Point2::norm).collect();
        let peaks: Vec<f64> = norms
            .chunks(20)
            .map(|c| c.iter().cloned().fold(0.0, f64::max))
            .collect();
        for w in peaks.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(norms[400] < 1e-25);
    }

    #[test]
    fn zero_zone_has_no_preimage() {
        let p = MapParams::new(0.9, 0.7, 0.0, 0.0).unwrap();
        assert!(inverse_images(&p, Point2::new(0.0, 0.8)).unwrap().is_empty());
        let pre = inverse_images(&p, Point2::ORIGIN).unwrap();
        assert_eq!(pre, vec![Point2::ORIGIN]);
    }

    #[test]
    fn two_zone_has_two_preimages() {
        let p = MapParams::new(0.9, 1.1, 0.3, 0.71).unwrap();
        let target = Point2::new(0.25, 1.0);
        let pre = inverse_images(&p, target).unwrap();
        assert_eq!(pre.len(), 2);
        for q in pre {
            assert!(step(&p, q).dist(target) < 1e-12);
        }
    }

    #[test]
    fn zero_determinant_is_rejected() {
        let p = MapParams::new(0.0, 0.7, 0.3, 0.71).unwrap();
        assert!(matches!(
            inverse_images(&p, Point2::new(0.0, 1.0)),
            Err(Error::NongenericDeterminant { branch: 'L' })
        ));
    }

    #[test]
    fn critical_line_ordinates() {
        assert_eq!(critical_lines(&coexisting()), (0.9, 0.7));
        let p = MapParams::new(0.75, 1.2, -0.7, -2.5).unwrap();
        assert_eq!(critical_lines(&p), (0.75, 1.2));
        // The border line is carried onto the critical lines.
        for y in [-3.0, 0.0, 2.5] {
            let on_border = Point2::new(-1.0 - 1e-12, y);
            assert!((step(&p, on_border).y - 0.75).abs() < 1e-9);
            assert!((step(&p, Point2::new(-1.0, y)).y - 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn nonfinite_params_rejected() {
        assert!(MapParams::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(MapParams::new(0.0, 0.0, f64::INFINITY, 0.0).is_err());
        assert!("0.9,0.7,-2".parse::<MapParams>().is_err());
        assert_eq!(
            "0.9, 0.7, -2, 1.1".parse::<MapParams>().unwrap(),
            coexisting()
        );
    }

    fn params() -> impl Strategy<Value = MapParams> {
        (0.05f64..2.0, 0.05f64..2.0, -3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(a, b, c, d)| MapParams::new(a, b, c, d).unwrap())
    }

    proptest! {
        #[test]
        fn step_matches_branch_matrix(p in params(), x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let q = Point2::new(x, y);
            let side = partition_of(q).unwrap();
            prop_assert_eq!(step(&p, q), branch_matrix(&p, side).apply(q));
        }

        #[test]
        fn branches_are_homogeneous(p in params(), x in 0.0f64..20.0, y in -20.0f64..20.0, a in 0.1f64..10.0) {
            // Right half-plane x >= 0 is a cone inside D_R; likewise x <= -1 scaled by a >= 1 stays in D_L.
            let q = Point2::new(x, y);
            let lhs = step(&p, q * a);
            let rhs = step(&p, q) * a;
            prop_assert!(lhs.dist(rhs) <= 1e-12 * (1.0 + rhs.norm()));
            let ql = Point2::new(-1.5 - x, y);
            let al = 1.0 + a;
            let lhs = step(&p, ql * al);
            let rhs = step(&p, ql) * al;
            prop_assert!(lhs.dist(rhs) <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn preimages_map_back(p in params(), x in -20.0f64..20.0, y in -20.0f64..20.0) {
            let q = Point2::new(x, y);
            for pre in inverse_images(&p, q).unwrap() {
                let back = step(&p, pre);
                prop_assert!(back.dist(q) <= 1e-9 * (1.0 + q.norm()));
            }
        }

        #[test]
        fn origin_is_the_only_linear_fixed_point(p in params()) {
            // (J_i - I) v = 0 has only the trivial solution unless 1 - tau + delta = 0.
            for side in [Partition::L, Partition::R] {
                let m = branch_matrix(&p, side);
                let shifted = Mat2::new(m.m11 - 1.0, m.m12, m.m21, m.m22 - 1.0);
                prop_assume!((1.0 - p.trace(side) + p.determinant(side)).abs() > 1e-9);
                let v = shifted.solve(Point2::ORIGIN).unwrap();
                prop_assert_eq!(v, Point2::ORIGIN);
            }
        }
    }
}
