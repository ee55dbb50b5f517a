//! Words over `{L, R}` and the composite linear maps they name.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Slope};
use crate::map::{branch_matrix, MapParams, Partition};

/// Longest word accepted anywhere in the crate.
pub const MAX_WORD_LEN: usize = 64;

/// Relative tolerance on `P_σ(1)` for operations that need `λ = 1` to be an eigenvalue.
pub const UNIT_EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicSequence {
    letters: Vec<Partition>,
}

impl SymbolicSequence {
    pub fn new(letters: Vec<Partition>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidSequence("empty word".into()));
        }
        if letters.len() > MAX_WORD_LEN {
            return Err(Error::InvalidSequence(format!(
                "length {} exceeds the cap of {MAX_WORD_LEN}",
                letters.len()
            )));
        }
        Ok(SymbolicSequence { letters })
    }

    /// `first · other^(n−1)`, e.g. `LR^4` for `(L, 5)`.
    pub fn basic(first: Partition, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSequence(format!("basic word needs n >= 2, got {n}")));
        }
        let mut v = vec![first];
        v.extend(std::iter::repeat_n(first.other(), n - 1));
        Self::new(v)
    }

    /// `first² · other^(n−2)`, e.g. `L^2R^3` for `(L, 5)`.
    pub fn complementary(first: Partition, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSequence(format!(
                "complementary word needs n >= 3, got {n}"
            )));
        }
        let mut v = vec![first, first];
        v.extend(std::iter::repeat_n(first.other(), n - 2));
        Self::new(v)
    }

    pub fn letters(&self) -> &[Partition] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count(&self, side: Partition) -> usize {
        self.letters.iter().filter(|&&s| s == side).count()
    }

    /// Letter-by-letter spelling, e.g. `LRRRR`.
    pub fn word(&self) -> String {
        self.letters.iter().map(Partition::letter).collect()
    }

    /// The word with `L` and `R` exchanged.
    pub fn mirrored(&self) -> Self {
        SymbolicSequence {
            letters: self.letters.iter().map(Partition::other).collect(),
        }
    }

    /// Cyclic shift by `k`: letter `j` of the result is letter `j + k` of `self`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.rotate_left(k % self.len());
        SymbolicSequence { letters }
    }

    /// Every word of length `min_len..=max_len`, shorter words first.
    pub fn all_words(min_len: usize, max_len: usize) -> Vec<SymbolicSequence> {
        let mut out = Vec::new();
        for len in min_len.max(1)..=max_len.min(MAX_WORD_LEN) {
            for bits in 0u64..(1u64 << len) {
                let letters = (0..len)
                    .map(|j| {
                        if bits >> (len - 1 - j) & 1 == 0 {
                            Partition::L
                        } else {
                            Partition::R
                        }
                    })
                    .collect();
                out.push(SymbolicSequence { letters });
            }
        }
        out
    }
}

impl fmt::Display for SymbolicSequence {
    /// Run-length form such as `L^2R^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.letters.len() {
            let c = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == c {
                j += 1;
            }
            write!(f, "{c}")?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for SymbolicSequence {
    type Err = Error;

    /// Accepts spelled-out words (`LRRRR`) and powers (`LR^4`, `L2R3`).
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut chars = s.trim().chars().peekable();
        while let Some(c) = chars.next() {
            let side = match c.to_ascii_uppercase() {
                'L' => Partition::L,
                'R' => Partition::R,
                _ => return Err(Error::InvalidSequence(format!("unexpected '{c}' in '{s}'"))),
            };
            if chars.peek() == Some(&'^') {
                chars.next();
            }
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let reps = if digits.is_empty() {
                1
            } else {
                digits
                    .parse::<usize>()
                    .ok()
                    .filter(|r| (1..=MAX_WORD_LEN).contains(r))
                    .ok_or_else(|| Error::InvalidSequence(format!("bad exponent in '{s}'")))?
            };
            letters.extend(std::iter::repeat_n(side, reps));
            if letters.len() > MAX_WORD_LEN {
                break;
            }
        }
        SymbolicSequence::new(letters)
    }
}

/// `x_k = τ x_{k−1} − δ x_{k−2}` with `x_{−1} = 0`, `x_0 = 1`.
fn recurrence(delta: f64, tau: f64, k: i32) -> Result<f64> {
    if !(-1..=MAX_WORD_LEN as i32).contains(&k) {
        return Err(Error::RecurrenceIndex(k));
    }
    if k == -1 {
        return Ok(0.0);
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        let next = tau * cur - delta * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `a_k` built from the right-branch trace and determinant.
pub fn recurrence_a(params: &MapParams, k: i32) -> Result<f64> {
    recurrence(params.delta_r, params.tau_r, k)
}

/// `b_k` built from the left-branch trace and determinant.
pub fn recurrence_b(params: &MapParams, k: i32) -> Result<f64> {
    recurrence(params.delta_l, params.tau_l, k)
}

/// Jacobian of the composite map that applies `σ_0` first and `σ_{n−1}` last,
/// i.e. `J_{σ_{n−1}} ⋯ J_{σ_1} J_{σ_0}`.
pub fn composite_matrix(params: &MapParams, sigma: &SymbolicSequence) -> Mat2 {
    let jl = branch_matrix(params, Partition::L);
    let jr = branch_matrix(params, Partition::R);
    sigma.letters().iter().fold(Mat2::IDENTITY, |acc, s| {
        let j = match s {
            Partition::L => jl,
            Partition::R => jr,
        };
        j * acc
    })
}

pub fn char_poly_at(params: &MapParams, sigma: &SymbolicSequence, lambda: f64) -> f64 {
    composite_matrix(params, sigma).char_poly(lambda)
}

/// Scale used to judge whether `P_σ(1)` is numerically zero.
pub(crate) fn unit_eigen_scale(m: &Mat2) -> f64 {
    1.0 + m.trace().abs() + m.det().abs()
}

/// Slope of the line of fixed points of the composite map `F_σ`.
///
/// Needs `P_σ(1) ≈ 0`. A vertical line is returned as [`Slope::Infinite`].
pub fn eigen_slope_at_one(params: &MapParams, sigma: &SymbolicSequence) -> Result<Slope> {
    let m = composite_matrix(params, sigma);
    let p1 = m.char_poly(1.0);
    if !(p1.abs() <= UNIT_EIGEN_TOL * unit_eigen_scale(&m)) {
        return Err(Error::Precondition(format!(
            "P_{sigma}(1) = {p1:e} is not zero; 1 is not an eigenvalue"
        )));
    }
    m.eigenvector(1.0)
        .map(Slope::of_direction)
        .ok_or_else(|| Error::Precondition(format!("J_{sigma} is the identity")))
}

/// Eigenvector slope of `J_{first·other^(n−1)}` for eigenvalue `lambda` in
/// closed form. `None` when the denominator vanishes.
pub fn basic_slope_closed_form(
    params: &MapParams,
    first: Partition,
    n: usize,
    lambda: f64,
) -> Result<Option<f64>> {
    let p = match first {
        Partition::L => *params,
        Partition::R => params.mirrored(),
    };
    let n = n as i32;
    let a2 = recurrence_a(&p, n - 2)?;
    let a3 = recurrence_a(&p, n - 3)?;
    let num = p.delta_r * (p.delta_l * a3 - p.tau_l * a2);
    let den = p.delta_r * a2 + lambda;
    Ok(if den == 0.0 { None } else { Some(num / den) })
}

/// Closed-form slope of the `λ = 1` eigenvector of `J_{first²·other^(n−2)}`.
pub fn complementary_slope_closed_form(
    params: &MapParams,
    first: Partition,
    n: usize,
) -> Result<Option<f64>> {
    let p = match first {
        Partition::L => *params,
        Partition::R => params.mirrored(),
    };
    let n = n as i32;
    let a3 = recurrence_a(&p, n - 3)?;
    let a4 = recurrence_a(&p, n - 4)?;
    let (dl, dr, tl) = (p.delta_l, p.delta_r, p.tau_l);
    let num = dr * (dl * a3 + tl * (dl * a4 - tl * a3));
    let den = dr * (tl * a3 - dl * a4) + 1.0;
    Ok(if den == 0.0 { None } else { Some(num / den) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigen2, EigenKind};
    use crate::map::{step, Point2};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(dl: f64, dr: f64, tl: f64, tr: f64) -> MapParams {
        MapParams::new(dl, dr, tl, tr).unwrap()
    }

    fn w(s: &str) -> SymbolicSequence {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_forms_agree() {
        assert_eq!(w("LR^4"), w("LRRRR"));
        assert_eq!(w("L2R3"), w("LLRRR"));
        assert_eq!(w("R^4L^3").word(), "RRRRLLL");
        assert_eq!(w("llr").word(), "LLR");
        assert_eq!(w("LRRRR").to_string(), "LR^4");
        assert_eq!(w("LLRRR").to_string(), "L^2R^3");
        assert!("".parse::<SymbolicSequence>().is_err());
        assert!("LXR".parse::<SymbolicSequence>().is_err());
        assert!("L^0".parse::<SymbolicSequence>().is_err());
        assert!("L^65".parse::<SymbolicSequence>().is_err());
        assert!("L^40R^30".parse::<SymbolicSequence>().is_err());
        assert_eq!(w("L^64").len(), 64);
    }

    #[test]
    fn family_constructors() {
        assert_eq!(SymbolicSequence::basic(Partition::L, 5).unwrap(), w("LR^4"));
        assert_eq!(SymbolicSequence::basic(Partition::R, 2).unwrap(), w("RL"));
        assert_eq!(SymbolicSequence::complementary(Partition::R, 5).unwrap(), w("R2L3"));
        assert!(SymbolicSequence::complementary(Partition::L, 2).is_err());
        assert_eq!(w("LLR").mirrored(), w("RRL"));
        assert_eq!(w("LLRRR").rotated(2), w("RRRLL"));
    }

    #[test]
    fn word_enumeration_counts() {
        // 2 + 4 + ... + 64
        assert_eq!(SymbolicSequence::all_words(1, 6).len(), 126);
        assert_eq!(SymbolicSequence::all_words(2, 6).len(), 124);
        let words = SymbolicSequence::all_words(3, 3);
        assert_eq!(words.first().unwrap().word(), "LLL");
        assert_eq!(words.last().unwrap().word(), "RRR");
    }

    #[test]
    fn recurrence_anchors() {
        let q = p(0.9, 0.7, 1.2, -2.0);
        assert_eq!(recurrence_a(&q, -1).unwrap(), 0.0);
        assert_eq!(recurrence_a(&q, 0).unwrap(), 1.0);
        assert_eq!(recurrence_a(&q, 1).unwrap(), -2.0);
        assert_relative_eq!(recurrence_a(&q, 2).unwrap(), 3.3, epsilon = 1e-15);
        assert_eq!(recurrence_b(&q, 0).unwrap(), 1.0);
        assert_eq!(recurrence_b(&q, 1).unwrap(), 1.2);
        assert_eq!(recurrence_b(&q, 7).unwrap(), recurrence_a(&q.mirrored(), 7).unwrap());
        assert!(matches!(recurrence_a(&q, -2), Err(Error::RecurrenceIndex(-2))));
        assert!(matches!(recurrence_a(&q, 65), Err(Error::RecurrenceIndex(65))));
    }

    #[test]
    fn first_letter_acts_first() {
        // Hand-computed J_R·J_L for δ_L=0.9, δ_R=0.7, τ_L=−2, τ_R=1.16.
        let q = p(0.9, 0.7, -2.0, 1.16);
        let m = composite_matrix(&q, &w("LR"));
        let expect = Mat2::new(1.16 * -2.0 - 0.9, 1.16, 0.7 * 2.0, -0.7);
        assert_relative_eq!(m.m11, expect.m11, epsilon = 1e-15);
        assert_relative_eq!(m.m12, expect.m12, epsilon = 1e-15);
        assert_relative_eq!(m.m21, expect.m21, epsilon = 1e-15);
        assert_relative_eq!(m.m22, expect.m22, epsilon = 1e-15);
        // A point in D_L whose image lands in D_R follows the word LR.
        let x0 = Point2::new(-1.5, 0.3);
        let x2 = step(&q, step(&q, x0));
        assert!(step(&q, x0).x >= -1.0);
        assert!(m.apply(x0).dist(x2) < 1e-14);
    }

    #[test]
    fn single_letter_is_branch() {
        let q = p(0.9, 0.7, -2.0, 1.16);
        assert_eq!(composite_matrix(&q, &w("R")), branch_matrix(&q, Partition::R));
    }

    #[test]
    fn basic_word_matches_closed_form() {
        let q = p(0.9, 0.7, -2.0, 1.15045);
        let a = |k| recurrence_a(&q, k).unwrap();
        let (dl, dr, tl) = (q.delta_l, q.delta_r, q.tau_l);
        let m = composite_matrix(&q, &w("LRRRR"));
        assert_relative_eq!(m.m11, tl * a(4) - dl * a(3), max_relative = 1e-13);
        assert_relative_eq!(m.m12, a(4), max_relative = 1e-13);
        assert_relative_eq!(m.m21, dr * (dl * a(2) - tl * a(3)), max_relative = 1e-13);
        assert_relative_eq!(m.m22, -dr * a(3), max_relative = 1e-13);
    }

    #[test]
    fn lr_char_poly_at_one() {
        let q = p(0.9, 0.7, -2.0, -1.615);
        assert!(char_poly_at(&q, &w("LR"), 1.0).abs() < 1e-12);
        let q = p(0.3, -0.4, 1.7, 0.2);
        let expect = 1.0 - 1.7 * 0.2 + 0.3 - 0.4 + 0.3 * -0.4;
        assert_relative_eq!(char_poly_at(&q, &w("LR"), 1.0), expect, epsilon = 1e-14);
        let m = composite_matrix(&q, &w("LLRLR"));
        assert_eq!(char_poly_at(&q, &w("LLRLR"), 0.0), m.det());
    }

    #[test]
    fn unit_eigenvalue_near_divergence_boundary() {
        let q = p(0.9, 0.7, -2.0, 1.15045);
        let e = eigen2(&composite_matrix(&q, &w("LR^4")));
        assert_eq!(e.kind, EigenKind::RealDistinct);
        let closest = (e.lambda1.re - 1.0).abs().min((e.lambda2.re - 1.0).abs());
        assert!(closest < 1e-3, "{e:?}");
    }

    #[test]
    fn slope_at_one_requires_unit_eigenvalue() {
        let q = p(0.9, 0.7, -2.0, 1.1);
        assert!(matches!(
            eigen_slope_at_one(&q, &w("LR^4")),
            Err(Error::Precondition(_))
        ));
    }

    /// Moves τ_R onto `P_σ(1) = 0` by bisection on `[lo, hi]`.
    fn snap_tau_r(q: MapParams, sigma: &SymbolicSequence, lo: f64, hi: f64) -> MapParams {
        let f = |t: f64| char_poly_at(&q.with(crate::map::ParamId::TauR, t), sigma, 1.0);
        let (mut a, mut b) = (lo, hi);
        assert!(f(a) * f(b) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m
            } else {
                a = m
            }
        }
        q.with(crate::map::ParamId::TauR, 0.5 * (a + b))
    }

    #[test]
    fn slope_at_one_matches_closed_forms() {
        let q = snap_tau_r(p(0.9, 0.7, -2.0, 1.15), &w("LR^4"), 1.14, 1.16);
        let k = eigen_slope_at_one(&q, &w("LR^4")).unwrap().finite().unwrap();
        let kc = basic_slope_closed_form(&q, Partition::L, 5, 1.0).unwrap().unwrap();
        assert_relative_eq!(k, kc, max_relative = 1e-9);

        let q = snap_tau_r(p(0.9, 0.7, -2.0, 1.07), &w("L^2R^3"), 1.06, 1.08);
        let k = eigen_slope_at_one(&q, &w("L^2R^3")).unwrap().finite().unwrap();
        let kc = complementary_slope_closed_form(&q, Partition::L, 5).unwrap().unwrap();
        assert_relative_eq!(k, kc, max_relative = 1e-9);
        let m = composite_matrix(&q, &w("L^2R^3"));
        let v = Point2::new(1.0, k);
        assert!(m.apply(v).dist(v) < 1e-9);
    }

    #[test]
    fn closed_form_slope_singular_denominator() {
        // δ_R a_{n−2} + 1 = 0 with n = 3: a_1 = τ_R = −1/δ_R.
        let q = p(0.9, 0.5, 1.0, -2.0);
        assert_eq!(basic_slope_closed_form(&q, Partition::L, 3, 1.0).unwrap(), None);
    }

    fn params() -> impl Strategy<Value = MapParams> {
        (-1.5f64..1.5, -1.5f64..1.5, -3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(a, b, c, d)| MapParams::new(a, b, c, d).unwrap())
    }

    fn word(max: usize) -> impl Strategy<Value = SymbolicSequence> {
        prop::collection::vec(prop::bool::ANY, 1..=max).prop_map(|v| {
            SymbolicSequence::new(
                v.into_iter()
                    .map(|b| if b { Partition::L } else { Partition::R })
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn right_power_entries_follow_recurrence(q in params(), n in 3usize..=20) {
            let m = composite_matrix(&q, &SymbolicSequence::new(vec![Partition::R; n - 1]).unwrap());
            let a = |k: usize| recurrence_a(&q, k as i32).unwrap();
            let scale = 1.0 + m.max_abs();
            prop_assert!((m.m11 - a(n - 1)).abs() <= 1e-12 * scale);
            prop_assert!((m.m12 - a(n - 2)).abs() <= 1e-12 * scale);
            prop_assert!((m.m21 + q.delta_r * a(n - 2)).abs() <= 1e-12 * scale);
            prop_assert!((m.m22 + q.delta_r * a(n - 3)).abs() <= 1e-12 * scale);
        }

        #[test]
        fn determinant_is_multiplicative(q in params(), s in word(12)) {
            let d = composite_matrix(&q, &s).det();
            let expect = q.delta_l.powi(s.count(Partition::L) as i32)
                * q.delta_r.powi(s.count(Partition::R) as i32);
            let scale = 1e-12 * s.len() as f64 * (1.0 + composite_matrix(&q, &s).max_abs().powi(2));
            prop_assert!((d - expect).abs() <= scale, "{} vs {}", d, expect);
        }

        #[test]
        fn char_poly_at_one_is_det_of_shift(q in params(), s in word(12)) {
            let m = composite_matrix(&q, &s);
            let shifted = Mat2::new(1.0 - m.m11, -m.m12, -m.m21, 1.0 - m.m22);
            let scale = 1e-12 * (1.0 + m.max_abs()).powi(2);
            prop_assert!((char_poly_at(&q, &s, 1.0) - shifted.det()).abs() <= scale);
        }

        #[test]
        fn nonzero_char_poly_means_only_trivial_cycle(q in params(), s in word(6)) {
            let m = composite_matrix(&q, &s);
            prop_assume!(s.len() >= 2 && char_poly_at(&q, &s, 1.0).abs() > 1e-6);
            let shifted = Mat2::new(m.m11 - 1.0, m.m12, m.m21, m.m22 - 1.0);
            prop_assert_eq!(shifted.solve(Point2::ORIGIN), Some(Point2::ORIGIN));
        }

        #[test]
        fn eigen_data_is_consistent(q in params(), s in word(8)) {
            let m = composite_matrix(&q, &s);
            let e = eigen2(&m);
            let scale = 1e-9 * (1.0 + m.max_abs()).powi(2);
            prop_assert!(((e.lambda1 + e.lambda2).re - m.trace()).abs() <= scale);
            prop_assert!(((e.lambda1 * e.lambda2).re - m.det()).abs() <= scale);
            prop_assert_eq!(e.slope1.is_some(), e.kind != EigenKind::ComplexConjugate);
        }

        #[test]
        fn cyclic_shift_preserves_char_poly(q in params(), s in word(10), k in 0usize..10) {
            let a = char_poly_at(&q, &s, 1.0);
            let b = char_poly_at(&q, &s.rotated(k), 1.0);
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
