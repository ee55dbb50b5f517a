//! 2×2 real matrices and their eigen-structure.

use std::ops::{Mul, Sub};

use num_complex::Complex64;

use crate::map::Point2;

/// Discriminants closer to zero than this are treated as a double eigenvalue.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.m11 * p.x + self.m12 * p.y,
            self.m21 * p.x + self.m22 * p.y,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }

    /// Value of the characteristic polynomial `λ² − tr·λ + det` at `lambda`.
    pub fn char_poly(&self, lambda: f64) -> f64 {
        lambda * lambda - self.trace() * lambda + self.det()
    }

    pub fn discriminant(&self) -> f64 {
        let t = self.trace();
        t * t - 4.0 * self.det()
    }

    /// Solves `M v = b` by Cramer's rule; `None` when `M` is singular.
    pub fn solve(&self, b: Point2) -> Option<Point2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Point2::new(
            (b.x * self.m22 - self.m12 * b.y) / det,
            (self.m11 * b.y - self.m21 * b.x) / det,
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    /// Direction of an eigenvector for the real eigenvalue `lambda`.
    ///
    /// Of the two row-derived candidates `(m12, λ − m11)` and `(λ − m22, m21)`
    /// the longer one is used, which keeps the result well conditioned when
    /// either off-diagonal entry is small. Returns `None` for `λI − M = 0`.
    pub fn eigenvector(&self, lambda: f64) -> Option<Point2> {
        let a = Point2::new(self.m12, lambda - self.m11);
        let b = Point2::new(lambda - self.m22, self.m21);
        let v = if a.norm() >= b.norm() { a } else { b };
        if v.norm() == 0.0 {
            None
        } else {
            Some(v)
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22)
    }
}

/// Slope of a line through the origin; vertical lines are tagged explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Finite(f64),
    Infinite,
}

impl Slope {
    /// Slope of the line spanned by `v`. Directions with a negligible
    /// abscissa relative to their length are reported as vertical.
    pub fn of_direction(v: Point2) -> Slope {
        if v.x.abs() <= 1e-14 * v.norm() {
            Slope::Infinite
        } else {
            Slope::Finite(v.y / v.x)
        }
    }

    /// Unit-abscissa direction `(1, k)`, or `(0, 1)` for a vertical line.
    pub fn direction(&self) -> Point2 {
        match *self {
            Slope::Finite(k) => Point2::new(1.0, k),
            Slope::Infinite => Point2::new(0.0, 1.0),
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Slope::Finite(k) => Some(k),
            Slope::Infinite => None,
        }
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slope::Finite(k) => write!(f, "{k}"),
            Slope::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    RealDistinct,
    RealDouble,
    ComplexConjugate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub kind: EigenKind,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub slope1: Option<Slope>,
    pub slope2: Option<Slope>,
}

impl EigenData {
    pub fn spectral_radius(&self) -> f64 {
        self.lambda1.norm().max(self.lambda2.norm())
    }
}

/// Eigenvalues and eigenvector slopes of `m`.
///
/// Real eigenvalues are ordered `λ₁ ≥ λ₂`; complex pairs put the positive
/// imaginary part first. For a scalar matrix every direction is an
/// eigenvector and the horizontal slope is reported.
pub fn eigen2(m: &Mat2) -> EigenData {
    let tr = m.trace();
    let disc = m.discriminant();
    let slope_for = |lambda: f64| {
        Some(
            m.eigenvector(lambda)
                .map(Slope::of_direction)
                .unwrap_or(Slope::Finite(0.0)),
        )
    };
    if disc.abs() <= DISCRIMINANT_TOL {
        let l = 0.5 * tr;
        EigenData {
            kind: EigenKind::RealDouble,
            lambda1: Complex64::new(l, 0.0),
            lambda2: Complex64::new(l, 0.0),
            slope1: slope_for(l),
            slope2: None,
        }
    } else if disc > 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = 0.5 * (tr + s.copysign(tr));
        let small = m.det() / big;
        let (l1, l2) = if big >= small {
            (big, small)
        } else {
            (small, big)
        };
        EigenData {
            kind: EigenKind::RealDistinct,
            lambda1: Complex64::new(l1, 0.0),
            lambda2: Complex64::new(l2, 0.0),
            slope1: slope_for(l1),
            slope2: slope_for(l2),
        }
    } else {
        let im = 0.5 * (-disc).sqrt();
        EigenData {
            kind: EigenKind::ComplexConjugate,
            lambda1: Complex64::new(0.5 * tr, im),
            lambda2: Complex64::new(0.5 * tr, -im),
            slope1: None,
            slope2: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_is_double() {
        let e = eigen2(&Mat2::IDENTITY);
        assert_eq!(e.kind, EigenKind::RealDouble);
        assert_eq!(e.lambda1.re, 1.0);
        assert_eq!(e.lambda2.re, 1.0);
        assert!(e.slope1.is_some() && e.slope2.is_none());
    }

    #[test]
    fn right_branch_focus_modulus() {
        // tau^2 - 4 delta = 1.3456 - 2.8 < 0, modulus sqrt(det)
        let m = Mat2::new(1.16, 1.0, -0.7, 0.0);
        let e = eigen2(&m);
        assert_eq!(e.kind, EigenKind::ComplexConjugate);
        assert_relative_eq!(e.lambda1.norm(), 0.7f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(e.lambda2.norm(), 0.7f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn real_roots_ordered_and_accurate() {
        for &(tr, det) in &[(3.0, 2.0), (-3.0, 2.0), (0.0, -1.0), (1e8, 1.0), (-2.5, -0.3)] {
            let m = Mat2::new(tr, 1.0, -det, 0.0);
            let e = eigen2(&m);
            assert_eq!(e.kind, EigenKind::RealDistinct);
            assert!(e.lambda1.re >= e.lambda2.re);
            assert_relative_eq!(e.lambda1.re + e.lambda2.re, tr, max_relative = 1e-12);
            assert_relative_eq!(e.lambda1.re * e.lambda2.re, det, max_relative = 1e-12);
            for (l, s) in [(e.lambda1.re, e.slope1), (e.lambda2.re, e.slope2)] {
                let v = s.unwrap().direction();
                let r = m.apply(v) - v * l;
                assert!(r.norm() <= 1e-9 * (1.0 + l.abs()) * v.norm(), "{r:?}");
            }
        }
    }

    #[test]
    fn vertical_eigenvector_is_tagged() {
        // (0, 1) is an eigenvector with eigenvalue 2.
        let m = Mat2::new(3.0, 0.0, 5.0, 2.0);
        let e = eigen2(&m);
        assert_eq!(e.slope2, Some(Slope::Infinite));
        assert_eq!(e.lambda2.re, 2.0);
    }

    #[test]
    fn solve_and_singular() {
        let m = Mat2::new(2.0, 1.0, 1.0, 3.0);
        let x = m.solve(Point2::new(1.0, 2.0)).unwrap();
        assert_relative_eq!(m.apply(x).x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.apply(x).y, 2.0, epsilon = 1e-15);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).solve(Point2::new(1.0, 0.0)).is_none());
    }
}
