//! Bracketing root search for scalar functions on an interval.

/// Minimum number of bisection halvings per bracket.
pub const MIN_BISECTIONS: usize = 60;

/// Residual magnitude at which a bisection stops early.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Bisects `f` on `[a, b]`, which must bracket a sign change.
///
/// Runs at least [`MIN_BISECTIONS`] halvings and keeps going until
/// `|f| < RESIDUAL_TOL` or the bracket can no longer shrink.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for i in 0.. {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm.abs() < best.1.abs() {
            best = (m, fm);
        }
        if fm == 0.0 {
            return m;
        }
        if i >= MIN_BISECTIONS && fm.abs() < RESIDUAL_TOL {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if i > 2000 {
            break;
        }
    }
    best.0
}

/// All sign-change roots of `f` on `[lo, hi]` found by scanning `brackets`
/// equal subintervals and bisecting each one that changes sign.
///
/// Non-finite samples break brackets. Roots come back in increasing order.
pub fn bracket_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, brackets: usize) -> Vec<f64> {
    let n = brackets.max(1);
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f0.is_finite() && f1.is_finite() {
            if f0 == 0.0 {
                out.push(x0);
            } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
                out.push(bisect(&f, x0, x1));
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        out.push(x0);
    }
    out
}
