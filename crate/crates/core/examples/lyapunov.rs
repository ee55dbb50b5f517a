//! Largest Lyapunov exponent on a few attractors.
//!
//! The map is piecewise linear and homogeneous, so on an orbit that neither
//! settles at O nor escapes one exponent is zero and the other is the orbit
//! mean of ln|det J|. An orbit spiralling into O has both exponents equal to
//! half that mean.

use wqa::classify::lyapunov_max;
use wqa::map::{side_of_x, step};
use wqa::{MapParams, Point2};

fn mean_log_det(params: &MapParams, mut p: Point2, n: usize) -> f64 {
    let mut s = 0.0;
    for _ in 0..n {
        s += params.determinant(side_of_x(p.x)).abs().ln();
        p = step(params, p);
    }
    s / n as f64
}

fn main() -> wqa::Result<()> {
    let cases = [
        ("WQA beside attracting O", MapParams::new(0.9, 0.7, -2.0, 1.16)?, Point2::new(2.5, -1.0)),
        ("WQA around repelling O", MapParams::new(0.75, 1.2, -0.7, -2.5)?, Point2::new(0.5, 0.5)),
        ("orbit falling into O", MapParams::new(0.9, 0.7, 0.0, 0.5)?, Point2::new(0.3, 0.2)),
    ];
    for (name, params, p0) in cases {
        let l = lyapunov_max(&params, p0, 1_000_000, 10_000)?;
        println!("{name:<24} lambda_max = {l:+.5}  mean ln|det| = {:+.5}", mean_log_det(&params, p0, 1_000_000));
    }
    Ok(())
}
