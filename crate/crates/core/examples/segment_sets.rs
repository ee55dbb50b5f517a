//! Segment sets of nonhyperbolic cycles on a boundary curve, checked by
//! iterating sample points once around the cycle.

use wqa::invariant::{segment_set_at, snap_to_curve};
use wqa::map::step;
use wqa::{MapParams, ParamId, SymbolicSequence};

fn show(params: MapParams, word: &str, axis: ParamId) -> wqa::Result<()> {
    let sigma: SymbolicSequence = word.parse()?;
    let at = snap_to_curve(&params, &sigma, axis, params.get(axis), 1e-2)?;
    let set = segment_set_at(&at, &sigma)?;
    println!("{sigma} at {at}: {}", if set.is_bounded() { "bounded segments" } else { "halflines" });
    for s in &set.segments {
        println!("  {}  t in ({:.4}, {:.4})  slope {}", s.side.letter(), s.lo, s.hi, s.slope);
    }
    let mut worst: f64 = 0.0;
    for x0 in set.sample_first(50) {
        let x = (0..sigma.len()).fold(x0, |x, _| step(&at, x));
        worst = worst.max(x.dist(x0) / x0.norm());
    }
    println!("  worst relative return error {worst:.1e}");
    Ok(())
}

fn main() -> wqa::Result<()> {
    show(MapParams::new(0.9, 0.7, -2.0, 1.15)?, "LR^4", ParamId::TauR)?;
    show(MapParams::new(0.9, 0.7, -1.125, 1.04)?, "LR^4", ParamId::TauR)?;
    show(MapParams::new(0.9, 0.7, 1.16, -2.2)?, "R^4L^3", ParamId::TauR)?;
    Ok(())
}
