//! Phase portrait on a boundary curve: basins, the attractor cloud and the
//! halflines of nonhyperbolic LR^4 cycles. Writes `phase_portrait.png`.

use wqa::classify::{basin_grid, ClassifyOptions, Window};
use wqa::invariant::{segment_set_at, snap_to_curve};
use wqa::map::step;
use wqa::render::{phase_portrait, PortraitLayers};
use wqa::{MapParams, ParamId, Point2, SymbolicSequence};

fn main() -> wqa::Result<()> {
    let sigma: SymbolicSequence = "LR^4".parse()?;
    let near = MapParams::new(0.9, 0.7, -2.0, 1.16)?;
    let window = Window::new(-8.0, 6.0, -6.0, 8.0)?;

    let mut layers = PortraitLayers::default();
    let mut p = Point2::new(2.5, -1.0);
    for n in 0..30_000 {
        p = step(&near, p);
        if n >= 2_000 {
            layers.cloud.push(p);
        }
    }
    let on_curve = snap_to_curve(&near, &sigma, ParamId::TauR, 1.15, 1e-2)?;
    layers.segment_sets.push(segment_set_at(&on_curve, &sigma)?);
    println!("curve point {on_curve}; attractor drawn at {near}");

    let grid = basin_grid(&near, &window, (120, 120), &ClassifyOptions::with_budget(10_000, 1_000))?;
    phase_portrait(&grid, &layers, 3).write("phase_portrait.png".as_ref())
}
