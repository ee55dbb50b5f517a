//! Basin grid with two coexisting quasiattractors; writes `basin.png`.

use wqa::classify::{basin_grid, ClassifyOptions, OrbitKind, Window};
use wqa::render::{phase_portrait, PortraitLayers};
use wqa::MapParams;

fn main() -> wqa::Result<()> {
    let params = MapParams::new(0.9, 0.7, 1.38975, -2.0)?;
    let window = Window::new(-14.0, 6.0, -4.0, 13.0)?;
    let opts = ClassifyOptions {
        max_iter: 30_000,
        transient: 5_000,
        fingerprint_samples: 50_000,
        ..Default::default()
    };
    let grid = basin_grid(&params, &window, (120, 120), &opts)?;
    for k in [OrbitKind::ConvergedToO, OrbitKind::Diverged, OrbitKind::BoundedAperiodic] {
        println!("{k:<18} {}", grid.count(k));
    }
    println!("attractors         {}", grid.attractor_count());
    for (k, n) in grid.clusters.sizes.iter().enumerate() {
        println!("  #{k}: {n} cells");
    }
    phase_portrait(&grid, &PortraitLayers::default(), 3).write("basin.png".as_ref())
}
