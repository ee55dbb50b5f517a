//! Final-state diagram along tau_L; writes `bifurcation.png` and prints the
//! y-range of the attractor at a few parameter values.

use wqa::classify::ClassifyOptions;
use wqa::render::bifurcation_image;
use wqa::scan::{scan_1d, Axis, Projection, Scan1dOptions, ScanSpec, SeedStrategy};
use wqa::{MapParams, ParamId};

fn main() -> wqa::Result<()> {
    let spec = ScanSpec {
        axis1: Axis::new(ParamId::TauL, 1.3, 1.45, 300)?,
        axis2: None,
        base: MapParams::new(0.9, 0.7, 0.0, -2.0)?,
        seeds: SeedStrategy::Default,
        opts: ClassifyOptions::with_budget(30_000, 5_000),
    };
    let o1 = Scan1dOptions {
        projection: Projection::Y,
        ..Default::default()
    };
    let b = scan_1d(&spec, &o1)?;
    for k in (0..b.values.len()).step_by(30) {
        let s = &b.samples[k];
        let range = match s.iter().copied().reduce(f64::min) {
            Some(lo) => format!("y in [{lo:.3}, {:.3}]", s.iter().copied().fold(lo, f64::max)),
            None => "-".into(),
        };
        println!("tau_L = {:.4}  {:<16} {range}", b.values[k], b.classes[k].as_str());
    }
    bifurcation_image(&b, 400).write("bifurcation.png".as_ref())
}
