//! Coarse classification of the trace plane with period-5 boundaries drawn on
//! top; writes `scan_plane.png` and prints a text map.

use wqa::classify::ClassifyOptions;
use wqa::render::scan_image;
use wqa::scan::{overlay_boundaries, scan_2d, Axis, CellClass, ScanSpec, SeedStrategy};
use wqa::{MapParams, ParamId};

fn main() -> wqa::Result<()> {
    let spec = ScanSpec {
        axis1: Axis::new(ParamId::TauL, -3.0, 3.0, 60)?,
        axis2: Some(Axis::new(ParamId::TauR, -3.0, 3.0, 30)?),
        base: MapParams::new(0.9, 0.7, 0.0, 0.0)?,
        seeds: SeedStrategy::Default,
        opts: ClassifyOptions {
            max_iter: 30_000,
            transient: 5_000,
            fingerprint_samples: 10_000,
            ..Default::default()
        },
    };
    let mut grid = scan_2d(&spec)?;
    overlay_boundaries(&mut grid, &["B_LRn1:5".parse()?, "B_L2Rn2:5".parse()?])?;

    // tau_R grows upwards
    for j in (0..grid.ny()).rev() {
        let row: String = (0..grid.nx())
            .map(|i| match grid.cell(i, j).class {
                CellClass::OOnly => '.',
                CellClass::Wqa => 'W',
                CellClass::Coexistence => 'c',
                CellClass::DivergenceOnly => ' ',
                CellClass::MixedWithDivergence => 'm',
            })
            .collect();
        println!("|{row}|");
    }
    scan_image(&grid).write("scan_plane.png".as_ref())
}
