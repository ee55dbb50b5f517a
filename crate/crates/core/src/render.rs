//! Raster images of scan grids and phase portraits.

use std::io::Write;
use std::path::Path;

use crate::classify::{BasinGrid, OrbitKind, Window};
use crate::error::{Error, Result};
use crate::invariant::{CurveStatus, SegmentSet};
use crate::map::{Point2, BORDER_X};
use crate::scan::{Bifurcation1D, CellClass, ScanGrid};

pub type Rgb = [u8; 3];

/// Palette version written next to images by the command line front end.
pub const PALETTE_VERSION: u32 = 1;

pub const O_ONLY: Rgb = [0x20, 0x60, 0xFF];
pub const WQA: Rgb = [0xFF, 0xD7, 0x00];
pub const DIVERGENCE: Rgb = [0x9E, 0x9E, 0x9E];
pub const MIXED: Rgb = [0xC0, 0x80, 0x00];

pub const O_BASIN: Rgb = [0xA8, 0xD0, 0xFF];
/// Basin colours for successive attractors; the first is the dark yellow.
pub const WQA_BASINS: [Rgb; 4] = [
    [0xC8, 0xA0, 0x00],
    [0xE0, 0x70, 0x30],
    [0x90, 0xB0, 0x30],
    [0xB0, 0x60, 0xA0],
];
pub const CLOUD: Rgb = [0x00, 0x00, 0x00];
pub const BORDER_LINE: Rgb = [0xD0, 0x20, 0x20];
pub const CRITICAL_LINE: Rgb = [0x20, 0x80, 0x20];
pub const OVERLAY: Rgb = [0x00, 0x20, 0x80];

pub fn cell_color(c: CellClass) -> Rgb {
    match c {
        CellClass::OOnly => O_ONLY,
        CellClass::Wqa | CellClass::Coexistence => WQA,
        CellClass::DivergenceOnly => DIVERGENCE,
        CellClass::MixedWithDivergence => MIXED,
    }
}

/// RGB raster, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let k = 3 * (y * self.width + x);
        [self.pixels[k], self.pixels[k + 1], self.pixels[k + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        let k = 3 * (y * self.width + x);
        self.pixels[k..k + 3].copy_from_slice(&c);
    }

    fn set_checked(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.set(x as usize, y as usize, c);
        }
    }

    /// Line between pixel positions, clipped to the image.
    pub fn line(&mut self, (x0, y0): (f64, f64), (x1, y1): (f64, f64), c: Rgb) {
        let n = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).clamp(1, 1 << 16);
        for k in 0..=n {
            let u = k as f64 / n as f64;
            let x = x0 + u * (x1 - x0);
            let y = y0 + u * (y1 - y0);
            self.set_checked(x.floor() as i64, y.floor() as i64, c);
        }
    }

    pub fn encode_png(&self, w: impl Write) -> std::result::Result<(), png::EncodingError> {
        let mut enc = png::Encoder::new(w, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&self.pixels)?;
        writer.finish()
    }

    pub fn encode_ppm(&self, mut w: impl Write) -> std::io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)
    }

    /// Writes PNG, or binary PPM when the path ends in `.ppm` or PNG encoding fails.
    pub fn write(&self, path: &Path) -> Result<()> {
        let ppm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
        if !ppm {
            let mut buf = Vec::new();
            if self.encode_png(&mut buf).is_ok() {
                return std::fs::write(path, buf).map_err(|e| Error::io(path, e));
            }
        }
        let mut buf = Vec::new();
        self.encode_ppm(&mut buf).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

/// Maps plane coordinates to pixel coordinates with `y` growing upwards.
#[derive(Debug, Clone, Copy)]
struct Frame {
    window: Window,
    width: usize,
    height: usize,
}

impl Frame {
    fn px(&self, p: Point2) -> (f64, f64) {
        let w = &self.window;
        (
            (p.x - w.x0) / (w.x1 - w.x0) * self.width as f64,
            (w.y1 - p.y) / (w.y1 - w.y0) * self.height as f64,
        )
    }

    /// Clips `a + s·(b − a)`, `s ∈ [s0, s1]`, to a slightly enlarged window.
    fn clip(&self, a: Point2, d: Point2, mut s0: f64, mut s1: f64) -> Option<(Point2, Point2)> {
        let w = &self.window;
        let mx = 0.01 * (w.x1 - w.x0);
        let my = 0.01 * (w.y1 - w.y0);
        for (p, q, lo, hi) in [(a.x, d.x, w.x0 - mx, w.x1 + mx), (a.y, d.y, w.y0 - my, w.y1 + my)] {
            if q == 0.0 {
                if p < lo || p > hi {
                    return None;
                }
                continue;
            }
            let (mut t0, mut t1) = ((lo - p) / q, (hi - p) / q);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            s0 = s0.max(t0);
            s1 = s1.min(t1);
        }
        (s0 <= s1).then(|| (a + d * s0, a + d * s1))
    }

    fn segment(&self, img: &mut Image, a: Point2, d: Point2, s0: f64, s1: f64, c: Rgb) {
        if let Some((p, q)) = self.clip(a, d, s0, s1) {
            img.line(self.px(p), self.px(q), c);
        }
    }
}

/// One pixel per cell, highest `axis2` value in the top row.
pub fn scan_image(grid: &ScanGrid) -> Image {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut img = Image::new(nx, ny, DIVERGENCE);
    for j in 0..ny {
        for i in 0..nx {
            img.set(i, ny - 1 - j, cell_color(grid.cell(i, j).class));
        }
    }
    if let Some(a2) = grid.spec.axis2 {
        let a1 = grid.spec.axis1;
        // Cell centers sit on the sample values, so the frame extends half a step.
        let (h1, h2) = (0.5 * a1.step(), 0.5 * a2.step());
        let frame = Frame {
            window: Window {
                x0: a1.lo - h1,
                x1: a1.hi + h1,
                y0: a2.lo - h2,
                y1: a2.hi + h2,
            },
            width: nx,
            height: ny,
        };
        for curve in &grid.overlays {
            let swapped = curve.sweep_axis != a1.param;
            let to_plane = |sweep: f64, solve: f64| {
                if swapped {
                    Point2::new(solve, sweep)
                } else {
                    Point2::new(sweep, solve)
                }
            };
            for p in &curve.points {
                if matches!(
                    p.status,
                    CurveStatus::AdmissibleUnbounded | CurveStatus::AdmissibleBounded | CurveStatus::NotApplicable
                ) {
                    let (x, y) = frame.px(to_plane(p.sweep, p.solve));
                    img.set_checked(x.floor() as i64, y.floor() as i64, OVERLAY);
                }
            }
        }
    }
    img
}

/// Final-state diagram: one column per sweep value, coordinate upwards.
/// Columns of divergent values are painted with the divergence colour.
pub fn bifurcation_image(b: &Bifurcation1D, height: usize) -> Image {
    let height = height.max(1);
    let width = b.values.len().max(1);
    let mut img = Image::new(width, height, [0xFF; 3]);
    let (lo, hi) = b
        .samples
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, z), &v| (a.min(v), z.max(v)));
    let (lo, hi) = if lo < hi {
        let pad = 0.02 * (hi - lo);
        (lo - pad, hi + pad)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (-1.0, 1.0)
    };
    for (i, s) in b.samples.iter().enumerate() {
        if s.is_empty() {
            for y in 0..height {
                img.set(i, y, DIVERGENCE);
            }
        }
        for &v in s {
            let y = ((hi - v) / (hi - lo) * height as f64).floor() as i64;
            img.set_checked(i as i64, y, CLOUD);
        }
    }
    img
}

/// What to draw on top of the basin colouring.
#[derive(Debug, Clone, Default)]
pub struct PortraitLayers {
    /// Points of the attractor cloud.
    pub cloud: Vec<Point2>,
    pub segment_sets: Vec<SegmentSet>,
    /// Eigen-directions drawn as full lines through the origin.
    pub eigenvectors: Vec<Point2>,
}

/// Basin colouring of `basin` scaled by `scale` pixels per cell, with
/// discontinuity line, critical lines and the given layers.
pub fn phase_portrait(basin: &BasinGrid, layers: &PortraitLayers, scale: usize) -> Image {
    let scale = scale.max(1);
    let (w, h) = (basin.nx * scale, basin.ny * scale);
    let mut img = Image::new(w, h, DIVERGENCE);
    for j in 0..basin.ny {
        for i in 0..basin.nx {
            let c = basin.cell(i, j);
            let col = match c.kind {
                OrbitKind::ConvergedToO => O_BASIN,
                OrbitKind::Diverged => DIVERGENCE,
                OrbitKind::BoundedAperiodic => {
                    WQA_BASINS[c.cluster.unwrap_or(0) as usize % WQA_BASINS.len()]
                }
            };
            let top = (basin.ny - 1 - j) * scale;
            for dy in 0..scale {
                for dx in 0..scale {
                    img.set(i * scale + dx, top + dy, col);
                }
            }
        }
    }
    let frame = Frame {
        window: basin.window,
        width: w,
        height: h,
    };
    let win = basin.window;
    let params = basin.params;
    frame.segment(&mut img, Point2::new(BORDER_X, 0.0), Point2::new(0.0, 1.0), win.y0, win.y1, BORDER_LINE);
    for yc in [params.delta_l, params.delta_r] {
        frame.segment(&mut img, Point2::new(0.0, yc), Point2::new(1.0, 0.0), win.x0, win.x1, CRITICAL_LINE);
    }
    for &v in &layers.eigenvectors {
        frame.segment(&mut img, Point2::ORIGIN, v, f64::NEG_INFINITY, f64::INFINITY, OVERLAY);
    }
    for set in &layers.segment_sets {
        for s in &set.segments {
            frame.segment(&mut img, Point2::ORIGIN, s.dir, s.lo, s.hi, OVERLAY);
        }
    }
    for &p in &layers.cloud {
        let (x, y) = frame.px(p);
        img.set_checked(x.floor() as i64, y.floor() as i64, CLOUD);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{basin_grid, ClassifyOptions};
    use crate::invariant::segment_set_at;
    use crate::map::MapParams;
    use crate::scan::{scan_2d, Axis, ScanSpec, SeedStrategy};
    use crate::map::ParamId;

    #[test]
    fn png_and_ppm_encodings() {
        let mut img = Image::new(3, 2, O_ONLY);
        img.set(2, 1, WQA);
        let mut png_bytes = Vec::new();
        img.encode_png(&mut png_bytes).unwrap();
        assert_eq!(&png_bytes[1..4], b"PNG");
        let dec = png::Decoder::new(std::io::Cursor::new(png_bytes));
        let mut r = dec.read_info().unwrap();
        let mut buf = vec![0; r.output_buffer_size().unwrap()];
        let info = r.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (3, 2));
        assert_eq!(&buf[..info.buffer_size()], &img.pixels[..]);

        let mut ppm = Vec::new();
        img.encode_ppm(&mut ppm).unwrap();
        assert!(ppm.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ppm.len(), 11 + 18);
    }

    #[test]
    fn single_cell_scan_gives_single_pixel() {
        let spec = ScanSpec {
            axis1: Axis::new(ParamId::TauL, -0.1, 0.1, 1).unwrap(),
            axis2: Some(Axis::new(ParamId::TauR, 1.4, 1.6, 1).unwrap()),
            base: MapParams::new(0.9, 0.7, 0.0, 0.0).unwrap(),
            seeds: SeedStrategy::Custom(vec![Point2::new(0.1, 0.1)]),
            opts: ClassifyOptions::with_budget(2_000, 500),
        };
        let g = scan_2d(&spec).unwrap();
        let img = scan_image(&g);
        assert_eq!((img.width, img.height), (1, 1));
        assert_eq!(img.get(0, 0), O_ONLY);
    }

    #[test]
    fn scan_rows_are_flipped() {
        let spec = ScanSpec {
            axis1: Axis::new(ParamId::TauL, 0.0, 0.1, 2).unwrap(),
            axis2: Some(Axis::new(ParamId::TauR, 1.5, 8.0, 2).unwrap()),
            base: MapParams::new(0.9, 0.7, 0.0, 0.0).unwrap(),
            seeds: SeedStrategy::Custom(vec![Point2::new(0.1, 0.1)]),
            opts: ClassifyOptions::with_budget(2_000, 500),
        };
        let g = scan_2d(&spec).unwrap();
        let img = scan_image(&g);
        assert_eq!(img.get(0, 1), O_ONLY);
        assert_eq!(img.get(0, 0), DIVERGENCE);
    }

    #[test]
    fn portrait_draws_lines_and_segments() {
        let params = MapParams::new(0.9, 0.7, -2.0, 1.150452604).unwrap();
        let win = Window::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let basin = basin_grid(&params, &win, (20, 20), &ClassifyOptions::with_budget(2_000, 500)).unwrap();
        let bare = phase_portrait(&basin, &PortraitLayers::default(), 5);
        assert_eq!((bare.width, bare.height), (100, 100));
        // x = -1 sits at one third of the width.
        assert_eq!(bare.get(33, 50), BORDER_LINE);
        let set = segment_set_at(&params, &"LR^4".parse().unwrap()).unwrap();
        let layers = PortraitLayers {
            segment_sets: vec![set],
            ..Default::default()
        };
        let with = phase_portrait(&basin, &layers, 5);
        let n = with.pixels.chunks(3).filter(|c| *c == OVERLAY).count();
        assert!(n > 50, "{n}");
    }

    #[test]
    fn empty_layers_leave_basin_colours_only() {
        let params = MapParams::new(0.5, 0.5, 0.0, 0.0).unwrap();
        let win = Window::new(2.0, 3.0, 2.0, 3.0).unwrap();
        let basin = basin_grid(&params, &win, (4, 4), &ClassifyOptions::with_budget(2_000, 500)).unwrap();
        let img = phase_portrait(&basin, &PortraitLayers::default(), 1);
        assert!(img.pixels.chunks(3).all(|c| c == O_BASIN));
    }
}
