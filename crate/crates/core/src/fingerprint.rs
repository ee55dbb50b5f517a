//! Occupancy fingerprints of bounded attractors and their comparison.
//!
//! Each fingerprint rasterises an orbit tail onto a 256×256 bit grid whose
//! cells are power-of-two sized and aligned to a global lattice, so two
//! fingerprints can be compared cell for cell after coarsening the finer one.

use crate::map::Point2;

/// Cells per axis.
pub const GRID: usize = 256;
const WORDS: usize = GRID / 64;

/// Jaccard index at or above which two fingerprints belong to one attractor.
pub const SAME_ATTRACTOR_JACCARD: f64 = 0.2;

type Row = [u64; WORDS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BBox {
    pub const EMPTY: BBox = BBox {
        x0: f64::INFINITY,
        x1: f64::NEG_INFINITY,
        y0: f64::INFINITY,
        y1: f64::NEG_INFINITY,
    };

    #[inline]
    pub fn add(&mut self, p: Point2) {
        self.x0 = self.x0.min(p.x);
        self.x1 = self.x1.max(p.x);
        self.y0 = self.y0.min(p.y);
        self.y1 = self.y1.max(p.y);
    }

    pub fn is_empty(&self) -> bool {
        !(self.x0 <= self.x1 && self.y0 <= self.y1)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// One axis of the lattice: cell size `2^exp`, first cell index `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Axis {
    exp: i32,
    origin: i64,
}

impl Axis {
    /// Smallest power-of-two cell that fits `[lo, hi]` plus a 5% margin on
    /// each side into `GRID` cells.
    fn fit(lo: f64, hi: f64) -> Axis {
        let w = (hi - lo).max(1e-12 * (1.0 + lo.abs().max(hi.abs())));
        let exp = (1.1 * w / (GRID - 1) as f64).log2().ceil() as i32;
        let u = (exp as f64).exp2();
        let origin = ((lo - 0.05 * w) / u).floor() as i64;
        Axis { exp, origin }
    }

    #[inline]
    fn cell(&self, v: f64) -> Option<usize> {
        let c = (v * (-self.exp as f64).exp2()).floor() as i64 - self.origin;
        (0..GRID as i64).contains(&c).then_some(c as usize)
    }

    fn center(&self, c: usize) -> f64 {
        (self.origin as f64 + c as f64 + 0.5) * (self.exp as f64).exp2()
    }
}

/// Occupancy bitset on the lattice; row index is the y cell.
#[derive(Clone, PartialEq, Eq)]
pub struct Occupancy {
    ax: Axis,
    ay: Axis,
    rows: Box<[Row; GRID]>,
}

impl std::fmt::Debug for Occupancy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Occupancy")
            .field("ax", &self.ax)
            .field("ay", &self.ay)
            .field("count", &self.count())
            .finish()
    }
}

impl Occupancy {
    pub fn for_bbox(b: &BBox) -> Occupancy {
        Occupancy {
            ax: Axis::fit(b.x0, b.x1),
            ay: Axis::fit(b.y0, b.y1),
            rows: Box::new([[0; WORDS]; GRID]),
        }
    }

    /// Marks the cell holding `p`; points outside the grid are ignored.
    #[inline]
    pub fn mark(&mut self, p: Point2) -> bool {
        match (self.ax.cell(p.x), self.ay.cell(p.y)) {
            (Some(i), Some(j)) => {
                self.rows[j][i / 64] |= 1 << (i % 64);
                true
            }
            _ => false,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match (self.ax.cell(p.x), self.ay.cell(p.y)) {
            (Some(i), Some(j)) => self.get(i, j),
            _ => false,
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[j][i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Centers of all occupied cells.
    pub fn cell_centers(&self) -> Vec<Point2> {
        let mut out = Vec::new();
        for j in 0..GRID {
            for i in 0..GRID {
                if self.get(i, j) {
                    out.push(Point2::new(self.ax.center(i), self.ay.center(j)));
                }
            }
        }
        out
    }

    /// An empty grid on the same lattice window.
    pub fn blank_like(&self) -> Occupancy {
        Occupancy {
            ax: self.ax,
            ay: self.ay,
            rows: Box::new([[0; WORDS]; GRID]),
        }
    }

    /// Merges cells by `2^kx × 2^ky` blocks.
    fn coarsen(&self, kx: u32, ky: u32) -> Occupancy {
        if kx == 0 && ky == 0 {
            return self.clone();
        }
        let (fx, fy) = (1i64 << kx.min(62), 1i64 << ky.min(62));
        let ax = Axis {
            exp: self.ax.exp + kx as i32,
            origin: self.ax.origin.div_euclid(fx),
        };
        let ay = Axis {
            exp: self.ay.exp + ky as i32,
            origin: self.ay.origin.div_euclid(fy),
        };
        let mut out = Occupancy {
            ax,
            ay,
            rows: Box::new([[0; WORDS]; GRID]),
        };
        for j in 0..GRID {
            let nj = ((self.ay.origin + j as i64).div_euclid(fy) - ay.origin) as usize;
            for i in 0..GRID {
                if self.get(i, j) {
                    let ni = ((self.ax.origin + i as i64).div_euclid(fx) - ax.origin) as usize;
                    out.rows[nj][ni / 64] |= 1 << (ni % 64);
                }
            }
        }
        out
    }

    /// Row `j` shifted so that bit `i` holds cell `i + shift` of the original.
    fn shifted_row(&self, j: usize, shift: i64) -> Row {
        let r = &self.rows[j];
        let mut out = [0u64; WORDS];
        if shift.unsigned_abs() >= GRID as u64 {
            return out;
        }
        let (word, bit) = (shift.div_euclid(64), shift.rem_euclid(64) as u32);
        for (k, o) in out.iter_mut().enumerate() {
            let src = k as i64 + word;
            let lo = if (0..WORDS as i64).contains(&src) {
                r[src as usize]
            } else {
                0
            };
            let hi = if (0..WORDS as i64).contains(&(src + 1)) {
                r[(src + 1) as usize]
            } else {
                0
            };
            *o = if bit == 0 {
                lo
            } else {
                (lo >> bit) | (hi << (64 - bit))
            };
        }
        out
    }

    /// Jaccard index of the two occupied sets on a common lattice.
    pub fn jaccard(&self, other: &Occupancy) -> f64 {
        let ex = self.ax.exp.max(other.ax.exp);
        let ey = self.ay.exp.max(other.ay.exp);
        let a = self.coarsen((ex - self.ax.exp) as u32, (ey - self.ay.exp) as u32);
        let b = other.coarsen((ex - other.ax.exp) as u32, (ey - other.ay.exp) as u32);
        let (na, nb) = (a.count(), b.count());
        if na + nb == 0 {
            return 1.0;
        }
        let dx = a.ax.origin - b.ax.origin;
        let dy = a.ay.origin - b.ay.origin;
        let mut inter = 0usize;
        for j in 0..GRID {
            let jb = j as i64 + dy;
            if !(0..GRID as i64).contains(&jb) {
                continue;
            }
            let rb = b.shifted_row(jb as usize, dx);
            inter += a.rows[j]
                .iter()
                .zip(&rb)
                .map(|(x, y)| (x & y).count_ones() as usize)
                .sum::<usize>();
        }
        inter as f64 / (na + nb - inter) as f64
    }
}

/// Shape summary of a bounded orbit tail.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorFingerprint {
    pub bbox: BBox,
    pub samples: usize,
    pub occupancy: Occupancy,
}

impl AttractorFingerprint {
    /// Builds a fingerprint from points already known to lie in `bbox`.
    pub fn from_points(bbox: BBox, points: impl IntoIterator<Item = Point2>) -> Self {
        let mut occupancy = Occupancy::for_bbox(&bbox);
        let mut samples = 0;
        for p in points {
            occupancy.mark(p);
            samples += 1;
        }
        AttractorFingerprint {
            bbox,
            samples,
            occupancy,
        }
    }

    pub fn jaccard(&self, other: &AttractorFingerprint) -> f64 {
        self.occupancy.jaccard(&other.occupancy)
    }
}

/// Leader clustering in arrival order: each fingerprint joins the most
/// similar existing leader if that similarity reaches
/// [`SAME_ATTRACTOR_JACCARD`], otherwise it founds a new cluster.
#[derive(Debug, Clone, Default)]
pub struct AttractorClusters {
    pub leaders: Vec<AttractorFingerprint>,
    pub sizes: Vec<usize>,
}

impl AttractorClusters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, fp: &AttractorFingerprint) -> usize {
        let best = self
            .leaders
            .iter()
            .enumerate()
            .map(|(i, l)| (i, l.jaccard(fp)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, s)) if s >= SAME_ATTRACTOR_JACCARD => {
                self.sizes[i] += 1;
                i
            }
            _ => {
                self.leaders.push(fp.clone());
                self.sizes.push(1);
                self.leaders.len() - 1
            }
        }
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(cx: f64, cy: f64, r: f64, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|k| {
                let a = k as f64 * 0.7548776662466927 * std::f64::consts::TAU;
                Point2::new(cx + r * a.cos(), cy + r * a.sin())
            })
            .collect()
    }

    fn fp(points: &[Point2]) -> AttractorFingerprint {
        let mut b = BBox::EMPTY;
        points.iter().for_each(|&p| b.add(p));
        AttractorFingerprint::from_points(b, points.iter().copied())
    }

    #[test]
    fn lattice_window_covers_bbox() {
        for (lo, hi) in [(-2.06, 6.09), (0.0, 1e-9), (-1e5, 3.0), (5.0, 5.0)] {
            let a = Axis::fit(lo, hi);
            assert!(a.cell(lo).is_some() && a.cell(hi).is_some(), "{lo} {hi} {a:?}");
        }
    }

    #[test]
    fn every_point_lands_in_grid() {
        let pts = circle(1.0, -2.0, 3.0, 5000);
        let mut b = BBox::EMPTY;
        pts.iter().for_each(|&p| b.add(p));
        let mut o = Occupancy::for_bbox(&b);
        assert!(pts.iter().all(|&p| o.mark(p)));
        assert!(pts.iter().all(|&p| o.contains(p)));
    }

    #[test]
    fn identical_sets_have_unit_similarity() {
        let a = fp(&circle(0.0, 0.0, 2.0, 20_000));
        assert_eq!(a.jaccard(&a.clone()), 1.0);
    }

    #[test]
    fn subsample_of_same_set_is_similar() {
        let all = circle(0.0, 0.0, 2.0, 40_000);
        let a = fp(&all[..20_000]);
        let b = fp(&all[20_000..]);
        assert!(a.jaccard(&b) > 0.5, "{}", a.jaccard(&b));
    }

    #[test]
    fn different_scales_compare_after_coarsening() {
        let all = circle(0.0, 0.0, 2.0, 40_000);
        let a = fp(&all);
        // Same curve, window doubled by an outlier.
        let mut more = all.clone();
        more.push(Point2::new(6.0, 0.0));
        let b = fp(&more);
        assert_ne!(a.occupancy.ax.exp, b.occupancy.ax.exp);
        assert!(a.jaccard(&b) > 0.5, "{}", a.jaccard(&b));
        assert_eq!(a.jaccard(&b), b.jaccard(&a));
    }

    #[test]
    fn disjoint_sets_separate() {
        let a = fp(&circle(0.0, 0.0, 1.0, 20_000));
        let b = fp(&circle(10.0, 3.0, 1.0, 20_000));
        assert_eq!(a.jaccard(&b), 0.0);
        let c = fp(&circle(0.0, 0.0, 1.3, 20_000));
        assert!(a.jaccard(&c) < SAME_ATTRACTOR_JACCARD);
    }

    #[test]
    fn clustering_in_order() {
        let a = fp(&circle(0.0, 0.0, 1.0, 20_000));
        let a2 = fp(&circle(0.0, 0.0, 1.0, 15_000));
        let b = fp(&circle(10.0, 3.0, 1.0, 20_000));
        let mut c = AttractorClusters::new();
        assert_eq!(c.assign(&a), 0);
        assert_eq!(c.assign(&b), 1);
        assert_eq!(c.assign(&a2), 0);
        assert_eq!(c.sizes, vec![2, 1]);
    }

    #[test]
    fn shifted_rows() {
        let mut o = Occupancy::for_bbox(&BBox {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        });
        o.rows[3] = [1 | 1 << 63, 1, 0, 1 << 63];
        let s = o.shifted_row(3, 1);
        assert_eq!(s, [1 << 62 | 1 << 63, 0, 0, 1 << 62]);
        let s = o.shifted_row(3, -1);
        assert_eq!(s, [2, 3, 0, 0]);
        assert_eq!(o.shifted_row(3, 64), [1, 0, 1 << 63, 0]);
        assert_eq!(o.shifted_row(3, 300), [0; 4]);
    }
}
