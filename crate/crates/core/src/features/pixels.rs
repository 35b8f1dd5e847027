use crate::scene::{PixelCounts, Raster};
use std::ops::Range;

pub fn color_distribution(r: &Raster) -> PixelCounts {
    r.counts()
}

/// Pixels whose centers fall in `[lo, hi)`, clipped to `0..n`.
fn center_span(lo: f64, hi: f64, n: u32) -> Range<u32> {
    let a = (lo - 0.5).ceil().max(0.0).min(n as f64) as u32;
    let b = (hi - 0.5).ceil().max(0.0).min(n as f64) as u32;
    a..b.max(a)
}

/// Window around the ⅓ intersection along one axis; the ⅔ window is its mirror
/// image so symmetric compositions give symmetric counts.
pub fn third_window(n: u32) -> (Range<u32>, Range<u32>) {
    let side = (n / 6) as f64;
    let center = n as f64 / 3.0;
    let first = center_span(center - side / 2.0, center - side / 2.0 + side, n);
    let first = first.start..first.start + (n / 6).min(n - first.start);
    let second = n - first.end..n - first.start;
    (first, second)
}

/// Class counts in the four windows around the rule-of-thirds intersections,
/// ordered (⅓,⅓), (⅔,⅓), (⅓,⅔), (⅔,⅔) as (x, y).
pub fn two_third_points(r: &Raster) -> [PixelCounts; 4] {
    let (x1, x2) = third_window(r.width());
    let (y1, y2) = third_window(r.height());
    [
        r.region_counts(x1.clone(), y1.clone()),
        r.region_counts(x2.clone(), y1),
        r.region_counts(x1, y2.clone()),
        r.region_counts(x2, y2),
    ]
}

/// Columns of the left and right thirds (by pixel center), mirror images of
/// each other.
pub fn third_columns(w: u32) -> (Range<u32>, Range<u32>) {
    let left = center_span(0.0, w as f64 / 3.0, w);
    let right = w - left.end..w;
    (left, right)
}

pub fn balance(r: &Raster) -> [PixelCounts; 2] {
    let (left, right) = third_columns(r.width());
    [
        r.region_counts(left, 0..r.height()),
        r.region_counts(right, 0..r.height()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rasterize, Canvas, Composition, Geometry, Pixel, ShapeColor, ShapeSpec};

    #[test]
    fn windows_are_disjoint_and_sized() {
        for n in [64u32, 100, 512, 600, 601] {
            let (a, b) = third_window(n);
            assert_eq!(a.len() as u32, n / 6);
            assert_eq!(b.len() as u32, n / 6);
            assert!(a.end <= b.start);
            assert!(a.start > 0 && b.end < n);
        }
        let (a, _) = third_window(600);
        assert_eq!(a, 150..250);
        let (l, r) = third_columns(512);
        assert_eq!((l.clone(), r.clone()), (0..171, 341..512));
    }

    #[test]
    fn empty_windows_are_gray() {
        let r = Raster::filled(600, 600, Pixel::Gray);
        for w in two_third_points(&r) {
            assert_eq!(w, PixelCounts { gray: 10_000, black: 0, white: 0 });
        }
        let full = Raster::filled(600, 600, Pixel::White);
        for w in two_third_points(&full) {
            assert_eq!(w, PixelCounts { gray: 0, black: 0, white: 10_000 });
        }
        for side in balance(&Raster::filled(512, 512, Pixel::Gray)) {
            assert_eq!(side, PixelCounts { gray: 171 * 512, black: 0, white: 0 });
        }
    }

    #[test]
    fn square_on_first_window() {
        let mut c = Composition::empty("t", Canvas { resolution: 600, gray_level: 128 });
        c.shapes.push(ShapeSpec {
            geometry: Geometry::Rectangle { width: 100.0 / 600.0, height: 100.0 / 600.0 },
            color: ShapeColor::Black,
            center: [1.0 / 3.0, 1.0 / 3.0],
            rotation: 0.0,
        });
        let w = two_third_points(&rasterize(&c));
        assert_eq!(w[0], PixelCounts { gray: 0, black: 10_000, white: 0 });
        for other in &w[1..] {
            assert_eq!(other.gray, 10_000);
        }
    }

    #[test]
    fn left_bar_leaves_right_gray() {
        let mut c = Composition::empty("t", Canvas::default());
        c.shapes.push(ShapeSpec {
            geometry: Geometry::Rectangle { width: 0.1, height: 0.8 },
            color: ShapeColor::Black,
            center: [0.15, 0.5],
            rotation: 0.0,
        });
        let [left, right] = balance(&rasterize(&c));
        assert!(left.black > 0);
        assert_eq!(right, PixelCounts { gray: 171 * 512, black: 0, white: 0 });
    }
}
