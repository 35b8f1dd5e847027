use crate::scene::{footprint, Composition, Raster, ShapeColor, ShapeKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCounts {
    pub total: usize,
    pub triangles: usize,
    pub circles: usize,
    pub rectangles: usize,
    pub indeterminable: usize,
    pub black: usize,
    pub white: usize,
}

impl ShapeCounts {
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.total,
            self.triangles,
            self.circles,
            self.rectangles,
            self.indeterminable,
            self.black,
            self.white,
        ]
        .map(|v| v as f64)
    }
}

const NONE: u32 = u32::MAX;

/// Labels 4-connected components of non-gray pixels. Gray pixels get `u32::MAX`.
pub fn label_components(r: &Raster) -> (Vec<u32>, usize) {
    let (w, h) = (r.width() as usize, r.height() as usize);
    let px = r.pixels();
    let mut labels = vec![NONE; px.len()];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..px.len() {
        if labels[start] != NONE || !px[start].is_shape() {
            continue;
        }
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if labels[j] == NONE && px[j].is_shape() {
                    labels[j] = next;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        next += 1;
    }
    (labels, next as usize)
}

pub fn shape_counts(c: &Composition, r: &Raster) -> ShapeCounts {
    let footprints: Vec<Vec<u32>> = c
        .shapes
        .iter()
        .map(|s| footprint(s, c.canvas.resolution))
        .collect();
    shape_counts_with(c, r, &footprints)
}

/// A raster component touched by the footprints of two or more shapes is one
/// indeterminable shape; its members drop out of the per-kind counts.
pub(crate) fn shape_counts_with(c: &Composition, r: &Raster, footprints: &[Vec<u32>]) -> ShapeCounts {
    let mut counts = ShapeCounts {
        total: c.shapes.len(),
        black: c.count_color(ShapeColor::Black),
        white: c.count_color(ShapeColor::White),
        ..ShapeCounts::default()
    };
    let (labels, n_components) = label_components(r);

    // components each shape touches, and how many shapes touch each component
    let mut touched_by: Vec<Vec<usize>> = vec![Vec::new(); n_components];
    let mut shape_components: Vec<Vec<u32>> = Vec::with_capacity(footprints.len());
    for (si, fp) in footprints.iter().enumerate() {
        let mut comps: Vec<u32> = fp
            .iter()
            .map(|&i| labels[i as usize])
            .filter(|&l| l != NONE)
            .collect();
        comps.sort_unstable();
        comps.dedup();
        for &l in &comps {
            touched_by[l as usize].push(si);
        }
        shape_components.push(comps);
    }

    counts.indeterminable = touched_by.iter().filter(|s| s.len() >= 2).count();
    for (shape, comps) in c.shapes.iter().zip(&shape_components) {
        let clean = !comps.is_empty() && comps.iter().all(|&l| touched_by[l as usize].len() == 1);
        if clean {
            match shape.kind() {
                ShapeKind::Triangle => counts.triangles += 1,
                ShapeKind::Circle => counts.circles += 1,
                ShapeKind::Rectangle => counts.rectangles += 1,
            }
        }
    }
    counts
}

/// Black/white shape ratio with the larger count as denominator; zero when
/// either count is zero.
pub fn bw_ratio(c: &Composition) -> f64 {
    let b = c.count_color(ShapeColor::Black);
    let w = c.count_color(ShapeColor::White);
    if b == 0 || w == 0 {
        0.0
    } else {
        b.min(w) as f64 / b.max(w) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rasterize, Canvas, Geometry, ShapeSpec};

    fn shape(geometry: Geometry, color: ShapeColor, center: [f64; 2]) -> ShapeSpec {
        ShapeSpec { geometry, color, center, rotation: 0.0 }
    }

    fn comp(shapes: Vec<ShapeSpec>) -> Composition {
        Composition { shapes, ..Composition::empty("t", Canvas::default()) }
    }

    #[test]
    fn disjoint_shapes_are_all_determinable() {
        let c = comp(vec![
            shape(Geometry::Circle { radius: 0.08 }, ShapeColor::Black, [0.2, 0.2]),
            shape(Geometry::Circle { radius: 0.08 }, ShapeColor::Black, [0.8, 0.2]),
            shape(Geometry::Triangle { circumradius: 0.1 }, ShapeColor::White, [0.5, 0.7]),
        ]);
        let counts = shape_counts(&c, &rasterize(&c));
        assert_eq!(
            counts,
            ShapeCounts { total: 3, triangles: 1, circles: 2, rectangles: 0, indeterminable: 0, black: 2, white: 1 }
        );
    }

    #[test]
    fn empty_counts_are_zero() {
        let c = comp(vec![]);
        assert_eq!(shape_counts(&c, &rasterize(&c)), ShapeCounts::default());
    }

    #[test]
    fn overlapping_rectangles_merge() {
        let r = Geometry::Rectangle { width: 0.3, height: 0.2 };
        let c = comp(vec![
            shape(r, ShapeColor::Black, [0.4, 0.5]),
            shape(r, ShapeColor::Black, [0.55, 0.5]),
        ]);
        let counts = shape_counts(&c, &rasterize(&c));
        assert_eq!((counts.rectangles, counts.indeterminable, counts.total), (0, 1, 2));
    }

    #[test]
    fn fully_occluded_shape_is_indeterminable() {
        let c = comp(vec![
            shape(Geometry::Circle { radius: 0.05 }, ShapeColor::White, [0.5, 0.5]),
            shape(Geometry::Circle { radius: 0.2 }, ShapeColor::Black, [0.5, 0.5]),
        ]);
        let counts = shape_counts(&c, &rasterize(&c));
        assert_eq!((counts.circles, counts.indeterminable), (0, 1));
    }

    #[test]
    fn bw_ratio_rules() {
        let mk = |b: usize, w: usize| {
            let mut shapes = vec![shape(Geometry::Circle { radius: 0.01 }, ShapeColor::Black, [0.1, 0.1]); b];
            shapes.extend(vec![shape(Geometry::Circle { radius: 0.01 }, ShapeColor::White, [0.1, 0.1]); w]);
            comp(shapes)
        };
        assert_eq!(bw_ratio(&mk(2, 4)), 0.5);
        assert_eq!(bw_ratio(&mk(4, 2)), 0.5);
        assert_eq!(bw_ratio(&mk(0, 5)), 0.0);
        assert_eq!(bw_ratio(&mk(3, 3)), 1.0);
    }
}
