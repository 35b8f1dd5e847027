use super::stats::{summarize, StatSummary};
use crate::scene::Composition;
use serde::{Deserialize, Serialize};

/// Summaries of per-shape bounding circles and axis-aligned bounding boxes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundingStats {
    pub radius: StatSummary,
    pub width: StatSummary,
    pub height: StatSummary,
    pub aspect: StatSummary,
    pub area: StatSummary,
}

impl BoundingStats {
    pub const PARTS: [&'static str; 5] = ["radius", "width", "height", "aspect", "area"];

    pub fn as_array(&self) -> [StatSummary; 5] {
        [self.radius, self.width, self.height, self.aspect, self.area]
    }
}

pub fn bounding_stats(c: &Composition) -> BoundingStats {
    let n = c.shapes.len();
    let (mut radii, mut widths, mut heights, mut aspects, mut areas) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for s in &c.shapes {
        let (w, h) = s.aabb_size();
        radii.push(s.enclosing_radius());
        widths.push(w);
        heights.push(h);
        aspects.push(w / h);
        areas.push(w * h);
    }
    BoundingStats {
        radius: summarize(&radii),
        width: summarize(&widths),
        height: summarize(&heights),
        aspect: summarize(&aspects),
        area: summarize(&areas),
    }
}

/// Analytic shape areas; occluded parts still count.
pub fn area_stats(c: &Composition) -> StatSummary {
    let areas: Vec<f64> = c.shapes.iter().map(|s| s.area()).collect();
    summarize(&areas)
}

/// Distances from each shape center to the canvas center, normalized units.
pub fn center_distance_stats(c: &Composition) -> StatSummary {
    let d: Vec<f64> = c
        .shapes
        .iter()
        .map(|s| (s.center[0] - 0.5).hypot(s.center[1] - 0.5))
        .collect();
    summarize(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Canvas, Geometry, ShapeColor, ShapeSpec};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn one(geometry: Geometry, center: [f64; 2], rotation: f64) -> Composition {
        let mut c = Composition::empty("t", Canvas::default());
        c.shapes.push(ShapeSpec { geometry, color: ShapeColor::Black, center, rotation });
        c
    }

    #[test]
    fn circle_bounds_itself() {
        let b = bounding_stats(&one(Geometry::Circle { radius: 0.1 }, [0.5, 0.5], 0.3));
        assert_eq!(b.radius, StatSummary { min: 0.1, max: 0.1, mean: 0.1, std: 0.0 });
        assert_eq!(b.width.mean, 0.2);
        assert_eq!(b.height.mean, 0.2);
    }

    #[test]
    fn rectangle_bounds() {
        let r = Geometry::Rectangle { width: 0.2, height: 0.1 };
        let b = bounding_stats(&one(r, [0.5, 0.5], 0.0));
        assert!((b.width.mean - 0.2).abs() < 1e-15 && (b.height.mean - 0.1).abs() < 1e-15);
        // half diagonal: sqrt(0.1² + 0.05²)
        assert!((b.radius.mean - (0.01f64 + 0.0025).sqrt()).abs() < 1e-15);
        let b = bounding_stats(&one(r, [0.5, 0.5], FRAC_PI_2));
        assert!((b.width.mean - 0.1).abs() < 1e-12 && (b.height.mean - 0.2).abs() < 1e-12);
    }

    #[test]
    fn empty_is_zero() {
        let c = Composition::empty("t", Canvas::default());
        assert_eq!(bounding_stats(&c), BoundingStats::default());
        assert_eq!(area_stats(&c), StatSummary::default());
        assert_eq!(center_distance_stats(&c), StatSummary::default());
    }

    #[test]
    fn areas_and_distances() {
        let s = area_stats(&one(Geometry::Circle { radius: 0.1 }, [0.5, 0.5], 0.0));
        assert_eq!((s.min, s.max, s.mean, s.std), (PI * 0.01, PI * 0.01, PI * 0.01, 0.0));
        let mut c = one(Geometry::Circle { radius: 0.1 }, [0.5, 0.5], 0.0);
        c.shapes.push(ShapeSpec {
            geometry: Geometry::Rectangle { width: 0.2, height: 0.2 },
            color: ShapeColor::White,
            center: [0.2, 0.2],
            rotation: 0.0,
        });
        let s = area_stats(&c);
        assert!((s.min - PI * 0.01).abs() < 1e-15 && (s.max - 0.04).abs() < 1e-15);
        assert!((s.mean - (0.04 + PI * 0.01) / 2.0).abs() < 1e-15);

        assert_eq!(center_distance_stats(&one(Geometry::Circle { radius: 0.1 }, [0.5, 0.5], 0.0)), StatSummary::default());
        let corner = center_distance_stats(&one(Geometry::Circle { radius: 0.1 }, [0.0, 0.0], 0.0));
        assert!((corner.mean - 0.5f64.sqrt()).abs() < 1e-15);
        let mut sym = one(Geometry::Circle { radius: 0.1 }, [0.2, 0.3], 0.0);
        sym.shapes.push(ShapeSpec { center: [0.8, 0.7], ..sym.shapes[0] });
        let s = center_distance_stats(&sym);
        assert!((s.min - s.max).abs() < 1e-15);
    }
}
