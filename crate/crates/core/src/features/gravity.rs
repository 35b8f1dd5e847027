use super::stats::{summarize, StatSummary};
use crate::scene::{footprint, Composition, Raster};

/// Gravitational constant used for shape attraction.
pub const GRAVITY_CONSTANT: f64 = 1e-8;

pub fn force(m1: f64, m2: f64, distance: f64) -> f64 {
    GRAVITY_CONSTANT * m1 * m2 / distance
}

/// Summary of `γ·m₁·m₂/r` over every (left, right) shape pair.
///
/// A shape is on the left iff its center has x < 0.5. Mass is the shape's
/// pixel footprint (occluded pixels included) divided by the canvas area.
/// Pairs with coincident centers are skipped.
pub fn gravity(c: &Composition, r: &Raster) -> StatSummary {
    let res = r.width();
    let masses: Vec<f64> = c
        .shapes
        .iter()
        .map(|s| footprint(s, res).len() as f64)
        .collect();
    gravity_with(c, &masses, r.width() as f64 * r.height() as f64)
}

pub(crate) fn gravity_with(c: &Composition, pixel_masses: &[f64], canvas_area: f64) -> StatSummary {
    let mut forces = Vec::new();
    for (i, a) in c.shapes.iter().enumerate() {
        if a.center[0] >= 0.5 {
            continue;
        }
        for (j, b) in c.shapes.iter().enumerate() {
            if b.center[0] < 0.5 {
                continue;
            }
            let r = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
            if r == 0.0 {
                continue;
            }
            forces.push(force(
                pixel_masses[i] / canvas_area,
                pixel_masses[j] / canvas_area,
                r,
            ));
        }
    }
    summarize(&forces)
}
