//! Handcrafted composition features.
//!
//! Scene-level features (counts, groups, bounding, areas, distances, gravity
//! pairing) read the [`Composition`]; pixel-level ones read the [`Raster`].
//! List-valued features are reduced with [`summarize`].
//!
//! Column order of the 70-wide handcrafted block:
//!
//! | columns | extractor |
//! |---|---|
//! | 7 | shape counts: total, triangles, circles, rectangles, indeterminable, black, white |
//! | 1 | black/white ratio |
//! | 1 | nearest-neighbour group count |
//! | 1 | covered area |
//! | 4 | group area summary |
//! | 3 | occupancy-curve quadratic a, b, c |
//! | 20 | bounding radius, width, height, width/height, width·height summaries |
//! | 3 | gray, black, white pixel counts |
//! | 12 | the same counts in the four rule-of-thirds windows |
//! | 6 | the same counts in the left and right thirds |
//! | 4 | cross-half gravity summary (summary of pairwise forces) |
//! | 4 | analytic area summary |
//! | 4 | center distance summary |

mod counts;
mod entropy;
mod geometry;
mod gravity;
mod groups;
mod layout;
mod pixels;
mod stats;
pub mod table;

pub use counts::{bw_ratio, label_components, shape_counts, ShapeCounts};
pub use entropy::{entropy_poly, fit_quadratic, occupancy_curve, EntropyCoefficients, GRID_SCHEDULE};
pub use geometry::{area_stats, bounding_stats, center_distance_stats, BoundingStats};
pub use gravity::{force, gravity, GRAVITY_CONSTANT};
pub use groups::{group_areas, group_assignment, group_count};
pub use layout::{Column, FeatureLayout, FeatureVector};
pub use pixels::{balance, color_distribution, third_columns, third_window, two_third_points};
pub use stats::{summarize, StatSummary};

use crate::error::{Error, Result};
use crate::scene::{footprint, Composition, Raster};
use std::sync::OnceLock;

pub const HANDCRAFTED_VERSION: &str = "handcrafted/1";
pub const HANDCRAFTED_WIDTH: usize = 70;

/// Fraction of canvas pixels that are black or white.
pub fn covered_area(r: &Raster) -> f64 {
    let c = r.counts();
    (c.black + c.white) as f64 / c.total() as f64
}

fn push_summary(layout: &mut FeatureLayout, source: &str, prefix: &str) {
    for f in StatSummary::FIELDS {
        layout.push(source, format!("{prefix}_{f}"));
    }
}

fn push_counts(layout: &mut FeatureLayout, source: &str, prefix: &str) {
    for class in ["gray", "black", "white"] {
        layout.push(source, format!("{prefix}_{class}"));
    }
}

pub fn handcrafted_layout() -> &'static FeatureLayout {
    static LAYOUT: OnceLock<FeatureLayout> = OnceLock::new();
    LAYOUT.get_or_init(|| {
        let mut l = FeatureLayout::new(HANDCRAFTED_VERSION);
        for name in [
            "n_shapes",
            "n_triangles",
            "n_circles",
            "n_rectangles",
            "n_indeterminable",
            "n_black",
            "n_white",
        ] {
            l.push("shape_counts", name);
        }
        l.push("bw_ratio", "bw_ratio");
        l.push("group_count", "n_groups");
        l.push("covered_area", "covered_area");
        push_summary(&mut l, "group_areas", "group_area");
        for k in ["a", "b", "c"] {
            l.push("entropy_poly", format!("entropy_{k}"));
        }
        for part in BoundingStats::PARTS {
            push_summary(&mut l, "bounding_stats", &format!("bounding_{part}"));
        }
        push_counts(&mut l, "color_distribution", "color");
        for i in 1..=4 {
            push_counts(&mut l, "two_third_points", &format!("third_point{i}"));
        }
        push_counts(&mut l, "balance", "balance_left");
        push_counts(&mut l, "balance", "balance_right");
        push_summary(&mut l, "gravity", "gravity");
        push_summary(&mut l, "area_stats", "area");
        push_summary(&mut l, "center_distance_stats", "center_distance");
        debug_assert_eq!(l.len(), HANDCRAFTED_WIDTH);
        l
    })
}

/// Concatenates every handcrafted extractor in [`handcrafted_layout`] order.
pub fn extract_handcrafted(c: &Composition, r: &Raster) -> Result<FeatureVector> {
    let footprints: Vec<Vec<u32>> = c
        .shapes
        .iter()
        .map(|s| footprint(s, r.width()))
        .collect();
    let groups = group_assignment(c);
    let mut v = Vec::with_capacity(HANDCRAFTED_WIDTH);

    v.extend(counts::shape_counts_with(c, r, &footprints).as_array());
    v.push(bw_ratio(c));
    v.push(groups.iter().max().map_or(0, |m| m + 1) as f64);
    v.push(covered_area(r));
    v.extend(groups::group_areas_with(c, r, &footprints, &groups).as_array());
    let e = entropy_poly(r);
    v.extend([e.a, e.b, e.c]);
    for s in bounding_stats(c).as_array() {
        v.extend(s.as_array());
    }
    v.extend(color_distribution(r).as_array());
    for w in two_third_points(r) {
        v.extend(w.as_array());
    }
    for side in balance(r) {
        v.extend(side.as_array());
    }
    let masses: Vec<f64> = footprints.iter().map(|f| f.len() as f64).collect();
    v.extend(gravity::gravity_with(c, &masses, r.width() as f64 * r.height() as f64).as_array());
    v.extend(area_stats(c).as_array());
    v.extend(center_distance_stats(c).as_array());

    let layout = handcrafted_layout();
    debug_assert_eq!(v.len(), layout.len());
    if let Some((i, &value)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFinite {
            column: layout.columns[i].name.clone(),
            value,
        });
    }
    Ok(FeatureVector {
        values: v,
        layout_id: layout.version.clone(),
    })
}
