use super::stats::{summarize, StatSummary};
use crate::scene::{footprint, Composition, Raster};

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Group id per shape. Each shape is linked to its nearest neighbour (ties go
/// to the lower index); groups are the connected components of that graph,
/// numbered in order of first appearance.
pub fn group_assignment(c: &Composition) -> Vec<usize> {
    let n = c.shapes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let ci = c.shapes[i].center;
        let nearest = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let cj = c.shapes[j].center;
                (j, (ci[0] - cj[0]).hypot(ci[1] - cj[1]))
            })
            .fold(None::<(usize, f64)>, |best, (j, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((j, d)),
            });
        if let Some((j, _)) = nearest {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        if ids[root] == usize::MAX {
            ids[root] = next;
            next += 1;
        }
        out.push(ids[root]);
    }
    out
}

pub fn group_count(c: &Composition) -> usize {
    group_assignment(c).into_iter().max().map_or(0, |m| m + 1)
}

pub fn group_areas(c: &Composition, r: &Raster) -> StatSummary {
    let footprints: Vec<Vec<u32>> = c
        .shapes
        .iter()
        .map(|s| footprint(s, c.canvas.resolution))
        .collect();
    group_areas_with(c, r, &footprints, &group_assignment(c))
}

/// Covered-pixel ratio per group. A pixel covered by several shapes goes to
/// the one whose center is nearest the pixel center (lowest index on ties).
pub(crate) fn group_areas_with(
    c: &Composition,
    r: &Raster,
    footprints: &[Vec<u32>],
    groups: &[usize],
) -> StatSummary {
    let n_groups = groups.iter().max().map_or(0, |m| m + 1);
    if n_groups == 0 {
        return StatSummary::default();
    }
    let res = r.width();
    let total = (r.width() as f64) * (r.height() as f64);
    // best (distance², shape) per pixel
    let mut owner: Vec<(f64, u32)> = vec![(f64::INFINITY, u32::MAX); r.pixels().len()];
    for (si, fp) in footprints.iter().enumerate() {
        let [cx, cy] = c.shapes[si].center;
        for &idx in fp {
            let px = ((idx % res) as f64 + 0.5) / res as f64;
            let py = ((idx / res) as f64 + 0.5) / res as f64;
            let d = (px - cx).powi(2) + (py - cy).powi(2);
            let slot = &mut owner[idx as usize];
            if d < slot.0 {
                *slot = (d, si as u32);
            }
        }
    }
    let mut pixels = vec![0u64; n_groups];
    for (idx, &(_, si)) in owner.iter().enumerate() {
        if si != u32::MAX && r.pixels()[idx].is_shape() {
            pixels[groups[si as usize]] += 1;
        }
    }
    let ratios: Vec<f64> = pixels.iter().map(|&p| p as f64 / total).collect();
    summarize(&ratios)
}
