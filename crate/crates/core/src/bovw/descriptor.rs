use crate::scene::{Pixel, Raster};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Spatial cells per side of the descriptor patch.
const CELLS: usize = 4;
/// Orientation bins per cell.
const BINS: usize = 4;
pub const DESCRIPTOR_DIM: usize = CELLS * CELLS * BINS;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// Side of the grid cells in which one gradient maximum is kept.
    pub stride: u32,
    /// Minimum Sobel magnitude for a keypoint (intensities in [0, 1]).
    pub threshold: f64,
    /// Patch side in pixels; split into 4×4 cells.
    pub patch: u32,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            stride: 8,
            threshold: 0.05,
            patch: 16,
        }
    }
}

/// Descriptors of one image, one row per interest point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSet {
    pub dim: usize,
    pub keypoints: Vec<(u32, u32)>,
    pub data: Vec<f64>,
}

impl DescriptorSet {
    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }
}

fn intensity(p: Pixel, gray: f64) -> f64 {
    match p {
        Pixel::Black => 0.0,
        Pixel::White => 1.0,
        Pixel::Gray => gray,
    }
}

struct Gradients {
    w: usize,
    h: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

impl Gradients {
    fn sobel(r: &Raster, gray_level: u8) -> Self {
        let (w, h) = (r.width() as usize, r.height() as usize);
        let gray = gray_level as f64 / 255.0;
        let img: Vec<f64> = r.pixels().iter().map(|&p| intensity(p, gray)).collect();
        let at = |x: isize, y: isize| {
            let x = x.clamp(0, w as isize - 1) as usize;
            let y = y.clamp(0, h as isize - 1) as usize;
            img[y * w + x]
        };
        let mut gx = vec![0.0; w * h];
        let mut gy = vec![0.0; w * h];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let i = y as usize * w + x as usize;
                gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                    - at(x - 1, y - 1)
                    - 2.0 * at(x - 1, y)
                    - at(x - 1, y + 1))
                    / 8.0;
                gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                    - at(x - 1, y - 1)
                    - 2.0 * at(x, y - 1)
                    - at(x + 1, y - 1))
                    / 8.0;
            }
        }
        Gradients { w, h, gx, gy }
    }

    fn magnitude(&self, i: usize) -> f64 {
        self.gx[i].hypot(self.gy[i])
    }
}

/// Grid-sampled gradient maxima described by 4×4 cells of 4-bin orientation
/// histograms (D = 64). Not rotation or scale invariant.
pub fn detect_describe(r: &Raster, gray_level: u8, cfg: &DetectorConfig) -> DescriptorSet {
    let g = Gradients::sobel(r, gray_level);
    let stride = cfg.stride.max(1) as usize;
    let mut keypoints = Vec::new();
    for cy in (0..g.h).step_by(stride) {
        for cx in (0..g.w).step_by(stride) {
            let mut best: Option<(usize, usize, f64)> = None;
            for y in cy..(cy + stride).min(g.h) {
                for x in cx..(cx + stride).min(g.w) {
                    let m = g.magnitude(y * g.w + x);
                    if best.is_none_or(|(_, _, b)| m > b) {
                        best = Some((x, y, m));
                    }
                }
            }
            if let Some((x, y, m)) = best {
                if m > cfg.threshold {
                    keypoints.push((x as u32, y as u32));
                }
            }
        }
    }

    let patch = cfg.patch.max(CELLS as u32) as isize;
    let cell = (patch as f64) / CELLS as f64;
    let mut data = Vec::with_capacity(keypoints.len() * DESCRIPTOR_DIM);
    for &(kx, ky) in &keypoints {
        let mut d = [0.0f64; DESCRIPTOR_DIM];
        let x0 = kx as isize - patch / 2;
        let y0 = ky as isize - patch / 2;
        for py in 0..patch {
            for px in 0..patch {
                let (x, y) = (x0 + px, y0 + py);
                if x < 0 || y < 0 || x >= g.w as isize || y >= g.h as isize {
                    continue;
                }
                let i = y as usize * g.w + x as usize;
                let m = g.magnitude(i);
                if m == 0.0 {
                    continue;
                }
                let angle = g.gy[i].atan2(g.gx[i]).rem_euclid(TAU);
                let bin = ((angle / TAU * BINS as f64) as usize).min(BINS - 1);
                let cxi = ((px as f64 / cell) as usize).min(CELLS - 1);
                let cyi = ((py as f64 / cell) as usize).min(CELLS - 1);
                d[(cyi * CELLS + cxi) * BINS + bin] += m;
            }
        }
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            d.iter_mut().for_each(|v| *v /= norm);
        }
        data.extend_from_slice(&d);
    }
    DescriptorSet {
        dim: DESCRIPTOR_DIM,
        keypoints,
        data,
    }
}
