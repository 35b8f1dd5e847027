use crate::scene::{Pixel, Raster};

/// Intensity of a pixel class in [0, 1].
pub fn intensity(p: Pixel, gray_level: u8) -> f64 {
    match p {
        Pixel::Black => 0.0,
        Pixel::White => 1.0,
        Pixel::Gray => gray_level as f64 / 255.0,
    }
}

/// `(source index, weight)` pairs per target cell for exact area averaging
/// of `src` samples onto `dst` cells.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let lo = i as f64 * scale;
            let hi = (i + 1) as f64 * scale;
            let mut w = Vec::new();
            let mut j = lo.floor() as usize;
            while (j as f64) < hi && j < src {
                let overlap = (hi.min(j as f64 + 1.0) - lo.max(j as f64)).max(0.0);
                if overlap > 0.0 {
                    w.push((j, overlap / scale));
                }
                j += 1;
            }
            w
        })
        .collect()
}

/// Area-averaged downsampling to `size`×`size`, values in [0, 1].
pub fn resize(r: &Raster, gray_level: u8, size: usize) -> Vec<f64> {
    let (w, h) = (r.width() as usize, r.height() as usize);
    let img: Vec<f64> = r.pixels().iter().map(|&p| intensity(p, gray_level)).collect();
    let wx = area_weights(w, size);
    let wy = area_weights(h, size);
    // rows first, then columns
    let mut tmp = vec![0.0; h * size];
    for y in 0..h {
        for (x, ws) in wx.iter().enumerate() {
            tmp[y * size + x] = ws.iter().map(|&(j, a)| a * img[y * w + j]).sum();
        }
    }
    let mut out = vec![0.0; size * size];
    for (y, ws) in wy.iter().enumerate() {
        for x in 0..size {
            out[y * size + x] = ws.iter().map(|&(j, a)| a * tmp[j * size + x]).sum::<f64>().clamp(0.0, 1.0);
        }
    }
    out
}
