use super::{Composition, ShapeColor, ShapeSpec};
use serde::{Deserialize, Serialize};
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pixel {
    Gray = 0,
    Black = 1,
    White = 2,
}

impl Pixel {
    pub fn is_shape(self) -> bool {
        self != Pixel::Gray
    }
}

impl From<ShapeColor> for Pixel {
    fn from(c: ShapeColor) -> Self {
        match c {
            ShapeColor::Black => Pixel::Black,
            ShapeColor::White => Pixel::White,
        }
    }
}

/// Per-class pixel tallies over some region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelCounts {
    pub gray: u64,
    pub black: u64,
    pub white: u64,
}

impl PixelCounts {
    pub fn total(&self) -> u64 {
        self.gray + self.black + self.white
    }

    pub fn add(&mut self, p: Pixel) {
        match p {
            Pixel::Gray => self.gray += 1,
            Pixel::Black => self.black += 1,
            Pixel::White => self.white += 1,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.gray as f64, self.black as f64, self.white as f64]
    }
}

/// Square tri-level pixel grid, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Pixel>,
}

impl Raster {
    pub fn filled(width: u32, height: u32, fill: Pixel) -> Self {
        Raster {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Pixel>) -> Option<Self> {
        (pixels.len() == width as usize * height as usize).then_some(Raster {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Pixel {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, p: Pixel) {
        self.pixels[y as usize * self.width as usize + x as usize] = p;
    }

    pub fn counts(&self) -> PixelCounts {
        let mut c = PixelCounts::default();
        for &p in &self.pixels {
            c.add(p);
        }
        c
    }

    /// Counts over the half-open pixel rectangle `cols × rows`.
    pub fn region_counts(&self, cols: Range<u32>, rows: Range<u32>) -> PixelCounts {
        let mut c = PixelCounts::default();
        let w = self.width as usize;
        for y in rows.start.min(self.height)..rows.end.min(self.height) {
            let row = &self.pixels[y as usize * w..(y as usize + 1) * w];
            for &p in &row[cols.start.min(self.width) as usize..cols.end.min(self.width) as usize] {
                c.add(p);
            }
        }
        c
    }
}

/// Pixel indices (row-major) whose centers lie inside `shape` on a
/// `resolution`² canvas, ignoring other shapes.
pub fn footprint(shape: &ShapeSpec, resolution: u32) -> Vec<u32> {
    let res = resolution as f64;
    // the enclosing circle is centered on the shape center for every kind
    let half = shape.enclosing_radius() + 1e-12;
    let span = |c: f64, half: f64| -> Option<Range<u32>> {
        let lo = ((c - half) * res - 0.5).ceil().max(0.0);
        let hi = ((c + half) * res - 0.5).floor().min(res - 1.0);
        (lo <= hi).then(|| lo as u32..hi as u32 + 1)
    };
    let (Some(xs), Some(ys)) = (span(shape.center[0], half), span(shape.center[1], half)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for y in ys {
        let py = (y as f64 + 0.5) / res;
        for x in xs.clone() {
            let px = (x as f64 + 0.5) / res;
            if shape.contains(px, py) {
                out.push(y * resolution + x);
            }
        }
    }
    out
}

/// Paints shapes in list order; a pixel belongs to a shape iff its center is
/// inside the (closed) shape.
pub fn rasterize(c: &Composition) -> Raster {
    let res = c.canvas.resolution;
    let mut r = Raster::filled(res, res, Pixel::Gray);
    for shape in &c.shapes {
        let color = Pixel::from(shape.color);
        for idx in footprint(shape, res) {
            r.pixels[idx as usize] = color;
        }
    }
    r
}
