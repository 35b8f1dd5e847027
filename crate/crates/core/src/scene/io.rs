use super::{Composition, Pixel, Raster};
use crate::error::{Error, Result};
use image::{GrayImage, Luma};
use std::path::Path;

pub fn save_composition(c: &Composition, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(c).expect("composition serializes");
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_composition(path: &Path) -> Result<Composition> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let c: Composition =
        serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
    c.validate()?;
    Ok(c)
}

impl Raster {
    pub fn to_gray_image(&self, gray_level: u8) -> GrayImage {
        GrayImage::from_fn(self.width(), self.height(), |x, y| {
            Luma([match self.get(x, y) {
                Pixel::Black => 0,
                Pixel::White => 255,
                Pixel::Gray => gray_level,
            }])
        })
    }

    pub fn from_gray_image(img: &GrayImage, gray_level: u8) -> Result<Raster> {
        let mut pixels = Vec::with_capacity(img.len());
        for (x, y, &Luma([v])) in img.enumerate_pixels() {
            pixels.push(match v {
                0 => Pixel::Black,
                255 => Pixel::White,
                g if g == gray_level => Pixel::Gray,
                value => {
                    return Err(Error::PixelClass {
                        x,
                        y,
                        value,
                        gray_level,
                    })
                }
            });
        }
        Ok(Raster::from_pixels(img.width(), img.height(), pixels).expect("dimensions"))
    }
}

/// Writes an 8-bit grayscale PNG with values {0, gray_level, 255}.
pub fn save_raster_png(r: &Raster, gray_level: u8, path: &Path) -> Result<()> {
    r.to_gray_image(gray_level).save(path)?;
    Ok(())
}

pub fn load_raster_png(path: &Path, gray_level: u8) -> Result<Raster> {
    let img = image::open(path)?.into_luma8();
    Raster::from_gray_image(&img, gray_level)
}
