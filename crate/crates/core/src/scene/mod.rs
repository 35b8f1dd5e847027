//! Random geometric compositions: generation, rasterization and file formats.
//!
//! Every composition is a pure function of its [`GenConfig`] and seed. The
//! generator is ChaCha8 seeded with `seed_from_u64(seed)`; each shape
//! attribute family reads from its own ChaCha stream (see [`stream`]), so adding
//! a size range tweak never perturbs positions and the output is identical on
//! every platform.

mod io;
mod raster;
mod shape;

pub use io::{load_composition, load_raster_png, save_composition, save_raster_png};
pub use raster::{footprint, rasterize, Pixel, PixelCounts, Raster};
pub use shape::{Geometry, ShapeColor, ShapeKind, ShapeSpec};

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// ChaCha stream ids used by [`generate`].
pub mod stream {
    pub const CENTER: u64 = 0;
    pub const ROTATION: u64 = 1;
    pub const SIZE: u64 = 2;
}

pub const DEFAULT_RESOLUTION: u32 = 512;
pub const DEFAULT_GRAY_LEVEL: u8 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canvas {
    pub resolution: u32,
    pub gray_level: u8,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            resolution: DEFAULT_RESOLUTION,
            gray_level: DEFAULT_GRAY_LEVEL,
        }
    }
}

impl Canvas {
    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::Config("canvas resolution must be positive".into()));
        }
        if self.gray_level == 0 || self.gray_level == 255 {
            return Err(Error::Config(format!(
                "gray level {} collides with black or white",
                self.gray_level
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub id: String,
    pub seed: u64,
    pub canvas: Canvas,
    pub shapes: Vec<ShapeSpec>,
}

impl Composition {
    pub fn empty(id: impl Into<String>, canvas: Canvas) -> Self {
        Composition {
            id: id.into(),
            seed: 0,
            canvas,
            shapes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.canvas.validate()?;
        for (i, s) in self.shapes.iter().enumerate() {
            s.validate()
                .map_err(|e| Error::Config(format!("shape {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn count_color(&self, color: ShapeColor) -> usize {
        self.shapes.iter().filter(|s| s.color == color).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: f64,
    pub max: f64,
}

impl SizeRange {
    pub const fn new(min: f64, max: f64) -> Self {
        SizeRange { min, max }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.min + (self.max - self.min) * rng.random::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRanges {
    pub circle: SizeRange,
    pub rectangle: SizeRange,
    pub triangle: SizeRange,
}

impl SizeRanges {
    pub fn get(&self, kind: ShapeKind) -> SizeRange {
        match kind {
            ShapeKind::Circle => self.circle,
            ShapeKind::Rectangle => self.rectangle,
            ShapeKind::Triangle => self.triangle,
        }
    }
}

impl Default for SizeRanges {
    fn default() -> Self {
        SizeRanges {
            circle: SizeRange::new(0.03, 0.15),
            rectangle: SizeRange::new(0.05, 0.30),
            triangle: SizeRange::new(0.04, 0.18),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCount {
    pub kind: ShapeKind,
    pub color: ShapeColor,
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// Shapes are emitted in this order, `count` of each entry.
    pub counts: Vec<ShapeCount>,
    pub size_range: SizeRanges,
    pub canvas: Canvas,
}

impl Default for GenConfig {
    fn default() -> Self {
        let counts = ShapeKind::ALL
            .iter()
            .flat_map(|&kind| {
                [ShapeColor::Black, ShapeColor::White].map(|color| ShapeCount {
                    kind,
                    color,
                    count: 1,
                })
            })
            .collect();
        GenConfig {
            counts,
            size_range: SizeRanges::default(),
            canvas: Canvas::default(),
        }
    }
}

impl GenConfig {
    pub fn with_counts(counts: &[(ShapeKind, ShapeColor, u32)]) -> Self {
        GenConfig {
            counts: counts
                .iter()
                .map(|&(kind, color, count)| ShapeCount { kind, color, count })
                .collect(),
            ..GenConfig::default()
        }
    }

    pub fn total_shapes(&self) -> usize {
        self.counts.iter().map(|c| c.count as usize).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.canvas.validate()?;
        for kind in ShapeKind::ALL {
            let r = self.size_range.get(kind);
            if !(r.min.is_finite() && r.max.is_finite() && r.min > 0.0 && r.min <= r.max) {
                return Err(Error::Config(format!(
                    "size range for {kind:?} must satisfy 0 < min <= max, got [{}, {}]",
                    r.min, r.max
                )));
            }
        }
        Ok(())
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Identifier used for generated compositions.
pub fn composition_id(seed: u64) -> String {
    format!("{seed:016x}")
}

pub fn generate(config: &GenConfig, seed: u64) -> Result<Composition> {
    config.validate()?;
    let mut centers = stream_rng(seed, stream::CENTER);
    let mut rotations = stream_rng(seed, stream::ROTATION);
    let mut sizes = stream_rng(seed, stream::SIZE);

    let mut shapes = Vec::with_capacity(config.total_shapes());
    for entry in &config.counts {
        let range = config.size_range.get(entry.kind);
        for _ in 0..entry.count {
            let center = [centers.random::<f64>(), centers.random::<f64>()];
            let rotation = TAU * rotations.random::<f64>();
            let geometry = match entry.kind {
                ShapeKind::Circle => Geometry::Circle {
                    radius: range.sample(&mut sizes),
                },
                ShapeKind::Rectangle => Geometry::Rectangle {
                    width: range.sample(&mut sizes),
                    height: range.sample(&mut sizes),
                },
                ShapeKind::Triangle => Geometry::Triangle {
                    circumradius: range.sample(&mut sizes),
                },
            };
            shapes.push(ShapeSpec {
                geometry,
                color: entry.color,
                center,
                rotation,
            });
        }
    }
    Ok(Composition {
        id: composition_id(seed),
        seed,
        canvas: config.canvas,
        shapes,
    })
}
