use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Circle,
    Rectangle,
    Triangle,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Circle, ShapeKind::Rectangle, ShapeKind::Triangle];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeColor {
    Black,
    White,
}

/// Kind-specific size parameters, in normalized canvas units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum Geometry {
    Circle { radius: f64 },
    Rectangle { width: f64, height: f64 },
    /// Equilateral triangle given by its circumradius.
    Triangle { circumradius: f64 },
}

impl Geometry {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Geometry::Circle { .. } => ShapeKind::Circle,
            Geometry::Rectangle { .. } => ShapeKind::Rectangle,
            Geometry::Triangle { .. } => ShapeKind::Triangle,
        }
    }

    fn sizes(&self) -> Vec<f64> {
        match *self {
            Geometry::Circle { radius } => vec![radius],
            Geometry::Rectangle { width, height } => vec![width, height],
            Geometry::Triangle { circumradius } => vec![circumradius],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    #[serde(flatten)]
    pub geometry: Geometry,
    pub color: ShapeColor,
    pub center: [f64; 2],
    /// Radians in `[0, 2π)`.
    pub rotation: f64,
}

impl ShapeSpec {
    pub fn kind(&self) -> ShapeKind {
        self.geometry.kind()
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.center.iter().all(|v| v.is_finite()) {
            return Err(format!("non-finite center {:?}", self.center));
        }
        if !self.rotation.is_finite() {
            return Err(format!("non-finite rotation {}", self.rotation));
        }
        if self.geometry.sizes().iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(format!("size parameters must be positive: {:?}", self.geometry));
        }
        Ok(())
    }

    /// Analytic area in normalized units (ignores clipping and occlusion).
    pub fn area(&self) -> f64 {
        match self.geometry {
            Geometry::Circle { radius } => PI * radius * radius,
            Geometry::Rectangle { width, height } => width * height,
            Geometry::Triangle { circumradius } => 0.75 * 3f64.sqrt() * circumradius * circumradius,
        }
    }

    /// Triangle vertices; the first points up (towards y = 0) at rotation 0.
    pub fn triangle_vertices(&self) -> Option<[[f64; 2]; 3]> {
        let Geometry::Triangle { circumradius } = self.geometry else {
            return None;
        };
        let mut out = [[0.0; 2]; 3];
        for (k, v) in out.iter_mut().enumerate() {
            let angle = self.rotation - FRAC_PI_2 + TAU * k as f64 / 3.0;
            *v = [
                self.center[0] + circumradius * angle.cos(),
                self.center[1] + circumradius * angle.sin(),
            ];
        }
        Some(out)
    }

    /// Radius of the minimal enclosing circle.
    pub fn enclosing_radius(&self) -> f64 {
        match self.geometry {
            Geometry::Circle { radius } => radius,
            Geometry::Rectangle { width, height } => 0.5 * width.hypot(height),
            Geometry::Triangle { circumradius } => circumradius,
        }
    }

    /// Width and height of the axis-aligned box around the rotated shape.
    pub fn aabb_size(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::Circle { radius } => (2.0 * radius, 2.0 * radius),
            Geometry::Rectangle { width, height } => {
                let (s, c) = self.rotation.sin_cos();
                let (s, c) = (s.abs(), c.abs());
                (width * c + height * s, width * s + height * c)
            }
            Geometry::Triangle { .. } => {
                let v = self.triangle_vertices().expect("triangle");
                let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for p in v {
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                (hi[0] - lo[0], hi[1] - lo[1])
            }
        }
    }

    /// Inclusive point-in-shape test in normalized coordinates.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        match self.geometry {
            Geometry::Circle { radius } => dx * dx + dy * dy <= radius * radius,
            Geometry::Rectangle { width, height } => {
                let (s, c) = self.rotation.sin_cos();
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                u.abs() <= 0.5 * width && v.abs() <= 0.5 * height
            }
            Geometry::Triangle { .. } => {
                let v = self.triangle_vertices().expect("triangle");
                // vertices are counter-clockwise in (x right, y down) angle order
                let mut sign = 0.0f64;
                for i in 0..3 {
                    let a = v[i];
                    let b = v[(i + 1) % 3];
                    let cross = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
                    if cross != 0.0 {
                        if sign != 0.0 && cross.signum() != sign {
                            return false;
                        }
                        sign = cross.signum();
                    }
                }
                true
            }
        }
    }
}
