use crate::scene::Raster;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Cells per side at each step of the occupancy curve; step index is x.
pub const GRID_SCHEDULE: [u32; 6] = [2, 4, 8, 16, 32, 64];

/// Coefficients of `a·x² + b·x + c` fitted to the occupancy curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Fraction of grid cells holding at least one non-gray pixel, per grid size.
pub fn occupancy_curve(r: &Raster) -> [f64; 6] {
    let (w, h) = (r.width(), r.height());
    let mut out = [0.0; 6];
    for (slot, &g) in out.iter_mut().zip(GRID_SCHEDULE.iter()) {
        let g = g.min(w).min(h).max(1);
        let mut occupied = vec![false; (g * g) as usize];
        for y in 0..h {
            let cy = (y as u64 * g as u64 / h as u64) as u32;
            for x in 0..w {
                if r.get(x, y).is_shape() {
                    let cx = (x as u64 * g as u64 / w as u64) as u32;
                    occupied[(cy * g + cx) as usize] = true;
                }
            }
        }
        *slot = occupied.iter().filter(|&&o| o).count() as f64 / (g * g) as f64;
    }
    out
}

/// Least-squares quadratic through `(i, ys[i])`.
///
/// The fit runs on `ys - ys[0]` and adds `ys[0]` back to the intercept, so a
/// constant curve yields exactly `(0, 0, ys[0])`.
pub fn fit_quadratic(ys: &[f64]) -> EntropyCoefficients {
    if ys.is_empty() {
        return EntropyCoefficients::default();
    }
    let base = ys[0];
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (i, &y) in ys.iter().enumerate() {
        let x = i as f64;
        let row = Vector3::new(x * x, x, 1.0);
        normal += row * row.transpose();
        rhs += row * (y - base);
    }
    let sol = normal
        .lu()
        .solve(&rhs)
        .unwrap_or_else(Vector3::zeros);
    EntropyCoefficients {
        a: sol[0],
        b: sol[1],
        c: sol[2] + base,
    }
}

pub fn entropy_poly(r: &Raster) -> EntropyCoefficients {
    fit_quadratic(&occupancy_curve(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Pixel;

    #[test]
    fn constant_curves_are_exact() {
        let full = Raster::filled(512, 512, Pixel::White);
        assert_eq!(entropy_poly(&full), EntropyCoefficients { a: 0.0, b: 0.0, c: 1.0 });
        let empty = Raster::filled(512, 512, Pixel::Gray);
        assert_eq!(entropy_poly(&empty), EntropyCoefficients { a: 0.0, b: 0.0, c: 0.0 });
    }

    #[test]
    fn exact_quadratic_is_recovered() {
        let ys: Vec<f64> = (0..6).map(|x| 0.5 * (x * x) as f64 - 2.0 * x as f64 + 3.0).collect();
        let f = fit_quadratic(&ys);
        assert!((f.a - 0.5).abs() < 1e-12 && (f.b + 2.0).abs() < 1e-12 && (f.c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_pixel_occupancy() {
        let mut r = Raster::filled(64, 64, Pixel::Gray);
        r.set(0, 0, Pixel::Black);
        let curve = occupancy_curve(&r);
        for (f, g) in curve.iter().zip(GRID_SCHEDULE) {
            assert_eq!(*f, 1.0 / (g * g) as f64);
        }
    }
}
