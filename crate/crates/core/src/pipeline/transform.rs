use serde::{Deserialize, Serialize};

pub const BOXCOX_LAMBDA_MIN: f64 = -5.0;
pub const BOXCOX_LAMBDA_MAX: f64 = 5.0;
pub const BOXCOX_LAMBDA_STEP: f64 = 0.01;
pub const OUTLIER_Z: f64 = 4.0;
const HISTOGRAM_BINS: usize = 10;

/// Transform family chosen for a column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Identity,
    BoxCox,
    Log,
    Sqrt,
}

/// A fitted per-column transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnTransform {
    Identity,
    /// `((x + shift)^λ - 1) / λ`, or `ln(x + shift)` at λ = 0. Inputs below
    /// `floor - shift` are raised to it.
    BoxCox { lambda: f64, shift: f64, floor: f64 },
    /// `ln(max(x, 0) + eps)`.
    Log { eps: f64 },
    /// `sqrt(max(x - min, 0))`.
    Sqrt { min: f64 },
}

impl ColumnTransform {
    pub fn kind(&self) -> TransformKind {
        match self {
            ColumnTransform::Identity => TransformKind::Identity,
            ColumnTransform::BoxCox { .. } => TransformKind::BoxCox,
            ColumnTransform::Log { .. } => TransformKind::Log,
            ColumnTransform::Sqrt { .. } => TransformKind::Sqrt,
        }
    }

    pub fn fit(kind: TransformKind, xs: &[f64]) -> Self {
        let (min, max) = min_max(xs);
        match kind {
            TransformKind::Identity => ColumnTransform::Identity,
            TransformKind::Sqrt => ColumnTransform::Sqrt { min },
            TransformKind::Log => {
                let smallest = xs.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
                let eps = if smallest.is_finite() { smallest / 2.0 } else { 1.0 };
                ColumnTransform::Log { eps }
            }
            TransformKind::BoxCox => {
                if min == max {
                    return ColumnTransform::Identity;
                }
                let shift = if min > 0.0 { 0.0 } else { -min + 1e-3 * (max - min) };
                let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
                match boxcox_fit(&shifted) {
                    Some(lambda) => ColumnTransform::BoxCox {
                        lambda,
                        shift,
                        floor: (min + shift) / 2.0,
                    },
                    None => ColumnTransform::Identity,
                }
            }
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ColumnTransform::Identity => x,
            ColumnTransform::BoxCox { lambda, shift, floor } => boxcox_apply((x + shift).max(floor), lambda),
            ColumnTransform::Log { eps } => (x.max(0.0) + eps).ln(),
            ColumnTransform::Sqrt { min } => (x - min).max(0.0).sqrt(),
        }
    }

    /// Inverse on the transform's image.
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            ColumnTransform::Identity => y,
            ColumnTransform::BoxCox { lambda, shift, .. } => boxcox_inverse(y, lambda) - shift,
            ColumnTransform::Log { eps } => y.exp() - eps,
            ColumnTransform::Sqrt { min } => y * y + min,
        }
    }
}

pub(crate) fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Sample skewness (population moments).
pub fn skewness(xs: &[f64]) -> f64 {
    let (mean, std) = mean_std(xs);
    if std == 0.0 {
        return 0.0;
    }
    xs.iter().map(|x| ((x - mean) / std).powi(3)).sum::<f64>() / xs.len() as f64
}

fn histogram(xs: &[f64]) -> Vec<f64> {
    let (min, max) = min_max(xs);
    let mut h = vec![0.0; HISTOGRAM_BINS];
    let width = (max - min) / HISTOGRAM_BINS as f64;
    for &x in xs {
        let b = if width > 0.0 {
            (((x - min) / width) as usize).min(HISTOGRAM_BINS - 1)
        } else {
            0
        };
        h[b] += 1.0;
    }
    h
}

/// Counting-noise slack when comparing adjacent histogram bars.
fn slack(a: f64, b: f64) -> f64 {
    2.0 * a.max(b).max(1.0).sqrt()
}

fn is_decreasing(h: &[f64]) -> bool {
    h.windows(2).all(|w| w[1] <= w[0] + slack(w[0], w[1]))
}

fn is_unimodal(h: &[f64]) -> bool {
    let peak = (0..h.len()).fold(0, |best, i| if h[i] > h[best] { i } else { best });
    h[..=peak].windows(2).all(|w| w[1] + slack(w[0], w[1]) >= w[0]) && is_decreasing(&h[peak..])
}

fn mode_share(xs: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = 0usize;
    let mut run = 0usize;
    for i in 0..sorted.len() {
        run = if i > 0 && sorted[i] == sorted[i - 1] { run + 1 } else { 1 };
        best = best.max(run);
    }
    best as f64 / xs.len().max(1) as f64
}

/// Picks a transform from the column's shape, checked in this order:
/// one value holding more than half the mass → sqrt; right skew above 1.5 on
/// non-negative support with a decreasing histogram → log; |skew| above 1
/// with a unimodal histogram → Box-Cox; anything else → identity.
pub fn classify_distribution(xs: &[f64]) -> TransformKind {
    let (min, max) = min_max(xs);
    if xs.len() < 3 || min == max {
        return TransformKind::Identity;
    }
    if mode_share(xs) > 0.5 {
        return TransformKind::Sqrt;
    }
    let skew = skewness(xs);
    let h = histogram(xs);
    if skew > 1.5 && min >= 0.0 && is_decreasing(&h) {
        return TransformKind::Log;
    }
    if skew.abs() > 1.0 && is_unimodal(&h) {
        return TransformKind::BoxCox;
    }
    TransformKind::Identity
}

pub fn boxcox_apply(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.ln()
    } else if lambda == 1.0 {
        x - 1.0
    } else {
        (lambda * x.ln()).exp_m1() / lambda
    }
}

pub fn boxcox_inverse(y: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        y.exp()
    } else if lambda == 1.0 {
        y + 1.0
    } else {
        ((lambda * y).ln_1p() / lambda).exp()
    }
}

/// Box-Cox profile log-likelihood of strictly positive data.
pub fn boxcox_llf(xs: &[f64], lambda: f64) -> f64 {
    let n = xs.len() as f64;
    let log_sum: f64 = xs.iter().map(|x| x.ln()).sum();
    let ys: Vec<f64> = xs.iter().map(|&x| boxcox_apply(x, lambda)).collect();
    let (_, std) = mean_std(&ys);
    (lambda - 1.0) * log_sum - n / 2.0 * (std * std).ln()
}

/// λ maximizing the log-likelihood on the grid -5, -4.99, …, 5; `None` for
/// constant or non-positive data.
pub fn boxcox_fit(xs: &[f64]) -> Option<f64> {
    let (min, max) = min_max(xs);
    if xs.len() < 2 || min <= 0.0 || min == max {
        return None;
    }
    let steps = ((BOXCOX_LAMBDA_MAX - BOXCOX_LAMBDA_MIN) / BOXCOX_LAMBDA_STEP).round() as i64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let lambda = (i - steps / 2) as f64 / 100.0;
        let llf = boxcox_llf(xs, lambda);
        if llf.is_finite() && best.is_none_or(|(_, b)| llf > b) {
            best = Some((lambda, llf));
        }
    }
    best.map(|(l, _)| l)
}

/// Flags values more than [`OUTLIER_Z`] standard deviations from the mean
/// and clamps them to that boundary. Rows are never dropped.
pub fn remove_outliers(xs: &[f64]) -> (Vec<bool>, Vec<f64>) {
    let (lo, hi) = outlier_bounds(xs, OUTLIER_Z);
    let mask = xs.iter().map(|&x| x < lo || x > hi).collect();
    let clipped = xs.iter().map(|&x| x.clamp(lo, hi)).collect();
    (mask, clipped)
}

pub fn outlier_bounds(xs: &[f64], z: f64) -> (f64, f64) {
    let (mean, std) = mean_std(xs);
    if std == 0.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (mean - z * std, mean + z * std)
    }
}
