//! Soft-margin SVM trained by SMO with second-order working-set selection
//! on a precomputed kernel matrix.

use super::data::LabeledDataset;
use crate::targets::ClassLabel;
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    /// exp(-γ‖a − b‖²); `gamma: None` means 1 / dimension.
    Rbf { gamma: Option<f64> },
}

impl Kernel {
    fn resolved(self, d: usize) -> Kernel {
        match self {
            Kernel::Rbf { gamma: None } => Kernel::Rbf { gamma: Some(1.0 / d.max(1) as f64) },
            k => k,
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let g = gamma.unwrap_or(1.0 / a.len().max(1) as f64);
                (-g * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).exp()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    /// Stop when the maximal KKT violation falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 1.0, kernel: Kernel::Rbf { gamma: None }, tol: 1e-3, max_iter: 1_000_000 }
    }
}

pub fn kernel_matrix(x: ArrayView2<f64>, k: Kernel) -> Array2<f64> {
    let n = x.nrows();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = k.eval(&rows[i], &rows[j]);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    m
}

/// Dual solution of one ±1 problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoFit {
    pub alpha: Vec<f64>,
    /// Decision is Σ αᵢyᵢK(xᵢ, x) − rho.
    pub rho: f64,
    /// Dual objective Σα − ½αᵀQα after each iteration (starts at 0).
    pub dual_history: Vec<f64>,
    pub kkt_gap: f64,
    pub iterations: usize,
}

const TAU: f64 = 1e-12;

/// SMO on `K` with labels `y ∈ {−1, +1}`.
pub fn smo(k: &Array2<f64>, y: &[f64], c: f64, tol: f64, max_iter: usize) -> SmoFit {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα
    let mut g = vec![-1.0; n];
    let q = |i: usize, j: usize| y[i] * y[j] * k[[i, j]];
    let dual = |alpha: &[f64], g: &[f64]| -0.5 * alpha.iter().zip(g).map(|(a, gi)| a * (gi - 1.0)).sum::<f64>();
    let mut dual_history = vec![0.0];
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    while iterations < max_iter {
        // i: most violating index in I_up
        let (mut gmax, mut i) = (f64::NEG_INFINITY, usize::MAX);
        for t in 0..n {
            let up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            if up && -y[t] * g[t] >= gmax {
                gmax = -y[t] * g[t];
                i = t;
            }
        }
        // j: second-order choice in I_low
        let (mut gmax2, mut j, mut best) = (f64::NEG_INFINITY, usize::MAX, f64::INFINITY);
        for t in 0..n {
            let low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
            if !low {
                continue;
            }
            gmax2 = gmax2.max(y[t] * g[t]);
            if i == usize::MAX {
                continue;
            }
            let diff = gmax + y[t] * g[t];
            if diff > 0.0 {
                let quad = k[[i, i]] + k[[t, t]] - 2.0 * k[[i, t]];
                let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        gap = gmax + gmax2;
        if gap < tol || i == usize::MAX || j == usize::MAX {
            break;
        }
        iterations += 1;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (k[[i, i]] + k[[j, j]] + 2.0 * q(i, j)).max(TAU);
            let delta = (-g[i] - g[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (k[[i, i]] + k[[j, j]] - 2.0 * q(i, j)).max(TAU);
            let delta = (g[i] - g[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            g[t] += q(i, t) * di + q(j, t) * dj;
        }
        dual_history.push(dual(&alpha, &g));
    }
    // rho from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb, mut sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * g[t];
        if alpha[t] >= c {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };
    SmoFit { alpha, rho, dual_history, kkt_gap: gap, iterations }
}

/// One binary decision function kept as its support vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub support: Vec<Vec<f64>>,
    /// αᵢyᵢ per support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
    /// Collapsed weight vector for the linear kernel.
    pub w: Option<Vec<f64>>,
}

impl BinarySvm {
    fn from_fit(x: ArrayView2<f64>, y: &[f64], fit: &SmoFit, kernel: Kernel) -> Self {
        let mut support = Vec::new();
        let mut coef = Vec::new();
        for (i, &a) in fit.alpha.iter().enumerate() {
            if a > 0.0 {
                support.push(x.row(i).to_vec());
                coef.push(a * y[i]);
            }
        }
        let w = matches!(kernel, Kernel::Linear).then(|| {
            let mut w = vec![0.0; x.ncols()];
            for (sv, c) in support.iter().zip(&coef) {
                w.iter_mut().zip(sv).for_each(|(a, b)| *a += c * b);
            }
            w
        });
        if w.is_some() {
            support.clear();
            coef.clear();
        }
        BinarySvm { support, coef, rho: fit.rho, w }
    }

    pub fn decision(&self, kernel: &Kernel, row: &[f64]) -> f64 {
        match &self.w {
            Some(w) => w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>() - self.rho,
            None => {
                self.support.iter().zip(&self.coef).map(|(sv, c)| c * kernel.eval(sv, row)).sum::<f64>() - self.rho
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub classes: Vec<ClassLabel>,
    pub kernel: Kernel,
    /// One machine for two classes (positive means the second), else one per class.
    pub machines: Vec<BinarySvm>,
}

impl Svm {
    pub fn fit(data: &LabeledDataset, p: &SvmParams) -> Self {
        let (classes, y) = data.encode();
        let kernel = p.kernel.resolved(data.dim());
        let km = kernel_matrix(data.x.view(), kernel);
        let targets: Vec<Vec<f64>> = match classes.len() {
            1 => Vec::new(),
            2 => vec![y.iter().map(|&c| if c == 1 { 1.0 } else { -1.0 }).collect()],
            k => (0..k).map(|pos| y.iter().map(|&c| if c == pos { 1.0 } else { -1.0 }).collect()).collect(),
        };
        let machines = targets
            .iter()
            .map(|t| BinarySvm::from_fit(data.x.view(), t, &smo(&km, t, p.c, p.tol, p.max_iter), kernel))
            .collect();
        Svm { classes, kernel, machines }
    }

    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        match self.classes.len() {
            1 => vec![1.0],
            2 => {
                let f = self.machines[0].decision(&self.kernel, row);
                vec![-f, f]
            }
            _ => self.machines.iter().map(|m| m.decision(&self.kernel, row)).collect(),
        }
    }
}
