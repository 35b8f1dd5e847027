//! L2-regularized logistic regression and the ridge classifier. Two classes
//! use a single binary model (scores `[-f, f]`); more use one-vs-rest.

use super::data::LabeledDataset;
use crate::targets::ClassLabel;
use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

/// A linear score `w·x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearScore {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearScore {
    pub fn eval(&self, row: &[f64]) -> f64 {
        self.w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>() + self.b
    }
}

/// Per-class (or single binary) linear scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub classes: Vec<ClassLabel>,
    /// One score for two classes (positive means the second), else one per class.
    pub scores: Vec<LinearScore>,
}

impl LinearModel {
    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        if self.classes.len() == 2 && self.scores.len() == 1 {
            let f = self.scores[0].eval(row);
            vec![-f, f]
        } else if self.classes.len() == 1 {
            vec![1.0]
        } else {
            self.scores.iter().map(|s| s.eval(row)).collect()
        }
    }
}

/// ±1 targets for each binary problem.
fn binary_problems(data: &LabeledDataset) -> (Vec<ClassLabel>, Vec<Vec<f64>>) {
    let (classes, y) = data.encode();
    let sign = |pos: usize| y.iter().map(|&c| if c == pos { 1.0 } else { -1.0 }).collect::<Vec<_>>();
    let problems = match classes.len() {
        1 => Vec::new(),
        2 => vec![sign(1)],
        k => (0..k).map(sign).collect(),
    };
    (classes, problems)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    /// Penalty λ/2·‖w‖² added to the mean log-loss; the bias is free.
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { lambda: 1e-2, tol: 1e-6, max_iter: 20_000 }
    }
}

/// Outcome of one binary fit.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticFit {
    pub score: LinearScore,
    pub grad_norm: f64,
    pub iterations: usize,
    pub objective: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 { 1.0 / (1.0 + (-z).exp()) } else { let e = z.exp(); e / (1.0 + e) }
}

/// Objective and gradient at θ = (w, b), with θ stored as `[w.., b]`.
pub fn logistic_objective(x: ArrayView2<f64>, y: &[f64], lambda: f64, theta: &[f64]) -> (f64, Vec<f64>) {
    let (n, d) = x.dim();
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for i in 0..n {
        let row = x.row(i);
        let f: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + theta[d];
        let m = y[i] * f;
        loss += softplus(-m);
        let coef = -y[i] * sigmoid(-m);
        for (g, v) in grad.iter_mut().zip(row.iter()) {
            *g += coef * v;
        }
        grad[d] += coef;
    }
    let nf = n as f64;
    loss /= nf;
    grad.iter_mut().for_each(|g| *g /= nf);
    let mut pen = 0.0;
    for j in 0..d {
        pen += theta[j] * theta[j];
        grad[j] += lambda * theta[j];
    }
    (loss + 0.5 * lambda * pen, grad)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Gradient descent with Barzilai-Borwein step sizes, safeguarded by an
/// Armijo backtracking line search. Stops when ‖∇‖ < `tol`.
pub fn fit_binary_logistic(x: ArrayView2<f64>, y: &[f64], p: &LogisticParams) -> LogisticFit {
    let d = x.ncols();
    let mut theta = vec![0.0; d + 1];
    let (mut obj, mut grad) = logistic_objective(x, y, p.lambda, &theta);
    // initial step from a curvature bound: 0.25·max‖x‖² + λ
    let max_sq = x.rows().into_iter().map(|r| r.dot(&r) + 1.0).fold(0.0, f64::max);
    let mut step = 1.0 / (0.25 * max_sq + p.lambda).max(1e-12);
    let mut it = 0;
    while it < p.max_iter && norm(&grad) >= p.tol {
        it += 1;
        let gg: f64 = grad.iter().map(|g| g * g).sum();
        let mut t = step;
        let (new_theta, new_obj, new_grad) = loop {
            let cand: Vec<f64> = theta.iter().zip(&grad).map(|(a, g)| a - t * g).collect();
            let (o, g) = logistic_objective(x, y, p.lambda, &cand);
            if o <= obj - 1e-4 * t * gg || t < 1e-20 {
                break (cand, o, g);
            }
            t /= 2.0;
        };
        let s: Vec<f64> = new_theta.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        if sy > 0.0 {
            step = (ss / sy).min(1e6);
        }
        if new_obj >= obj && ss == 0.0 {
            break;
        }
        theta = new_theta;
        obj = new_obj;
        grad = new_grad;
    }
    let b = theta.pop().expect("bias");
    LogisticFit { grad_norm: norm(&grad), iterations: it, objective: obj, score: LinearScore { w: theta, b } }
}

pub fn fit_logistic(data: &LabeledDataset, p: &LogisticParams) -> LinearModel {
    let (classes, problems) = binary_problems(data);
    let scores = problems.iter().map(|y| fit_binary_logistic(data.x.view(), y, p).score).collect();
    LinearModel { classes, scores }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RidgeParams {
    pub lambda: f64,
}

impl Default for RidgeParams {
    fn default() -> Self {
        RidgeParams { lambda: 1.0 }
    }
}

/// Minimizes ‖Xw + b − y‖² + λ‖w‖² in closed form; the intercept is not
/// penalized (solved on centered data).
pub fn fit_binary_ridge(x: ArrayView2<f64>, y: &[f64], lambda: f64) -> LinearScore {
    let (n, d) = x.dim();
    let mean_x: Vec<f64> = (0..d).map(|j| x.column(j).sum() / n as f64).collect();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let xc = DMatrix::from_fn(n, d, |i, j| x[[i, j]] - mean_x[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - mean_y));
    let mut a = xc.transpose() * &xc;
    for j in 0..d {
        a[(j, j)] += lambda;
    }
    let rhs = xc.transpose() * yc;
    let w = match a.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        // λ = 0 with rank-deficient data: least-norm solution
        None => a.pseudo_inverse(1e-12).map(|p| p * &rhs).unwrap_or_else(|_| DVector::zeros(d)),
    };
    let b = mean_y - w.iter().zip(&mean_x).map(|(a, b)| a * b).sum::<f64>();
    LinearScore { w: w.iter().copied().collect(), b }
}

pub fn fit_ridge(data: &LabeledDataset, p: &RidgeParams) -> LinearModel {
    let (classes, problems) = binary_problems(data);
    let scores = problems.iter().map(|y| fit_binary_ridge(data.x.view(), y, p.lambda)).collect();
    LinearModel { classes, scores }
}
