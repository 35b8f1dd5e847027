use super::data::LabeledDataset;
use crate::targets::ClassLabel;
use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MlpActivation {
    Relu,
    Tanh,
}

impl MlpActivation {
    fn f(self, z: f64) -> f64 {
        match self {
            MlpActivation::Relu => z.max(0.0),
            MlpActivation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output.
    fn df(self, a: f64) -> f64 {
        match self {
            MlpActivation::Relu => if a > 0.0 { 1.0 } else { 0.0 },
            MlpActivation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    /// One or two hidden layer widths.
    pub hidden: Vec<usize>,
    pub activation: MlpActivation,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![64],
            activation: MlpActivation::Relu,
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            epochs: 100,
            l2: 1e-4,
        }
    }
}

/// Dense layer, weights row-major `out × in`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub classes: Vec<ClassLabel>,
    pub activation: MlpActivation,
    pub layers: Vec<Dense>,
    /// Mean training loss per epoch.
    pub loss_history: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn init(sizes: &[usize], activation: MlpActivation, classes: Vec<ClassLabel>, rng: &mut ChaCha8Rng) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let bound = (6.0 / (w[0] + w[1]) as f64).sqrt();
                Dense {
                    inputs: w[0],
                    outputs: w[1],
                    w: (0..w[0] * w[1]).map(|_| rng.random_range(-bound..bound)).collect(),
                    b: vec![0.0; w[1]],
                }
            })
            .collect();
        Mlp { classes, activation, layers, loss_history: Vec::new() }
    }

    /// Activations of every layer; the last entry is the logits.
    fn forward(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![row.to_vec()];
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let input = &acts[l];
            let out: Vec<f64> = (0..layer.outputs)
                .map(|o| {
                    let z = layer.b[o] + layer.w[o * layer.inputs..(o + 1) * layer.inputs].iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
                    if l == last { z } else { self.activation.f(z) }
                })
                .collect();
            acts.push(out);
        }
        acts
    }

    /// Softmax probabilities.
    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        let mut z = self.forward(row).pop().expect("output layer");
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = z.iter_mut().map(|v| { *v = (*v - m).exp(); *v }).sum();
        z.iter_mut().for_each(|v| *v /= s);
        z
    }

    pub fn zero_grads(&self) -> Vec<Dense> {
        self.layers.iter().map(|l| Dense { inputs: l.inputs, outputs: l.outputs, w: vec![0.0; l.w.len()], b: vec![0.0; l.b.len()] }).collect()
    }

    /// Mean cross-entropy plus ½·l2·‖W‖² over `rows`, and its gradient.
    pub fn loss_and_grad(&self, x: ArrayView2<f64>, y: &[usize], rows: &[usize], l2: f64) -> (f64, Vec<Dense>) {
        let mut grads = self.zero_grads();
        let mut loss = 0.0;
        let nl = self.layers.len();
        for &i in rows {
            let row = x.row(i).to_vec();
            let acts = self.forward(&row);
            let z = &acts[nl];
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            loss += lse - z[y[i]];
            let mut delta: Vec<f64> = z.iter().enumerate().map(|(c, v)| (v - lse).exp() - if c == y[i] { 1.0 } else { 0.0 }).collect();
            for l in (0..nl).rev() {
                let layer = &self.layers[l];
                let input = &acts[l];
                let g = &mut grads[l];
                for o in 0..layer.outputs {
                    g.b[o] += delta[o];
                    let gw = &mut g.w[o * layer.inputs..(o + 1) * layer.inputs];
                    gw.iter_mut().zip(input).for_each(|(a, b)| *a += delta[o] * b);
                }
                if l > 0 {
                    delta = (0..layer.inputs)
                        .map(|j| {
                            let back: f64 = (0..layer.outputs).map(|o| layer.w[o * layer.inputs + j] * delta[o]).sum();
                            back * self.activation.df(input[j])
                        })
                        .collect();
                }
            }
        }
        let n = rows.len().max(1) as f64;
        let mut pen = 0.0;
        for (g, l) in grads.iter_mut().zip(&self.layers) {
            for (gw, w) in g.w.iter_mut().zip(&l.w) {
                *gw = *gw / n + l2 * w;
                pen += w * w;
            }
            g.b.iter_mut().for_each(|v| *v /= n);
        }
        (loss / n + 0.5 * l2 * pen, grads)
    }

    pub fn fit(data: &LabeledDataset, p: &MlpParams, seed: u64) -> Self {
        let (classes, y) = data.encode();
        let mut sizes = vec![data.dim()];
        sizes.extend(p.hidden.iter().copied().filter(|&h| h > 0));
        sizes.push(classes.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Mlp::init(&sizes, p.activation, classes, &mut rng);
        let mut velocity = net.zero_grads();
        let mut order: Vec<usize> = (0..data.len()).collect();
        let x = data.x.view();
        for _ in 0..p.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for batch in order.chunks(p.batch_size.max(1)) {
                let (loss, grads) = net.loss_and_grad(x, &y, batch, p.l2);
                total += loss * batch.len() as f64;
                for ((layer, v), g) in net.layers.iter_mut().zip(&mut velocity).zip(&grads) {
                    for ((w, vw), gw) in layer.w.iter_mut().zip(&mut v.w).zip(&g.w) {
                        *vw = p.momentum * *vw - p.learning_rate * gw;
                        *w += *vw;
                    }
                    for ((b, vb), gb) in layer.b.iter_mut().zip(&mut v.b).zip(&g.b) {
                        *vb = p.momentum * *vb - p.learning_rate * gb;
                        *b += *vb;
                    }
                }
            }
            net.loss_history.push(total / data.len() as f64);
        }
        net
    }
}
