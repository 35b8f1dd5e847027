use super::layers::{
    conv_backward, conv_forward, conv_output_size, upsample_backward, upsample_forward, Activation,
    ConvParams, Tensor,
};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const PARAMS_FILE_VERSION: u32 = 1;

/// Encoder of stride-2 3×3 convolutions and a mirrored decoder of
/// nearest-neighbour upsampling followed by stride-1 convolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// Side of the (single-channel) input image.
    pub input_size: usize,
    /// Output channels of each encoder layer; the last one is the code.
    pub channels: Vec<usize>,
    pub hidden_activation: Activation,
    pub code_activation: Activation,
    pub output_activation: Activation,
}

impl Default for NetworkSpec {
    /// 100×100 → 50 → 25 → 13×13×1.
    fn default() -> Self {
        NetworkSpec {
            input_size: 100,
            channels: vec![8, 8, 1],
            hidden_activation: Activation::Relu,
            code_activation: Activation::Identity,
            output_activation: Activation::Sigmoid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Conv { layer: usize, stride: usize },
    Act(Activation),
    Upsample(usize),
}

impl NetworkSpec {
    /// Spatial size entering each encoder layer, plus the code size.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_size];
        for _ in &self.channels {
            s.push(conv_output_size(*s.last().unwrap(), 2));
        }
        s
    }

    pub fn code_size(&self) -> usize {
        *self.sizes().last().unwrap()
    }

    pub fn code_len(&self) -> usize {
        let s = self.code_size();
        s * s * self.channels.last().copied().unwrap_or(1)
    }

    /// (in, out) channels of every convolution, encoder first.
    fn conv_shapes(&self) -> Vec<(usize, usize)> {
        let mut ins = vec![1];
        ins.extend(&self.channels[..self.channels.len() - 1]);
        let enc: Vec<(usize, usize)> = ins.iter().copied().zip(self.channels.iter().copied()).collect();
        let dec = enc.iter().rev().map(|&(i, o)| (o, i));
        enc.iter().copied().chain(dec).collect()
    }

    fn ops(&self) -> (Vec<Op>, usize) {
        let n = self.channels.len();
        let sizes = self.sizes();
        let mut ops = Vec::new();
        for l in 0..n {
            ops.push(Op::Conv { layer: l, stride: 2 });
            ops.push(Op::Act(if l + 1 == n {
                self.code_activation
            } else {
                self.hidden_activation
            }));
        }
        let code_at = ops.len();
        for (k, l) in (0..n).rev().enumerate() {
            ops.push(Op::Upsample(sizes[l]));
            ops.push(Op::Conv { layer: n + k, stride: 1 });
            ops.push(Op::Act(if l == 0 {
                self.output_activation
            } else {
                self.hidden_activation
            }));
        }
        (ops, code_at)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() || self.channels.contains(&0) || self.input_size == 0 {
            return Err(Error::Config(format!("invalid network spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub version: u32,
    pub spec: NetworkSpec,
    pub convs: Vec<ConvParams>,
}

impl NetworkParams {
    /// Uniform He/Glorot-style initialization from a seeded ChaCha8 stream.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let convs = spec
            .conv_shapes()
            .into_iter()
            .map(|(i, o)| {
                let mut p = ConvParams::zeros(i, o);
                let bound = (6.0 / (9.0 * (i + o) as f64 / 2.0)).sqrt();
                for w in &mut p.weights {
                    *w = rng.random_range(-bound..bound);
                }
                p
            })
            .collect();
        Ok(NetworkParams {
            version: PARAMS_FILE_VERSION,
            spec: spec.clone(),
            convs,
        })
    }

    pub fn zeros_like(&self) -> Vec<ConvParams> {
        self.convs
            .iter()
            .map(|c| ConvParams::zeros(c.in_channels, c.out_channels))
            .collect()
    }

    pub fn num_params(&self) -> usize {
        self.convs.iter().map(ConvParams::len).sum()
    }

    /// Flat view of all parameters (weights then bias, per layer).
    pub fn flat(&self) -> Vec<f64> {
        flatten(&self.convs)
    }

    pub fn set_flat(&mut self, values: &[f64]) {
        let mut it = values.iter().copied();
        for c in &mut self.convs {
            for w in c.weights.iter_mut().chain(c.bias.iter_mut()) {
                *w = it.next().expect("parameter count");
            }
        }
    }

    fn run(&self, image: &Tensor) -> Vec<Tensor> {
        let (ops, _) = self.spec.ops();
        let mut acts = Vec::with_capacity(ops.len() + 1);
        acts.push(image.clone());
        for op in ops {
            let x = acts.last().unwrap();
            let y = match op {
                Op::Conv { layer, stride } => conv_forward(x, &self.convs[layer], stride),
                Op::Act(a) => a.forward(x),
                Op::Upsample(s) => upsample_forward(x, s),
            };
            acts.push(y);
        }
        acts
    }

    /// Code and reconstruction for one image.
    pub fn forward(&self, image: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut acts = self.run(&Tensor::image(self.spec.input_size, image.to_vec()));
        let (_, code_at) = self.spec.ops();
        let recon = acts.pop().unwrap().data;
        (acts.swap_remove(code_at).data, recon)
    }

    pub fn encode(&self, image: &[f64]) -> Vec<f64> {
        let (ops, code_at) = self.spec.ops();
        let mut x = Tensor::image(self.spec.input_size, image.to_vec());
        for op in &ops[..code_at] {
            x = match *op {
                Op::Conv { layer, stride } => conv_forward(&x, &self.convs[layer], stride),
                Op::Act(a) => a.forward(&x),
                Op::Upsample(s) => upsample_forward(&x, s),
            };
        }
        x.data
    }

    /// Mean squared reconstruction error of one image and its gradient.
    pub fn loss_and_gradient(&self, image: &[f64]) -> (f64, Vec<ConvParams>) {
        let (ops, _) = self.spec.ops();
        let acts = self.run(&Tensor::image(self.spec.input_size, image.to_vec()));
        let out = acts.last().unwrap();
        let n = out.data.len() as f64;
        let loss = out
            .data
            .iter()
            .zip(image)
            .map(|(y, t)| (y - t) * (y - t))
            .sum::<f64>()
            / n;
        let mut grad = Tensor {
            data: out.data.iter().zip(image).map(|(y, t)| 2.0 * (y - t) / n).collect(),
            ..*out
        };
        let mut grads = self.zeros_like();
        for (k, op) in ops.iter().enumerate().rev() {
            let (x, y) = (&acts[k], &acts[k + 1]);
            grad = match *op {
                Op::Conv { layer, stride } => {
                    conv_backward(x, &self.convs[layer], stride, &grad, &mut grads[layer])
                }
                Op::Act(a) => a.backward(x, y, &grad),
                Op::Upsample(_) => upsample_backward(x, &grad),
            };
        }
        (loss, grads)
    }

    pub fn loss(&self, image: &[f64]) -> f64 {
        let (_, recon) = self.forward(image);
        recon.iter().zip(image).map(|(y, t)| (y - t) * (y - t)).sum::<f64>() / image.len() as f64
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).expect("params serialize");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: NetworkParams = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
        if p.version != PARAMS_FILE_VERSION {
            return Err(Error::Config(format!("unsupported params version {}", p.version)));
        }
        Ok(p)
    }
}

pub fn flatten(convs: &[ConvParams]) -> Vec<f64> {
    convs
        .iter()
        .flat_map(|c| c.weights.iter().chain(c.bias.iter()).copied())
        .collect()
}
