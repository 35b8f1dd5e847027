//! Square multi-channel tensors and the forward/backward passes of 3×3
//! convolutions (padding 1), nearest-neighbour upsampling and pointwise
//! activations.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub channels: usize,
    pub size: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(channels: usize, size: usize) -> Self {
        Tensor {
            channels,
            size,
            data: vec![0.0; channels * size * size],
        }
    }

    pub fn image(size: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), size * size);
        Tensor {
            channels: 1,
            size,
            data,
        }
    }

    #[inline]
    fn idx(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.size + y) * self.size + x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed through the input `x` and output `y`.
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn forward(self, t: &Tensor) -> Tensor {
        Tensor {
            data: t.data.iter().map(|&x| self.apply(x)).collect(),
            ..*t
        }
    }

    pub fn backward(self, input: &Tensor, output: &Tensor, grad: &Tensor) -> Tensor {
        let data = input
            .data
            .iter()
            .zip(&output.data)
            .zip(&grad.data)
            .map(|((&x, &y), &g)| g * self.derivative(x, y))
            .collect();
        Tensor { data, ..*grad }
    }
}

/// 3×3 kernels, layout `[out][in][ky][kx]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvParams {
    pub in_channels: usize,
    pub out_channels: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvParams {
    pub fn zeros(in_channels: usize, out_channels: usize) -> Self {
        ConvParams {
            in_channels,
            out_channels,
            weights: vec![0.0; out_channels * in_channels * 9],
            bias: vec![0.0; out_channels],
        }
    }

    #[inline]
    fn widx(&self, o: usize, i: usize, ky: usize, kx: usize) -> usize {
        ((o * self.in_channels + i) * 3 + ky) * 3 + kx
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn conv_output_size(size: usize, stride: usize) -> usize {
    (size - 1) / stride + 1
}

/// Maps an output coordinate and kernel tap to an input coordinate.
#[inline]
fn tap(o: usize, stride: usize, k: usize, size: usize) -> Option<usize> {
    let i = (o * stride + k) as isize - 1;
    (i >= 0 && (i as usize) < size).then_some(i as usize)
}

pub fn conv_forward(input: &Tensor, p: &ConvParams, stride: usize) -> Tensor {
    debug_assert_eq!(input.channels, p.in_channels);
    let os = conv_output_size(input.size, stride);
    let mut out = Tensor::zeros(p.out_channels, os);
    for o in 0..p.out_channels {
        let base = out.idx(o, 0, 0);
        out.data[base..base + os * os].fill(p.bias[o]);
        for i in 0..p.in_channels {
            for ky in 0..3 {
                for kx in 0..3 {
                    let w = p.weights[p.widx(o, i, ky, kx)];
                    for y in 0..os {
                        let Some(iy) = tap(y, stride, ky, input.size) else { continue };
                        let orow = out.idx(o, y, 0);
                        let irow = input.idx(i, iy, 0);
                        for x in 0..os {
                            if let Some(ix) = tap(x, stride, kx, input.size) {
                                out.data[orow + x] += w * input.data[irow + ix];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Returns the input gradient and accumulates parameter gradients into `grad`.
pub fn conv_backward(
    input: &Tensor,
    p: &ConvParams,
    stride: usize,
    dout: &Tensor,
    grad: &mut ConvParams,
) -> Tensor {
    let os = dout.size;
    let mut din = Tensor::zeros(input.channels, input.size);
    for o in 0..p.out_channels {
        let base = dout.idx(o, 0, 0);
        grad.bias[o] += dout.data[base..base + os * os].iter().sum::<f64>();
        for i in 0..p.in_channels {
            for ky in 0..3 {
                for kx in 0..3 {
                    let wi = p.widx(o, i, ky, kx);
                    let w = p.weights[wi];
                    let mut gw = 0.0;
                    for y in 0..os {
                        let Some(iy) = tap(y, stride, ky, input.size) else { continue };
                        let orow = dout.idx(o, y, 0);
                        let irow = input.idx(i, iy, 0);
                        for x in 0..os {
                            if let Some(ix) = tap(x, stride, kx, input.size) {
                                let g = dout.data[orow + x];
                                gw += g * input.data[irow + ix];
                                din.data[irow + ix] += w * g;
                            }
                        }
                    }
                    grad.weights[wi] += gw;
                }
            }
        }
    }
    din
}

pub fn upsample_forward(input: &Tensor, size: usize) -> Tensor {
    let mut out = Tensor::zeros(input.channels, size);
    for c in 0..input.channels {
        for y in 0..size {
            let sy = y * input.size / size;
            for x in 0..size {
                let sx = x * input.size / size;
                let o = out.idx(c, y, x);
                out.data[o] = input.data[input.idx(c, sy, sx)];
            }
        }
    }
    out
}

pub fn upsample_backward(input: &Tensor, dout: &Tensor) -> Tensor {
    let mut din = Tensor::zeros(input.channels, input.size);
    let size = dout.size;
    for c in 0..input.channels {
        for y in 0..size {
            let sy = y * input.size / size;
            for x in 0..size {
                let sx = x * input.size / size;
                let i = din.idx(c, sy, sx);
                din.data[i] += dout.data[dout.idx(c, y, x)];
            }
        }
    }
    din
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_two_sizes() {
        assert_eq!(conv_output_size(100, 2), 50);
        assert_eq!(conv_output_size(50, 2), 25);
        assert_eq!(conv_output_size(25, 2), 13);
        assert_eq!(conv_output_size(13, 1), 13);
    }

    #[test]
    fn identity_kernel_copies() {
        let mut p = ConvParams::zeros(1, 1);
        p.weights[4] = 1.0;
        let t = Tensor::image(3, (0..9).map(|v| v as f64).collect());
        assert_eq!(conv_forward(&t, &p, 1), t);
    }

    #[test]
    fn upsample_is_nearest() {
        let t = Tensor::image(2, vec![1.0, 2.0, 3.0, 4.0]);
        let u = upsample_forward(&t, 4);
        assert_eq!(&u.data[..4], &[1.0, 1.0, 2.0, 2.0]);
        let back = upsample_backward(&t, &Tensor::image(4, vec![1.0; 16]));
        assert_eq!(back.data, vec![4.0; 4]);
    }
}
