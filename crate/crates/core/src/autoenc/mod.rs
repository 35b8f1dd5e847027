//! Convolutional autoencoder whose 13×13 single-channel bottleneck provides a
//! 169-value dense code per composition.

mod layers;
mod network;
mod resize;
mod train;

pub use layers::{
    conv_backward, conv_forward, conv_output_size, upsample_backward, upsample_forward, Activation, ConvParams,
    Tensor,
};
pub use network::{flatten, NetworkParams, NetworkSpec, PARAMS_FILE_VERSION};
pub use resize::{intensity, resize};
pub use train::{train, AeConfig, EpochLoss, TrainReport};

use crate::scene::Raster;
use rayon::prelude::*;

pub const CODE_LEN: usize = 169;

/// Codes for every raster, one row each.
pub fn encode_all(params: &NetworkParams, rasters: &[&Raster], gray_level: u8) -> Vec<Vec<f64>> {
    let side = params.spec.input_size;
    rasters
        .par_iter()
        .map(|r| params.encode(&resize(r, gray_level, side)))
        .collect()
}

/// `ae_{row}_{col}` names over the code grid.
pub fn column_names(spec: &NetworkSpec) -> Vec<String> {
    let s = spec.code_size();
    let ch = spec.channels.last().copied().unwrap_or(1);
    let mut names = Vec::with_capacity(spec.code_len());
    for c in 0..ch {
        for row in 0..s {
            for col in 0..s {
                names.push(if ch == 1 {
                    format!("ae_{row}_{col}")
                } else {
                    format!("ae_c{c}_{row}_{col}")
                });
            }
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_code_is_13_by_13() {
        let spec = NetworkSpec::default();
        assert_eq!(spec.sizes(), vec![100, 50, 25, 13]);
        assert_eq!(spec.code_len(), CODE_LEN);
        assert_eq!(column_names(&spec).len(), CODE_LEN);
        let p = NetworkParams::init(&spec, 0).unwrap();
        let (code, recon) = p.forward(&vec![0.5; 10_000]);
        assert_eq!(code.len(), CODE_LEN);
        assert_eq!(recon.len(), 10_000);
        assert!(recon.iter().all(|v| v.is_finite()));
    }
}
