//! Quantifying harmony in generated black/white/gray geometric compositions.
//!
//! The crate covers scene generation and rasterization ([`scene`]),
//! handcrafted features ([`features`]), bag-of-visual-words and convolutional
//! autoencoder features ([`bovw`], [`autoenc`]), preprocessing
//! ([`pipeline`]), rating targets ([`targets`]), classifiers ([`learn`]) and
//! the experiment grid plus rating service ([`harness`]).

pub mod autoenc;
pub mod bovw;
pub mod error;
pub mod features;
pub mod harness;
pub mod learn;
pub mod pipeline;
pub mod scene;
pub mod targets;

pub use error::{Error, Result};
