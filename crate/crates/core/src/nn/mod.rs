//! A small layer engine with exact backward passes.
//!
//! Activations are `[batch, time, channels]` tensors stored row-major. Every
//! layer maps the channel axis and keeps the time axis, so a network over
//! 64-frame chunks always produces 64 output frames.
//!
//! The engine is generic over [`Scalar`]: training runs in `f32`, gradient
//! checks run in `f64`.

mod adam;
mod gemm;
mod layer;
mod loss;
mod network;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use layer::{Layer, LayerCache, LayerGrads, LayerSpec, Mode, BN_EPSILON, BN_MOMENTUM};
pub use loss::mse_loss;
pub use network::{Network, NetworkCache};
pub use tensor::{Scalar, Tensor};
