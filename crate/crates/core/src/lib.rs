//! Core of the autodecompose toolkit.
//!
//! Autodecompose learns two complementary embeddings of an audio chunk without
//! labels. A *source* encoder sees a view whose time structure was scrambled
//! (so only the sound source survives), a *content* encoder sees a view whose
//! spectral shape was stretched and masked (so only the time structure
//! survives), and a decoder must rebuild the original log-mel chunk from the
//! concatenated embeddings. Reconstruction forces each encoder to carry the
//! property its view preserves.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`dsp`]: resampling, band-pass filtering, log-mel spectrograms and chunking
//! - [`augment`]: the source-preserving and content-preserving augmentations
//! - [`nn`]: dense / conv1d / batch-norm layers with exact backward passes, Adam
//! - [`model`]: the dual-encoder/decoder model, training loop, embeddings
//! - [`probe`]: logistic-regression probes, macro-F1, PCA, decomposition reports
//! - [`synth`]: a synthetic corpus with known source and content factors
//!
//! File formats, WAV ingestion and the command-line tool live in the
//! `autodecompose` crate. Enable the `std` feature for runtime SIMD dispatch in
//! the matrix kernels.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod augment;
pub mod dsp;
pub mod model;
pub mod nn;
pub mod probe;
pub mod rng;
pub mod spline;
pub mod synth;

mod error;
mod fft;

pub use error::{Error, Result};
pub use rng::RngStream;
