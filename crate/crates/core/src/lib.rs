//! Joint speech enhancement and speaker identification with attention-based
//! multi-task learning.
//!
//! The crate is organized as a small pipeline:
//!
//! - [`dsp`]: STFT analysis/synthesis, log-power-spectral features, context
//!   expansion.
//! - [`autodiff`]: a minimal reverse-mode tape with the dense, LSTM,
//!   activation, and loss primitives the models need, plus Adam.
//! - [`models`]: the five architectures (LSTM-SE, DNN-SI, plain MTL, and the
//!   two attention-gated variants) composed from autodiff primitives.
//! - [`corpus`]: a fully synthetic, self-labeled noisy-dialogue corpus
//!   (speaker synthesis, noise synthesis, SNR mixing, frame labeling).
//! - [`train`]: the training regimes for every variant, including the
//!   iterative schedule and the uncertainty-weighted joint loss.
//! - [`eval`]: segmental SNR, an envelope-correlation intelligibility score,
//!   frame-wise speaker accuracy, and embedding extraction.
//!
//! Everything is deterministic given a seed, and `no_std`-compatible
//! (`alloc` required): disable the default `std` feature for embedded use.
//! File formats, WAV IO, and the command-line front end live in the
//! companion `atm-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod autodiff;
pub mod corpus;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod gradcheck;
pub mod math;
pub mod models;
pub mod rng;
pub mod tensor;
pub mod train;

pub use error::CoreError;
pub use tensor::Tensor;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, CoreError>;
