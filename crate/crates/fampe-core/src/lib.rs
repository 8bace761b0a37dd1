//! Frequency-aware attribution for small differentiable classifiers.
//!
//! The crate is `no_std` (with `alloc`) and splits into four layers:
//!
//! * [`spectral`] — 2-D FFT/DCT machinery, Gaussian frequency masks and the
//!   energy-based cutoff radius.
//! * [`model`] — a minimal differentiable classifier runtime (dense, conv,
//!   relu, pooling) with exact input gradients and an SGD trainer.
//! * [`attribution`] — the FAMPE attribution engine plus integrated-gradients
//!   and all-pass DCT baselines.
//! * [`evaluation`] — insertion/deletion scoring and report aggregation.
//!
//! All randomness flows through counter-based streams ([`rng`]) keyed on
//! `(seed, iteration, variant, channel)`, so every result is reproducible
//! and independent of scheduling order.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod attribution;
pub mod error;
pub mod evaluation;
pub mod model;
pub mod rng;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
