//! Content-adaptive non-local convolution for image fusion.
//!
//! The operator clusters pixels of a feature map by the mean of their local
//! neighborhoods (similarity-relationship partitioning), generates one
//! convolution kernel and bias per cluster from the cluster centroid, and
//! applies that kernel to every member pixel. A hand-written backward pass
//! makes the operator trainable without an autodiff framework; index
//! selection by the cluster map is treated as a constant during
//! backpropagation.
//!
//! The crate is `no_std` + `alloc`: it contains no file or terminal IO. The
//! companion `canconv-cli` crate layers file formats and a command-line
//! interface on top.
//!
//! Module map:
//! - [`numerics`]: dense row-major tensors, the seeded RNG, unfold/pooling,
//!   matrix products, and the byte-level tensor container.
//! - [`srp`]: windowed-mean observations and deterministic k-means producing
//!   the cluster index matrix.
//! - [`pwac`]: partition table, centroids, kernel/bias generation, and the
//!   forward/backward of the partition-wise adaptive convolution.
//! - [`network`]: standard convolutions, resampling, residual blocks, and
//!   the U-shaped fusion network with index-matrix reuse.
//! - [`training`]: L1 loss, Adam, a procedural dataset generator, and the
//!   training loop with periodic cluster-index refresh.
//! - [`metrics`]: spectral-angle, relative-RMSE, and windowed quality-index
//!   measures for fused images.
//! - [`gradcheck`]: finite-difference validation of the analytic gradients.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod gradcheck;
pub mod metrics;
pub mod network;
pub mod numerics;
pub mod pwac;
pub mod srp;
pub mod training;

pub use error::{Error, Result};
pub use numerics::{SeededRng, Tensor};
