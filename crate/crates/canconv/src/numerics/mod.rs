//! Dense tensor substrate shared by every other module.
//!
//! Everything is row-major and eagerly evaluated; there are no views or
//! broadcasting. The two scalar types are `f32` (the training default) and
//! `f64` (used by the finite-difference gradient checks).

mod ctn;
mod ops;
mod rng;
mod scalar;
mod tensor;

pub use ctn::{decode_tensor_f32, decode_tensor_f64, encode_tensor, CtnPayload};
pub use ops::{
    fold_accumulate, kron3, matmul, matmul_abt, matmul_atb, mean_pool_window, unfold,
    unfold_strided, UnfoldGeometry,
};
pub use rng::SeededRng;
pub use scalar::Scalar;
pub use tensor::Tensor;
