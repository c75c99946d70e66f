//! Steerable kernel bases for E(2)-equivariant convolutions.
//!
//! The crate covers the planar symmetry groups (`C_N`, `D_N`, `SO(2)`, `O(2)`,
//! a single reflection), their orthogonal representations and decompositions,
//! closed-form and numerically solved kernel bases, sampling on a pixel grid,
//! equivariant convolution and field nonlinearities.
//!
//! Group, representation and oracle code works in `f64`. Sampled bases,
//! feature fields, convolution and nonlinearities are generic over [`Scalar`],
//! with `f64` and `f32` aliases below.

pub mod basis;
pub mod conv;
pub mod error;
pub mod field;
pub mod group;
pub mod linalg;
pub mod nonlinearity;
pub mod oracle;
pub mod representation;
pub mod scalar;
pub mod tensor_io;

pub use error::{Error, Result};
pub use group::{Group, GroupElement};
pub use representation::{IrrepId, Representation};
pub use scalar::Scalar;

pub type Field = field::FeatureField<f64>;
pub type Field32 = field::FeatureField<f32>;
pub type Basis = basis::SteerableBasis<f64>;
pub type Basis32 = basis::SteerableBasis<f32>;
pub type Weights = basis::BlockWeights<f64>;
pub type Weights32 = basis::BlockWeights<f32>;
