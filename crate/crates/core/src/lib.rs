//! Parametric capacitor electrostatics with learned surrogates.
//!
//! The crate solves the quadrant Laplace problem of a rectangular coaxial
//! capacitor by successive over-relaxation, builds solver-generated corpora
//! over the inner-plate length `d`, and trains dense tanh networks that map
//! `d` straight to a potential field (the boundary-decoder), alongside the
//! autoencoder + latent regression, raw-space regression, coordinate-network
//! and physics-informed baselines.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the experiment harness.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod heatmap;
pub mod inverse;
pub mod linalg;
pub mod models;
pub mod nn;
pub mod rng;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{classify_nodes, CapacitorSpec, GridSpec, NodeClass};
pub use rng::Prng;
pub use scalar::Scalar;
pub use solver::{
    field_volume, laplacian_residual, solve_direct, solve_sor, Field, SolveReport, SolverConfig,
};

pub type CapacitorSpec64 = CapacitorSpec<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type Dataset64 = dataset::Dataset<f64>;
pub type Mlp64 = nn::Mlp<f64>;
pub type Mlp32 = nn::Mlp<f32>;
