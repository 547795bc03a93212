//! Sup and growth tail bounds for φ-sub-Gaussian random fields on anisotropic
//! boxes, their instantiation for the stochastic heat equation with
//! fractional noise, and a Gaussian Monte Carlo check of those bounds.
//!
//! The bound layer is generic over [`scalar::Real`] (`f32`, `f64`); the heat
//! constants and the simulator are `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod curve;
pub mod entropy;
pub mod error;
pub mod growth;
pub mod heat;
pub mod metric;
pub mod orlicz;
pub mod quad;
pub mod scalar;
pub mod sim;
pub mod supbound;

pub use curve::{TailCurve, TailPoint};
pub use entropy::{EntropyKernel, EntropySettings, HolderProfile};
pub use error::{Error, Result};
pub use growth::{CellConstants, CellScale, GrowthConstants, GrowthSpec, Partition, SeriesSettings, SeriesSum, Weight};
pub use heat::{NoiseConstants, Rect, SheModel, SheParams, SpectralMeasure};
pub use metric::{AnisotropicBox, Point};
pub use orlicz::{rv_tail_bound, PhiFamily};
pub use scalar::Real;
pub use supbound::{FieldBoundInputs, ThetaOptimum};

pub type PhiFamily64 = PhiFamily<f64>;
pub type PhiFamily32 = PhiFamily<f32>;
pub type Box64 = AnisotropicBox<f64>;
pub type Box32 = AnisotropicBox<f32>;
pub type HolderProfile64 = HolderProfile<f64>;
pub type HolderProfile32 = HolderProfile<f32>;
pub type FieldBoundInputs64 = FieldBoundInputs<f64>;
pub type FieldBoundInputs32 = FieldBoundInputs<f32>;
pub type GrowthSpec64 = GrowthSpec<f64>;
pub type GrowthConstants64 = GrowthConstants<f64>;
