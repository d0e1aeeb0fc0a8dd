//! Finite-dimensional measurement models under additive conservation laws.
//!
//! The crate computes the noise of an indirect measurement exactly, evaluates
//! the uncertainty-relation bounds that a conservation law imposes on it, and
//! searches over conservation-respecting interactions to see how close to
//! those bounds a measurement can get. Units have ℏ = 1 throughout, so for a
//! spin-½ readout the error probability equals the mean-square noise.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the scalar.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod optimizer;
pub mod oscillator;
pub mod sampling;
pub mod scalar;
pub mod spin;

pub use bounds::{BoundEvaluator, BoundReport, ConservationPair};
pub use error::{Error, Result};
pub use linalg::{ComplexOperator, Ket, SpectralDecomposition};
pub use measurement::{MeasurementModel, OutcomeDistribution};
pub use optimizer::{CommutantBasis, NoiseProblem, OptimizationRun, OptimizerConfig};
pub use scalar::{Real, C};
pub use spin::YWModel;

pub type Complex64 = C<f64>;
pub type Ket64 = Ket<f64>;
pub type Operator64 = ComplexOperator<f64>;
pub type Model64 = MeasurementModel<f64>;
pub type Pair64 = ConservationPair<f64>;
pub type Report64 = BoundReport<f64>;
pub type YWModel64 = YWModel<f64>;

pub type Complex32 = C<f32>;
pub type Ket32 = Ket<f32>;
pub type Operator32 = ComplexOperator<f32>;
pub type Model32 = MeasurementModel<f32>;
pub type Pair32 = ConservationPair<f32>;
pub type Report32 = BoundReport<f32>;
pub type YWModel32 = YWModel<f32>;
