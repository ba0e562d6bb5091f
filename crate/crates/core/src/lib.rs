//! Parsing, scoring, sampling and simulation of layout scripts, plus the
//! synthetic dataset generator.
//!
//! Numeric code is generic over [`scalar::Scalar`] / [`scalar::Real`]; the
//! aliases below fix the common instantiations.

pub mod dataset;
pub mod distributions;
pub mod flexscript;
pub mod metrics;
pub mod scalar;
pub mod sim;

pub use num_rational::Rational64;

pub type StructuralScore = metrics::StructuralScore<f64>;
pub type ExactStructuralScore = metrics::StructuralScore<Rational64>;
pub type SvrWeights = metrics::SvrWeights<f64>;
pub type ExactSvrWeights = metrics::SvrWeights<Rational64>;
pub type SimConfig = sim::SimConfig<f64>;
pub type SimModel = sim::SimModel<f64>;
pub type RunResult = sim::RunResult<f64>;
pub type Sampler = distributions::Sampler<f64>;
