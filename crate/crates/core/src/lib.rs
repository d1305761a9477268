//! Tolerant junta testing and tolerant isomorphism testing over explicit Boolean
//! functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`boolfn`]: truth tables, exact metrics, generators and query-counted oracles.
//! * [`influence`]: exact and sampled set-influence.
//! * [`partition`]: random partitions, part-junta predicates and an exhaustive tester.
//! * [`sfm`]: approximate submodular minimization and the parameterized tester.
//! * [`tradeoff`]: ρ-subset influence and the ρ-tolerant tester.
//! * [`iso`]: junta-degree search, noisy core samplers and the isomorphism tester.
//! * [`harness`]: experiment configuration, statistics and reports.
//!
//! Numeric code in [`sfm`] and [`influence`] is generic over [`Scalar`] (`f32` or
//! `f64`); exact quantities use the rational [`Fraction`].

pub mod bits;
pub mod boolfn;
pub mod error;
pub mod harness;
pub mod influence;
pub mod iso;
pub mod partition;
pub mod scalar;
pub mod sfm;
pub mod tradeoff;

pub use error::{JuntaError, Result};
pub use scalar::Scalar;

/// Exact non-negative rational used for distances and exact influences.
pub type Fraction = num_rational::Ratio<u64>;

/// Random generator used throughout the crate.
pub type JuntaRng = rand_chacha::ChaCha8Rng;

/// Double-precision instances of the generic types.
pub type InfluenceEstimate64 = influence::InfluenceEstimate<f64>;
pub type InfluenceEstimate32 = influence::InfluenceEstimate<f32>;
pub type SeparationResult64 = sfm::SeparationResult<f64>;
pub type SeparationResult32 = sfm::SeparationResult<f32>;
pub type AsfmOutcome64 = sfm::AsfmOutcome<f64>;
pub type AsfmOutcome32 = sfm::AsfmOutcome<f32>;
pub type AsmcOutcome64 = sfm::AsmcOutcome<f64>;
pub type AsmcOutcome32 = sfm::AsmcOutcome<f32>;
pub type TabulatedSetFunction64 = sfm::TabulatedSetFunction<f64>;
pub type TabulatedSetFunction32 = sfm::TabulatedSetFunction<f32>;
