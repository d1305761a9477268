//! Tolerant isomorphism testing when the target is unknown but close to a junta.
//!
//! The pipeline has three stages. A linear search finds the smallest `k` for which
//! either function passes an amplified ρ-tolerant junta test. A noisy sampler then
//! turns each function into labelled samples of its core, drawn through a partition
//! and the parts chosen by an accepting tester run. Finally the two sample sets are
//! compared under every permutation of the `k` core coordinates.

mod degree;
mod params;
mod sampler;
mod tester;
mod violations;

pub use degree::{
    amplification_reps, amplified_rho_tester, finder_confidence, junta_degree_finder,
    AmplifiedOutcome, DegreeOutcome,
};
pub use params::{IsoConfig, IsoParams, C_DEFAULT, EPS0};
pub use sampler::{
    draw_core_sample, draw_core_sample_raw, draw_core_samples, extract, preprocess, sample_di,
    CoreSample, DjMass, SamplerState,
};
pub use tester::{
    iso_test_given_k, predicted_queries, tolerant_iso_tester, GivenKOutcome, IsoReport, IsoVerdict,
};
pub use violations::{
    apply_permutation, count_violations, count_violations_brute, for_each_permutation,
    min_violations, MAX_PERMUTED_K,
};
