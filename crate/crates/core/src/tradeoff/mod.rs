//! ρ-subset influence: biased subset sampling, the simultaneous estimator that reuses
//! one sample pool for every part set, the ρ-tolerant junta tester, and legal covers.

mod covers;
mod estimate;
mod rho;
mod tester;

pub use covers::{build_legal_covers, legal_cover_count, CoverCollection};
pub use estimate::{
    draw_rho_samples, simultaneous_estimate, simultaneous_sample_count, BucketEstimate, RhoSample,
    SimultaneousEstimate, SimultaneousParams,
};
pub use rho::{rho_subset_influence_exact, sample_rho_subset, sandwich_holds, RHO_SUBSET_MAX};
pub use tester::{
    rho_tester_part_count, rho_tolerant_tester, RhoOutcome, RhoTesterConfig, BASE_SCALE,
    DEFAULT_RHO,
};
