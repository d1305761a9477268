use super::estimate::{simultaneous_estimate, SimultaneousEstimate, SimultaneousParams};
use crate::bits::BitSet;
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, Result};
use crate::partition::{random_partition, Partition};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// `1 − 1/√2`.
pub const DEFAULT_RHO: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Smallest sample-count constant covered by the analysis, `256·ln 2`.
pub const BASE_SCALE: f64 = 256.0 * std::f64::consts::LN_2;

/// Settings of [`rho_tolerant_tester`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoTesterConfig {
    pub eps: f64,
    pub rho: f64,
    pub k: usize,
    /// Leading constant of the sample count.
    pub scale: f64,
    pub gamma: f64,
    /// Part count override; `None` uses [`rho_tester_part_count`].
    pub parts: Option<usize>,
}

impl RhoTesterConfig {
    pub fn new(eps: f64, k: usize) -> Self {
        RhoTesterConfig {
            eps,
            rho: DEFAULT_RHO,
            k,
            scale: BASE_SCALE,
            gamma: 0.125,
            parts: None,
        }
    }

    pub fn part_count(&self) -> usize {
        self.parts.unwrap_or_else(|| rho_tester_part_count(self.k))
    }

    /// Acceptance threshold `9ρε/32`.
    pub fn threshold(&self) -> f64 {
        9.0 * self.rho * self.eps / 32.0
    }
}

/// `24k²`, floored at one part.
pub fn rho_tester_part_count(k: usize) -> usize {
    (24 * k * k).max(1)
}

/// Verdict and evidence of one tester run.
#[derive(Clone, Debug)]
pub struct RhoOutcome {
    pub accept: bool,
    /// Accepted index set `J` of size `ℓ − k`.
    pub witness: Option<BitSet>,
    /// Its complement, the `k` parts that may hold relevant variables.
    pub witness_complement: Option<Vec<usize>>,
    pub witness_estimate: Option<f64>,
    pub ell: usize,
    pub m: u64,
    pub threshold: f64,
    pub queries: u64,
    pub partition: Partition,
    pub estimate: SimultaneousEstimate,
}

/// Random partition into `ℓ` parts, one shared probe pool, and acceptance iff some
/// `J` of size `ℓ − k` has estimate at most `9ρε/32`. The lexicographically first
/// such `J` is returned.
pub fn rho_tolerant_tester<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    config: &RhoTesterConfig,
    rng: &mut R,
) -> Result<RhoOutcome> {
    let ell = config.part_count();
    if config.k > ell {
        return Err(invalid(format!(
            "k = {} exceeds the part count {ell}",
            config.k
        )));
    }
    let before = oracle.queries_used();
    let partition = random_partition(oracle.n(), ell, rng)?;
    let params = SimultaneousParams {
        rho: config.rho,
        eps: config.eps,
        gamma: config.gamma,
        k: config.k,
        scale: config.scale,
    };
    let estimate = simultaneous_estimate(oracle, &partition, &params, rng)?;
    let threshold = config.threshold();
    let found = estimate.first_at_most(threshold);
    let (witness, witness_complement, witness_estimate) = match found {
        Some((comp, b)) => {
            let j = BitSet::from_indices(ell, comp.iter().copied()).complement();
            (Some(j), Some(comp), Some(b.value))
        }
        None => (None, None, None),
    };
    Ok(RhoOutcome {
        accept: witness.is_some(),
        witness,
        witness_complement,
        witness_estimate,
        ell,
        m: estimate.samples(),
        threshold,
        queries: oracle.queries_used() - before,
        partition,
        estimate,
    })
}
