use super::asfm::SfmBackend;
use super::asmc::asmc;
use super::cutting_plane::CuttingPlaneOptions;
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, Result};
use crate::influence::PartInfluenceOracle;
use crate::partition::{random_partition, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Rule for the number of parts `ℓ` as a function of `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "parts")]
pub enum PartsPreset {
    /// `ℓ = 384k²`, i.e. `24(k′)²` with `k′ = 4k`.
    #[default]
    Proof,
    /// `ℓ = 192k²`.
    Final,
    /// `ℓ = 3k²`, small enough for subset enumeration at small `k`.
    Desk,
    /// A fixed part count.
    Custom(usize),
}

impl PartsPreset {
    pub fn parts(&self, k: usize) -> usize {
        match *self {
            PartsPreset::Proof => 384 * k * k,
            PartsPreset::Final => 192 * k * k,
            PartsPreset::Desk => 3 * k * k,
            PartsPreset::Custom(ell) => ell,
        }
    }
}

/// Settings of [`parameterized_tolerant_tester`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterizedConfig {
    pub parts: PartsPreset,
    pub backend: SfmBackend,
    /// Failure probability handed to the minimization.
    pub delta: f64,
    pub cutting_plane: CuttingPlaneOptions,
}

impl Default for ParameterizedConfig {
    fn default() -> Self {
        ParameterizedConfig {
            parts: PartsPreset::default(),
            backend: SfmBackend::default(),
            delta: 1.0 / 30.0,
            cutting_plane: CuttingPlaneOptions::default(),
        }
    }
}

/// Verdict and effective parameters of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterizedOutcome {
    pub accept: bool,
    pub ell: usize,
    pub partition: Partition,
    /// `ε` handed to the cardinality-constrained minimization, `ε/4`.
    pub inner_eps: f64,
    pub xi: f64,
    pub nu: f64,
    pub threshold: f64,
    pub queries: u64,
    pub set_queries: u64,
}

/// Accepts (w.p. ≥ 2/3) when `dist(f, J_k) ≤ ε/16`; rejects (w.p. ≥ 2/3) when
/// `dist(f, J_{4k}) > ε`.
///
/// The function is close to a `k`-junta only if some union of `ℓ−k` parts has
/// influence at most `ε/4`, and far from `4k`-juntas only if every union of `ℓ−4k`
/// parts has influence above `ε`; so the minimization runs with `ε/4` and `ξ = ε/4`.
pub fn parameterized_tolerant_tester<R: Rng + ?Sized>(
    oracle: &FunctionOracle<'_>,
    k: usize,
    eps: f64,
    rng: &mut R,
    config: &ParameterizedConfig,
) -> Result<ParameterizedOutcome> {
    if !(eps > 0.0 && eps < 1.0) || k == 0 {
        return Err(invalid(format!(
            "need eps in (0, 1) and k >= 1, got eps = {eps}, k = {k}"
        )));
    }
    let ell = config.parts.parts(k);
    if ell <= k {
        return Err(invalid(format!("part count {ell} must exceed k = {k}")));
    }
    let partition = random_partition(oracle.n(), ell, rng)?;
    let inner_eps = eps / 4.0;
    let xi = inner_eps;
    let start = oracle.queries_used();
    let mut h = PartInfluenceOracle::new(oracle, &partition, ChaCha8Rng::seed_from_u64(rng.gen()));
    let out = asmc(
        &mut h,
        inner_eps,
        config.delta,
        xi,
        k,
        config.backend,
        &config.cutting_plane,
        rng,
    )?;
    Ok(ParameterizedOutcome {
        accept: out.accept,
        ell,
        inner_eps,
        xi,
        nu: out.nu,
        threshold: out.threshold,
        queries: oracle.queries_used() - start,
        set_queries: out.minimization.set_queries,
        partition,
    })
}
