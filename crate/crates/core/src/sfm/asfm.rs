use super::cutting_plane::{minimize_lovasz_cp, CuttingPlaneOptions};
use super::SetFunctionOracle;
use crate::bits::BitSet;
use crate::error::{invalid, JuntaError, Result};
use crate::scalar::Scalar;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Largest ground set the enumeration backend accepts.
pub const EXACT_ENUM_MAX_GROUND: usize = 20;

/// Minimization engine used by [`asfm_minimize`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SfmBackend {
    /// Evaluates every subset.
    #[default]
    ExactEnum,
    /// Cutting planes on the Lovász extension driven by the separation oracle.
    LovaszCp,
}

impl FromStr for SfmBackend {
    type Err = JuntaError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-enum" => Ok(SfmBackend::ExactEnum),
            "lovasz-cp" => Ok(SfmBackend::LovaszCp),
            other => Err(invalid(format!("unknown backend {other:?}"))),
        }
    }
}

impl std::fmt::Display for SfmBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SfmBackend::ExactEnum => "exact-enum",
            SfmBackend::LovaszCp => "lovasz-cp",
        })
    }
}

/// Result of an approximate minimization.
#[derive(Clone, Debug, PartialEq)]
pub struct AsfmOutcome<S> {
    /// Estimate of `min_J g(J)`.
    pub value: S,
    /// Set whose estimate produced `value`.
    pub argmin: BitSet,
    /// Number of oracle calls.
    pub set_queries: u64,
    /// Cutting-plane iterations (0 for enumeration).
    pub iterations: usize,
}

/// Returns `ν` with `|ν − min_J g(J)| ≤ ξ` with probability at least `1 − δ`.
///
/// `exact-enum` evaluates all `2^ℓ` subsets at accuracy `ξ/2` and confidence
/// `δ/2^{ℓ+1}`. It also accepts `ξ = 0` for noiseless oracles.
pub fn asfm_minimize<S: Scalar, O: SetFunctionOracle<S> + ?Sized, R: Rng + ?Sized>(
    g: &mut O,
    xi: S,
    delta: S,
    backend: SfmBackend,
    options: &CuttingPlaneOptions,
    rng: &mut R,
) -> Result<AsfmOutcome<S>> {
    if xi < S::zero() || !(delta > S::zero() && delta < S::one()) {
        return Err(invalid("need xi >= 0 and delta in (0, 1)"));
    }
    match backend {
        SfmBackend::ExactEnum => exact_enum(g, xi, delta),
        SfmBackend::LovaszCp => minimize_lovasz_cp(g, xi, delta, options, rng),
    }
}

fn exact_enum<S: Scalar, O: SetFunctionOracle<S> + ?Sized>(
    g: &mut O,
    xi: S,
    delta: S,
) -> Result<AsfmOutcome<S>> {
    let ell = g.ground_size();
    if ell > EXACT_ENUM_MAX_GROUND {
        return Err(JuntaError::DimensionTooLarge {
            n: ell,
            limit: EXACT_ENUM_MAX_GROUND,
        });
    }
    let tau = xi / S::of(2.0);
    let call_delta = delta / S::of(2f64.powi(ell as i32 + 1));
    let mut best: Option<(S, u64)> = None;
    for mask in 0..1u64 << ell {
        let v = g.query(&BitSet::from_mask(ell, mask), tau, call_delta)?;
        if best.map_or(true, |(b, _)| v < b) {
            best = Some((v, mask));
        }
    }
    let (value, mask) = best.expect("at least the empty set");
    Ok(AsfmOutcome {
        value,
        argmin: BitSet::from_mask(ell, mask),
        set_queries: 1 << ell,
        iterations: 0,
    })
}
