//! Approximate submodular minimization: set-function oracles, the Lovász extension,
//! the noisy separation oracle, two minimization backends, the cardinality-constrained
//! reduction, and the parameterized junta tester built on top of them.

mod asfm;
mod asmc;
mod cutting_plane;
mod lovasz;
mod separation;
mod tester;

pub use asfm::{asfm_minimize, AsfmOutcome, SfmBackend, EXACT_ENUM_MAX_GROUND};
pub use asmc::{asmc, asmc_threshold, AsmcOutcome, PenalizedFunction};
pub use cutting_plane::CuttingPlaneOptions;
pub use lovasz::{lovasz_level_sets, lovasz_subgradient, lovasz_value, sorted_order};
pub use separation::{separation_oracle, separation_tau, SeparationOutput, SeparationResult};
pub use tester::{
    parameterized_tolerant_tester, ParameterizedConfig, ParameterizedOutcome, PartsPreset,
};

use crate::bits::BitSet;
use crate::error::{JuntaError, Result};
use crate::scalar::Scalar;
use rand::{Rng, RngCore};

/// Randomized access to `h: 2^[ℓ] → ℝ`: each call returns a value within `tau` of
/// `h(set)` with probability at least `1 − delta`, independently of other calls.
pub trait SetFunctionOracle<S: Scalar> {
    fn ground_size(&self) -> usize;
    fn query(&mut self, set: &BitSet, tau: S, delta: S) -> Result<S>;
}

impl<S: Scalar, T: SetFunctionOracle<S> + ?Sized> SetFunctionOracle<S> for &mut T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn query(&mut self, set: &BitSet, tau: S, delta: S) -> Result<S> {
        (**self).query(set, tau, delta)
    }
}

/// A set function with exact values.
pub trait SetFunction<S: Scalar> {
    fn ground_size(&self) -> usize;
    fn value(&self, set: &BitSet) -> S;
}

/// Set function backed by a closure.
pub struct FnSetFunction<F> {
    ell: usize,
    f: F,
}

impl<F> FnSetFunction<F> {
    pub fn new(ell: usize, f: F) -> Self {
        FnSetFunction { ell, f }
    }
}

impl<S: Scalar, F: Fn(&BitSet) -> S> SetFunction<S> for FnSetFunction<F> {
    fn ground_size(&self) -> usize {
        self.ell
    }
    fn value(&self, set: &BitSet) -> S {
        (self.f)(set)
    }
}

/// Set function stored as a table indexed by subset mask (`ℓ <= 24`).
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedSetFunction<S> {
    ell: usize,
    values: Vec<S>,
}

impl<S: Scalar> TabulatedSetFunction<S> {
    pub fn new(ell: usize, values: Vec<S>) -> Result<Self> {
        if ell > 24 {
            return Err(JuntaError::DimensionTooLarge { n: ell, limit: 24 });
        }
        if values.len() != 1 << ell {
            return Err(JuntaError::DimensionMismatch {
                left: values.len(),
                right: 1 << ell,
            });
        }
        Ok(TabulatedSetFunction { ell, values })
    }

    /// Tabulates any exact set function.
    pub fn from_function<G: SetFunction<S> + ?Sized>(g: &G) -> Result<Self> {
        let ell = g.ground_size();
        if ell > 24 {
            return Err(JuntaError::DimensionTooLarge { n: ell, limit: 24 });
        }
        let values = (0..1u64 << ell)
            .map(|m| g.value(&BitSet::from_mask(ell, m)))
            .collect();
        Self::new(ell, values)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Minimum value and the first subset mask attaining it.
    pub fn minimum(&self) -> (S, u64) {
        let mut best = (self.values[0], 0u64);
        for (m, &v) in self.values.iter().enumerate() {
            if v < best.0 {
                best = (v, m as u64);
            }
        }
        best
    }
}

impl<S: Scalar> SetFunction<S> for TabulatedSetFunction<S> {
    fn ground_size(&self) -> usize {
        self.ell
    }
    fn value(&self, set: &BitSet) -> S {
        self.values[set.to_mask() as usize]
    }
}

/// Noiseless oracle: ignores the accuracy arguments.
pub struct ExactOracle<G> {
    g: G,
    calls: u64,
}

impl<G> ExactOracle<G> {
    pub fn new(g: G) -> Self {
        ExactOracle { g, calls: 0 }
    }
    pub fn calls(&self) -> u64 {
        self.calls
    }
    pub fn inner(&self) -> &G {
        &self.g
    }
}

impl<S: Scalar, G: SetFunction<S>> SetFunctionOracle<S> for ExactOracle<G> {
    fn ground_size(&self) -> usize {
        self.g.ground_size()
    }
    fn query(&mut self, set: &BitSet, _tau: S, _delta: S) -> Result<S> {
        self.calls += 1;
        Ok(self.g.value(set))
    }
}

/// Synthetic approximate oracle: with probability `1 − delta` the answer is the exact
/// value plus uniform noise in `(−tau, tau)`; otherwise it is off by `gross_error`
/// in a random direction.
pub struct NoisyOracle<G, R, S> {
    g: G,
    rng: R,
    gross_error: S,
    calls: u64,
}

impl<G, R, S> NoisyOracle<G, R, S> {
    pub fn new(g: G, rng: R, gross_error: S) -> Self {
        NoisyOracle {
            g,
            rng,
            gross_error,
            calls: 0,
        }
    }
    pub fn calls(&self) -> u64 {
        self.calls
    }
}

impl<S: Scalar, G: SetFunction<S>, R: RngCore> SetFunctionOracle<S> for NoisyOracle<G, R, S> {
    fn ground_size(&self) -> usize {
        self.g.ground_size()
    }
    fn query(&mut self, set: &BitSet, tau: S, delta: S) -> Result<S> {
        self.calls += 1;
        let exact = self.g.value(set);
        let fail: f64 = self.rng.gen();
        if fail < delta.as_f64() {
            let sign = if self.rng.gen::<bool>() {
                S::one()
            } else {
                -S::one()
            };
            return Ok(exact + sign * self.gross_error);
        }
        let u: f64 = self.rng.gen_range(-1.0..1.0);
        Ok(exact + tau * S::of(u))
    }
}
