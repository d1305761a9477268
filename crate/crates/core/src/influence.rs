//! Exact and sampled set-influence, and the approximate set-function oracle built on it.

use crate::bits::{pext32, BitSet};
use crate::boolfn::{BooleanFunction, FunctionOracle};
use crate::error::{invalid, Result};
use crate::partition::Partition;
use crate::scalar::{fraction_to, Scalar};
use crate::sfm::SetFunctionOracle;
use crate::Fraction;
use rand::{Rng, RngCore};

/// Exact `Inf_f(S) = 2·Pr[f(x⊔u) ≠ f(x⊔v)]` for the coordinate mask `set`.
///
/// Each cofactor on the complement contributes `4p(1−p)`, where `p` is its
/// fraction of `+1` values.
pub fn influence_exact(f: &BooleanFunction, set: u32) -> Fraction {
    let n = f.n();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let set = set & full;
    let s = set.count_ones() as usize;
    if s == 0 {
        return Fraction::from_integer(0);
    }
    let rest = !set & full;
    let mut plus = vec![0u32; 1 << (n - s)];
    for x in 0..f.size() as u32 {
        if f.bit(x) {
            plus[pext32(x, rest) as usize] += 1;
        }
    }
    let side = 1u64 << s;
    let num: u64 = plus.iter().map(|&c| 4 * c as u64 * (side - c as u64)).sum();
    Fraction::new(num, 1u64 << (n + s))
}

/// [`influence_exact`] converted to a scalar.
pub fn influence_exact_as<S: Scalar>(f: &BooleanFunction, set: u32) -> S {
    fraction_to(&influence_exact(f, set))
}

/// Output of the sampling estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfluenceEstimate<S> {
    pub value: S,
    pub samples: u64,
    pub tau: S,
    pub delta: S,
}

/// Triples needed for additive accuracy `tau` with failure probability `delta`:
/// Hoeffding on a `{0, 2}`-valued indicator gives `⌈2 ln(2/δ)/τ²⌉`.
pub fn influence_sample_count(tau: f64, delta: f64) -> u64 {
    (2.0 * (2.0 / delta).ln() / (tau * tau)).ceil() as u64
}

/// Monte-Carlo estimate of `Inf_f(S)` using two queries per sampled triple.
pub fn influence_estimate<S: Scalar, R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    set: u32,
    tau: S,
    delta: S,
    rng: &mut R,
) -> Result<InfluenceEstimate<S>> {
    let (t, d) = (tau.as_f64(), delta.as_f64());
    if !(t > 0.0 && t < 1.0 && d > 0.0 && d < 1.0) {
        return Err(invalid(format!("need tau, delta in (0, 1), got {t}, {d}")));
    }
    let m = influence_sample_count(t, d);
    let disagreements = count_disagreements(oracle, set, m, rng)?;
    Ok(InfluenceEstimate {
        value: S::of(2.0 * disagreements as f64 / m as f64),
        samples: m,
        tau,
        delta,
    })
}

/// Draws `m` triples and counts how often `f(x⊔u) ≠ f(x⊔v)`.
pub(crate) fn count_disagreements<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    set: u32,
    m: u64,
    rng: &mut R,
) -> Result<u64> {
    let n = oracle.n();
    let full = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
    let set = set & full;
    let rest = !set & full;
    let mut disagreements = 0u64;
    for _ in 0..m {
        let a = rng.next_u64();
        let x = (a as u32) & rest;
        let u = ((a >> 32) as u32) & set;
        let v = (rng.next_u32()) & set;
        let left = oracle.query(x | u)?;
        let right = oracle.query(x | v)?;
        disagreements += (left != right) as u64;
    }
    Ok(disagreements)
}

/// Approximate oracle for `h(J) = Inf_f(φ_I(J))` over the parts of a partition.
///
/// Every call draws fresh samples; the empty union is answered with 0 and no queries.
pub struct PartInfluenceOracle<'o, 'f, R> {
    oracle: &'o FunctionOracle<'f>,
    partition: &'o Partition,
    rng: R,
    calls: u64,
}

impl<'o, 'f, R: RngCore> PartInfluenceOracle<'o, 'f, R> {
    pub fn new(oracle: &'o FunctionOracle<'f>, partition: &'o Partition, rng: R) -> Self {
        PartInfluenceOracle {
            oracle,
            partition,
            rng,
            calls: 0,
        }
    }

    /// Number of set evaluations answered so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }
}

impl<S: Scalar, R: RngCore> SetFunctionOracle<S> for PartInfluenceOracle<'_, '_, R> {
    fn ground_size(&self) -> usize {
        self.partition.ell()
    }

    fn query(&mut self, set: &BitSet, tau: S, delta: S) -> Result<S> {
        self.calls += 1;
        let mask = self.partition.phi_mask(set);
        if mask == 0 {
            return Ok(S::zero());
        }
        Ok(influence_estimate(self.oracle, mask, tau, delta, &mut self.rng)?.value)
    }
}

/// Convenience: builds a [`PartInfluenceOracle`].
pub fn part_influence_oracle<'o, 'f, R: Rng>(
    oracle: &'o FunctionOracle<'f>,
    partition: &'o Partition,
    rng: R,
) -> PartInfluenceOracle<'o, 'f, R> {
    PartInfluenceOracle::new(oracle, partition, rng)
}
