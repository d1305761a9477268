use super::asfm::{asfm_minimize, AsfmOutcome, SfmBackend};
use super::cutting_plane::CuttingPlaneOptions;
use super::SetFunctionOracle;
use crate::bits::BitSet;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use rand::Rng;

/// `h′(J) = h̃(J) − (ε/k)|J|`; the penalty is added without noise.
pub struct PenalizedFunction<'a, S, O: ?Sized> {
    base: &'a mut O,
    eps: S,
    k: usize,
}

impl<'a, S: Scalar, O: SetFunctionOracle<S> + ?Sized> PenalizedFunction<'a, S, O> {
    pub fn new(base: &'a mut O, eps: S, k: usize) -> Self {
        PenalizedFunction { base, eps, k }
    }

    pub fn penalty(&self, size: usize) -> S {
        self.eps / S::of(self.k as f64) * S::of(size as f64)
    }
}

impl<S: Scalar, O: SetFunctionOracle<S> + ?Sized> SetFunctionOracle<S>
    for PenalizedFunction<'_, S, O>
{
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }
    fn query(&mut self, set: &BitSet, tau: S, delta: S) -> Result<S> {
        let v = self.base.query(set, tau, delta)?;
        Ok(v - self.penalty(set.count()))
    }
}

/// Acceptance threshold `(1 − (ℓ−k)/k)·ε + ξ`.
pub fn asmc_threshold<S: Scalar>(ell: usize, k: usize, eps: S, xi: S) -> S {
    let ratio = S::of((ell as f64 - k as f64) / k as f64);
    (S::one() - ratio) * eps + xi
}

/// Verdict and internals of [`asmc`].
#[derive(Clone, Debug, PartialEq)]
pub struct AsmcOutcome<S> {
    pub accept: bool,
    pub nu: S,
    pub threshold: S,
    pub ell: usize,
    pub k: usize,
    pub minimization: AsfmOutcome<S>,
}

/// Decides whether some large set has small `h` by minimizing the penalized function.
///
/// Accepts (w.p. `1−δ`) when some `|J| ≥ ℓ−k` has `h(J) ≤ ε`; rejects (w.p. `1−δ`)
/// when every `|J| ≥ ℓ − 2(1+ξ/ε)k` has `h(J) > 2(ε+ξ)`.
#[allow(clippy::too_many_arguments)]
pub fn asmc<S: Scalar, O: SetFunctionOracle<S> + ?Sized, R: Rng + ?Sized>(
    h: &mut O,
    eps: S,
    delta: S,
    xi: S,
    k: usize,
    backend: SfmBackend,
    options: &CuttingPlaneOptions,
    rng: &mut R,
) -> Result<AsmcOutcome<S>> {
    let ell = h.ground_size();
    if k == 0 || k >= ell {
        return Err(invalid(format!(
            "need 1 <= k < ell, got k = {k}, ell = {ell}"
        )));
    }
    let mut options = options.clone();
    options.range_bound = 4.0 * f64::max(1.0, eps.as_f64() * ell as f64 / (2.0 * k as f64));
    let mut penalized = PenalizedFunction::new(h, eps, k);
    let minimization = asfm_minimize(&mut penalized, xi, delta, backend, &options, rng)?;
    let threshold = asmc_threshold(ell, k, eps, xi);
    let nu = minimization.value;
    Ok(AsmcOutcome {
        accept: nu <= threshold,
        nu,
        threshold,
        ell,
        k,
        minimization,
    })
}
