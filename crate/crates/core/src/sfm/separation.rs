use super::lovasz::sorted_order;
use super::SetFunctionOracle;
use crate::bits::BitSet;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Answer of the separation oracle at a query point `x̄`.
#[derive(Clone, Debug, PartialEq)]
pub enum SeparationResult<S> {
    /// `L_g(x̄)` is within `η` of the minimum (with the stated probability).
    AssertNearMin { point: Vec<S> },
    /// Every `z` with `L_g(z) ≤ L_g(x̄)` satisfies `coefficients·z ≤ offset`.
    Halfspace { coefficients: Vec<S>, offset: S },
}

/// Separation result together with the prefix sets that were probed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationOutput<S> {
    pub result: SeparationResult<S>,
    /// `(prefix set, estimated value)` for `∅` and the `ℓ` sorted prefixes.
    pub prefixes: Vec<(BitSet, S)>,
    /// Estimate of `L_g(x̄)` from the probed prefixes.
    pub value_estimate: S,
    pub tau: S,
}

/// `τ = min(η/4ℓ, γ/2ℓ)`.
pub fn separation_tau<S: Scalar>(ell: usize, eta: S, gamma: S) -> S {
    let l = S::of(ell.max(1) as f64);
    (eta / (S::of(4.0) * l)).min(gamma / (S::of(2.0) * l))
}

/// Noisy separation oracle for the Lovász extension of `g` at `x`.
///
/// Probes `g` on `∅` and on each sorted prefix at accuracy `τ²/2` and confidence
/// `δ/(ℓ+1)`. When every marginal is below `τ` in magnitude it asserts near
/// optimality; otherwise it returns the halfspace
/// `{z : ãᵀz ≤ ãᵀx + 2τℓ‖ã‖₂}`.
pub fn separation_oracle<S: Scalar, O: SetFunctionOracle<S> + ?Sized>(
    g: &mut O,
    x: &[S],
    eta: S,
    gamma: S,
    delta: S,
) -> Result<SeparationOutput<S>> {
    let ell = g.ground_size();
    if x.len() != ell {
        return Err(invalid(format!(
            "point has {} coordinates, ground set has {ell}",
            x.len()
        )));
    }
    if x.iter().any(|&v| v < S::zero() || v > S::one()) {
        return Err(invalid("point must lie in the unit cube"));
    }
    let tau = separation_tau(ell, eta, gamma);
    let query_tau = tau * tau / S::of(2.0);
    let query_delta = delta / S::of((ell + 1) as f64);

    let order = sorted_order(x);
    let mut prefix = BitSet::new(ell);
    let mut prev = g.query(&prefix, query_tau, query_delta)?;
    let mut prefixes = vec![(prefix.clone(), prev)];
    let mut a = vec![S::zero(); ell];
    for &i in &order {
        prefix.insert(i);
        let cur = g.query(&prefix, query_tau, query_delta)?;
        a[i] = cur - prev;
        prev = cur;
        prefixes.push((prefix.clone(), cur));
    }
    let ax = a
        .iter()
        .zip(x)
        .fold(S::zero(), |acc, (&ai, &xi)| acc + ai * xi);
    let value_estimate = prefixes[0].1 + ax;

    let result = if a.iter().all(|ai| ai.abs() < tau) {
        SeparationResult::AssertNearMin { point: x.to_vec() }
    } else {
        let norm = a.iter().fold(S::zero(), |acc, &ai| acc + ai * ai).sqrt();
        let offset = ax + S::of(2.0) * tau * S::of(ell as f64) * norm;
        SeparationResult::Halfspace {
            coefficients: a,
            offset,
        }
    };
    Ok(SeparationOutput {
        result,
        prefixes,
        value_estimate,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfm::{lovasz_value, ExactOracle, FnSetFunction};

    #[test]
    fn flat_function_asserts() {
        let mut g = ExactOracle::new(FnSetFunction::new(5, |_: &BitSet| 0.25f64));
        let out = separation_oracle(&mut g, &[0.2, 0.4, 0.6, 0.8, 1.0], 0.1, 0.1, 0.1).unwrap();
        assert!(matches!(out.result, SeparationResult::AssertNearMin { .. }));
        assert_eq!(g.calls(), 6);
    }

    #[test]
    fn modular_function_cuts_and_keeps_lower_points() {
        let f = FnSetFunction::new(4, |s: &BitSet| s.count() as f64);
        let mut g = ExactOracle::new(FnSetFunction::new(4, |s: &BitSet| s.count() as f64));
        let x = [0.4, 0.6, 0.5, 0.3];
        let out = separation_oracle(&mut g, &x, 0.1, 0.1, 0.1).unwrap();
        match out.result {
            SeparationResult::Halfspace {
                coefficients,
                offset,
            } => {
                assert!(coefficients.iter().all(|&c| (c - 1.0).abs() < 1e-12));
                let zero = [0.0; 4];
                assert!(lovasz_value(&f, &zero) <= lovasz_value(&f, &x));
                let lhs: f64 = coefficients.iter().zip(&zero).map(|(a, z)| a * z).sum();
                assert!(lhs <= offset);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }
}
