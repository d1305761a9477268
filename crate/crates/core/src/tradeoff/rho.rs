use crate::bits::BitSet;
use crate::boolfn::BooleanFunction;
use crate::error::{invalid, JuntaError, Result};
use crate::influence::influence_exact_as;
use crate::partition::Partition;
use crate::scalar::Scalar;
use rand::Rng;

/// Largest `|J|` accepted by [`rho_subset_influence_exact`].
pub const RHO_SUBSET_MAX: usize = 20;

/// Keeps each element of `set` independently with probability `rho`.
pub fn sample_rho_subset<R: Rng + ?Sized>(set: &BitSet, rho: f64, rng: &mut R) -> BitSet {
    let mut out = BitSet::new(set.len());
    for i in set.iter() {
        if rng.gen::<f64>() < rho {
            out.insert(i);
        }
    }
    out
}

/// `Σ_{S⊆J} ρ^{|S|}(1−ρ)^{|J|−|S|} · Inf_f(φ_I(S))`.
pub fn rho_subset_influence_exact<S: Scalar>(
    f: &BooleanFunction,
    partition: &Partition,
    set: &BitSet,
    rho: S,
) -> Result<S> {
    let members = set.to_vec();
    let j = members.len();
    if j > RHO_SUBSET_MAX {
        return Err(JuntaError::CombinatorialBlowup {
            count: 1u128 << j,
            cap: 1u128 << RHO_SUBSET_MAX,
        });
    }
    if !(rho >= S::zero() && rho <= S::one()) {
        return Err(invalid("rho must lie in [0, 1]"));
    }
    let mut total = S::zero();
    for sub in 0..1u32 << j {
        let chosen: Vec<usize> = (0..j)
            .filter(|b| sub >> b & 1 == 1)
            .map(|b| members[b])
            .collect();
        let size = chosen.len() as i32;
        let weight = rho.powi(size) * (S::one() - rho).powi(j as i32 - size);
        if weight == S::zero() {
            continue;
        }
        total = total + weight * influence_exact_as::<S>(f, partition.phi_mask_of(&chosen));
    }
    Ok(total)
}

/// Checks `(ρ/3)·Inf ≤ value ≤ Inf` with additive slack `tol`.
pub fn sandwich_holds(rho: f64, influence: f64, value: f64, tol: f64) -> bool {
    rho / 3.0 * influence <= value + tol && value <= influence + tol
}
