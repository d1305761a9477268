//! Partitions of the coordinates into parts, part-junta predicates, and the
//! exhaustive warm-up tester.

use crate::bits::{binomial, BitSet};
use crate::boolfn::{BooleanFunction, FunctionOracle};
use crate::error::{invalid, JuntaError, Result};
use crate::influence::{count_disagreements, influence_exact};
use crate::Fraction;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// Default cap on the number of part sets an exhaustive routine will visit.
pub const DEFAULT_SET_CAP: u128 = 5_000_000;

/// Assignment of each coordinate in `0..n` to one of `ell` parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionFile", into = "PartitionFile")]
pub struct Partition {
    n: usize,
    ell: usize,
    assignment: Vec<usize>,
    masks: Vec<u32>,
}

/// JSON layout of a partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub n: usize,
    pub ell: usize,
    pub assignment: Vec<usize>,
}

impl TryFrom<PartitionFile> for Partition {
    type Error = JuntaError;
    fn try_from(file: PartitionFile) -> Result<Self> {
        Partition::from_assignment(file.n, file.ell, file.assignment)
    }
}

impl From<Partition> for PartitionFile {
    fn from(p: Partition) -> Self {
        PartitionFile {
            n: p.n,
            ell: p.ell,
            assignment: p.assignment,
        }
    }
}

impl Partition {
    pub fn from_assignment(n: usize, ell: usize, assignment: Vec<usize>) -> Result<Self> {
        if ell == 0 {
            return Err(invalid("a partition needs at least one part"));
        }
        if assignment.len() != n {
            return Err(JuntaError::DimensionMismatch {
                left: assignment.len(),
                right: n,
            });
        }
        if let Some(&bad) = assignment.iter().find(|&&p| p >= ell) {
            return Err(JuntaError::IndexOutOfRange {
                index: bad,
                bound: ell,
            });
        }
        let masks = if n <= 32 {
            let mut masks = vec![0u32; ell];
            for (i, &p) in assignment.iter().enumerate() {
                masks[p] |= 1 << i;
            }
            masks
        } else {
            Vec::new()
        };
        Ok(Partition {
            n,
            ell,
            assignment,
            masks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Part holding coordinate `i`.
    pub fn part_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Coordinate mask of part `j` (requires `n <= 32`).
    pub fn part_mask(&self, j: usize) -> u32 {
        self.masks[j]
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.ell];
        for &p in &self.assignment {
            sizes[p] += 1;
        }
        sizes
    }

    /// Coordinates in the union of the parts listed in `parts`.
    pub fn phi(&self, parts: &BitSet) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| parts.contains(self.assignment[i]))
            .collect()
    }

    /// [`Partition::phi`] as a coordinate mask (requires `n <= 32`).
    pub fn phi_mask(&self, parts: &BitSet) -> u32 {
        assert!(self.n <= 32, "coordinate masks need n <= 32");
        parts.iter().fold(0, |m, j| m | self.masks[j])
    }

    /// Coordinate mask of the union of the listed parts.
    pub fn phi_mask_of(&self, parts: &[usize]) -> u32 {
        parts.iter().fold(0, |m, &j| m | self.masks[j])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }
}

/// Assigns every coordinate to an independent uniformly random part.
pub fn random_partition<R: Rng + ?Sized>(n: usize, ell: usize, rng: &mut R) -> Result<Partition> {
    if ell == 0 {
        return Err(invalid("a partition needs at least one part"));
    }
    let assignment = (0..n).map(|_| rng.gen_range(0..ell)).collect();
    Partition::from_assignment(n, ell, assignment)
}

fn check_cap(ell: usize, k: usize, cap: u128) -> Result<u128> {
    if k > ell {
        return Err(invalid(format!("k = {k} exceeds the part count {ell}")));
    }
    let count = binomial(ell, k);
    if count > cap {
        return Err(JuntaError::CombinatorialBlowup { count, cap });
    }
    Ok(count)
}

/// Visits the part sets `J` of size `ℓ − k` in lexicographic order of `J`, passing
/// the complement `J̄` as a sorted slice. Stops when `visit` returns `false`.
///
/// `J` is lexicographically first exactly when `J̄` is lexicographically last, so the
/// complements are produced in decreasing order.
pub fn for_each_complement(ell: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut current = Vec::with_capacity(k);
    fn rec(
        ell: usize,
        k: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == k {
            return visit(current);
        }
        let depth = current.len();
        let low = current.last().map_or(0, |&c| c + 1);
        let high = ell - (k - depth);
        for c in (low..=high).rev() {
            current.push(c);
            let go_on = rec(ell, k, current, visit);
            current.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    if k <= ell {
        rec(ell, k, &mut current, &mut visit);
    }
}

fn complement_set(ell: usize, complement: &[usize]) -> BitSet {
    BitSet::from_indices(ell, complement.iter().copied()).complement()
}

fn at_most(q: &Fraction, bound: f64) -> bool {
    (*q.numer() as f64) <= bound * (*q.denom() as f64)
}

/// First (lexicographic) `J` with `|J| = ℓ − k` and `Inf_f(φ_I(J)) ≤ 2ε`, if any.
pub fn approximates_k_part(
    f: &BooleanFunction,
    partition: &Partition,
    k: usize,
    eps: f64,
    cap: u128,
) -> Result<Option<BitSet>> {
    check_cap(partition.ell(), k, cap)?;
    let mut found = None;
    for_each_complement(partition.ell(), k, |comp| {
        let j = complement_set(partition.ell(), comp);
        if at_most(&influence_exact(f, partition.phi_mask(&j)), 2.0 * eps) {
            found = Some(j);
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// True when every `J` with `|J| = ℓ − k` has `Inf_f(φ_I(J)) > 2ε`.
pub fn violates_k_part(
    f: &BooleanFunction,
    partition: &Partition,
    k: usize,
    eps: f64,
    cap: u128,
) -> Result<bool> {
    Ok(approximates_k_part(f, partition, k, eps, cap)?.is_none())
}

/// Outcome of [`exhaustive_tester`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveOutcome {
    pub accept: bool,
    /// First accepting `J` in lexicographic order.
    pub witness: Option<BitSet>,
    /// Triples drawn per part set.
    pub samples_per_set: u64,
    pub sets: u128,
    pub queries: u64,
}

/// Per-set triple count so that, over `sets` sets, every set with influence at most
/// `4ε/3` estimates at most `3ε/2` and every set above `2ε` estimates above `3ε/2`,
/// with total failure probability at most 1/6.
///
/// Multiplicative Chernoff bounds on the disagreement count give per-set failure
/// `exp(−εm/204)` on the low side and `exp(−εm/32)` on the high side.
pub fn exhaustive_sample_count(sets: u128, eps: f64) -> u64 {
    (204.0 * (6.0 * sets as f64).ln() / eps).ceil() as u64
}

/// Estimates the influence of every union of `ℓ − k` parts and accepts when some
/// estimate is at most `3ε/2`. All sets are estimated, so the query count is
/// exactly `C(ℓ, k) · 2m`.
pub fn exhaustive_tester<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    partition: &Partition,
    k: usize,
    eps: f64,
    rng: &mut R,
    cap: u128,
) -> Result<ExhaustiveOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let sets = check_cap(partition.ell(), k, cap)?;
    let m = exhaustive_sample_count(sets, eps);
    let start = oracle.queries_used();
    let mut witness = None;
    let mut failure = None;
    for_each_complement(partition.ell(), k, |comp| {
        let j = complement_set(partition.ell(), comp);
        match count_disagreements(oracle, partition.phi_mask(&j), m, rng) {
            Ok(d) => {
                let estimate = 2.0 * d as f64 / m as f64;
                if witness.is_none() && estimate <= 1.5 * eps {
                    witness = Some(j);
                }
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ExhaustiveOutcome {
        accept: witness.is_some(),
        witness,
        samples_per_set: m,
        sets,
        queries: oracle.queries_used() - start,
    })
}

/// Part count used by the reduction for a target junta size `k′`.
pub fn reduction_part_count(k_prime: usize) -> usize {
    (24 * k_prime * k_prime).max(1)
}

/// Draws a random partition into `24(k′)²` parts and hands it to `inner`.
pub fn reduce_and_run<R, T>(
    inner: impl FnOnce(&FunctionOracle<'_>, &Partition, usize, f64, &mut R) -> Result<T>,
    oracle: &FunctionOracle<'_>,
    k: usize,
    k_prime: usize,
    eps: f64,
    rng: &mut R,
) -> Result<(T, Partition)>
where
    R: Rng + ?Sized,
{
    let partition = random_partition(oracle.n(), reduction_part_count(k_prime), rng)?;
    let verdict = inner(oracle, &partition, k, eps, rng)?;
    Ok((verdict, partition))
}
