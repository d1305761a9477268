use crate::bits::BitSet;
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, Result};
use crate::partition::{for_each_complement, Partition};
use rand::{Rng, RngCore};

/// One probe: a ρ-biased part set and whether `f` changed when those parts were
/// re-randomized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoSample {
    pub subset: BitSet,
    pub theta: bool,
}

/// Inputs of the simultaneous estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimultaneousParams {
    pub rho: f64,
    pub eps: f64,
    pub gamma: f64,
    pub k: usize,
    /// Leading constant of the sample count.
    pub scale: f64,
}

/// `m = ⌈scale · k · log₂ℓ / (γ² · ε · ρ · (1−ρ)^k)⌉`, with `k` and `log₂ℓ` floored
/// at 1 so that degenerate cases still draw samples.
pub fn simultaneous_sample_count(ell: usize, p: &SimultaneousParams) -> u64 {
    let k = p.k.max(1) as f64;
    let log = (ell.max(2) as f64).log2().max(1.0);
    let denom = p.gamma * p.gamma * p.eps * p.rho * (1.0 - p.rho).powi(p.k as i32);
    (p.scale * k * log / denom).ceil().max(1.0) as u64
}

/// Draws `m` probes, two queries each.
pub fn draw_rho_samples<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    partition: &Partition,
    rho: f64,
    m: u64,
    rng: &mut R,
) -> Result<Vec<RhoSample>> {
    let n = oracle.n();
    let full = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
    let ell = partition.ell();
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let mut subset = BitSet::new(ell);
        let mut mask = 0u32;
        for j in 0..ell {
            if rng.gen::<f64>() < rho {
                subset.insert(j);
                mask |= partition.part_mask(j);
            }
        }
        let x = rng.next_u32() & full;
        let y = (x & !mask) | (rng.next_u32() & mask);
        let theta = oracle.query(x)? != oracle.query(y)?;
        out.push(RhoSample { subset, theta });
    }
    Ok(out)
}

/// Count, disagreement count and estimate for one part set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BucketEstimate {
    /// Probes whose subset avoids the complement.
    pub count: u64,
    /// Of those, probes with `θ = 1`.
    pub theta: u64,
    /// `2·theta/count`, or `+∞` for an empty bucket.
    pub value: f64,
}

impl BucketEstimate {
    fn new(count: u64, theta: u64) -> Self {
        let value = if count == 0 {
            f64::INFINITY
        } else {
            2.0 * theta as f64 / count as f64
        };
        BucketEstimate {
            count,
            theta,
            value,
        }
    }
}

/// The shared probe pool, arranged for fast per-set aggregation.
///
/// The estimate for `J` averages `θ` over probes with `S ⊆ J`, i.e. probes whose
/// subset avoids the complement `J̄`. Since `Pr[θ = 1 | S] = Inf(φ(S))/2`, the
/// average is doubled so it is unbiased for the ρ-subset influence of `J`.
///
/// Probes are stored column-wise: one bit vector per part marking the probes whose
/// subset contains that part. Probes with `θ = 1` occupy the leading words and the
/// rest follow, so a scan can stop as soon as the `θ` count rules a set out.
#[derive(Clone, Debug)]
pub struct SimultaneousEstimate {
    ell: usize,
    k: usize,
    m: u64,
    theta_words: usize,
    valid: Vec<u64>,
    columns: Vec<Vec<u64>>,
}

impl SimultaneousEstimate {
    pub fn from_samples(ell: usize, k: usize, samples: &[RhoSample]) -> Self {
        let ones = samples.iter().filter(|s| s.theta).count();
        let zeros = samples.len() - ones;
        let theta_words = ones.div_ceil(64);
        let total = theta_words + zeros.div_ceil(64);
        let mut valid = vec![0u64; total];
        let mut columns = vec![vec![0u64; total]; ell];
        let (mut next_one, mut next_zero) = (0usize, theta_words * 64);
        for s in samples {
            let pos = if s.theta {
                next_one += 1;
                next_one - 1
            } else {
                next_zero += 1;
                next_zero - 1
            };
            valid[pos / 64] |= 1 << (pos % 64);
            for j in s.subset.iter() {
                columns[j][pos / 64] |= 1 << (pos % 64);
            }
        }
        SimultaneousEstimate {
            ell,
            k,
            m: samples.len() as u64,
            theta_words,
            valid,
            columns,
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of probes in the pool.
    pub fn samples(&self) -> u64 {
        self.m
    }

    /// Oracle queries spent on the pool, always `2m`.
    pub fn queries(&self) -> u64 {
        2 * self.m
    }

    fn bucket_mask(&self, complement: &[usize]) -> Vec<u64> {
        let mut mask = self.valid.clone();
        for &c in complement {
            for (w, col) in mask.iter_mut().zip(&self.columns[c]) {
                *w &= !col;
            }
        }
        mask
    }

    fn counts(&self, mask: &[u64]) -> (u64, u64) {
        let theta: u64 = mask[..self.theta_words]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let zeros: u64 = mask[self.theta_words..]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        (theta + zeros, theta)
    }

    /// Estimate for the set whose complement is `complement`.
    pub fn estimate(&self, complement: &[usize]) -> BucketEstimate {
        let (count, theta) = self.counts(&self.bucket_mask(complement));
        BucketEstimate::new(count, theta)
    }

    /// Visits every set of size `ℓ − k` in lexicographic order of `J`, passing `J̄`.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize], BucketEstimate) -> bool) {
        for_each_complement(self.ell, self.k, |comp| visit(comp, self.estimate(comp)));
    }

    /// First `J` (lexicographic) with estimate at most `threshold`, returned by its
    /// complement. Gives the same answer as scanning [`SimultaneousEstimate::for_each`],
    /// but prunes branches whose `θ` count cannot get low enough.
    pub fn first_at_most(&self, threshold: f64) -> Option<(Vec<usize>, BucketEstimate)> {
        if self.k > self.ell {
            return None;
        }
        let mut search = Search {
            est: self,
            threshold,
            masks: vec![self.valid.clone(); self.k + 1],
            chosen: Vec::with_capacity(self.k),
            found: None,
        };
        if self.k == 0 {
            let b = self.estimate(&[]);
            return (b.count > 0 && b.value <= threshold).then(|| (Vec::new(), b));
        }
        search.descend(0);
        search.found
    }

    /// CSV lines `J-bitmask-hex,count,estimate` for every set of size `ℓ − k`.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        self.for_each(|comp, b| {
            let j = BitSet::from_indices(self.ell, comp.iter().copied()).complement();
            rows.push(format!("{},{},{}", j.to_hex(), b.count, b.value));
            true
        });
        rows
    }
}

struct Search<'a> {
    est: &'a SimultaneousEstimate,
    threshold: f64,
    masks: Vec<Vec<u64>>,
    chosen: Vec<usize>,
    found: Option<(Vec<usize>, BucketEstimate)>,
}

impl Search<'_> {
    /// Largest `θ` count compatible with acceptance given `zeros` probes with `θ = 0`:
    /// `2θ/(θ + zeros) ≤ t` iff `θ(2 − t) ≤ t·zeros`.
    fn theta_cap(&self, zeros: u64) -> u64 {
        if self.threshold >= 2.0 {
            return u64::MAX;
        }
        if self.threshold < 0.0 {
            return 0;
        }
        ((self.threshold * zeros as f64) / (2.0 - self.threshold) + 1e-9).floor() as u64
    }

    fn descend(&mut self, depth: usize) -> bool {
        let est = self.est;
        let (k, ell, tw) = (est.k, est.ell, est.theta_words);
        let low = self.chosen.last().map_or(0, |&c| c + 1);
        let high = ell - (k - depth);
        let mask = std::mem::take(&mut self.masks[depth]);
        let zeros: u64 = mask[tw..].iter().map(|w| w.count_ones() as u64).sum();
        let cap = self.theta_cap(zeros);

        if depth + 1 < k {
            // Every later element is at least `low`; it removes at most its hit count
            // from the current θ count.
            let theta: u64 = mask[..tw].iter().map(|w| w.count_ones() as u64).sum();
            let remaining = k - depth;
            if theta > cap {
                let mut hits: Vec<u64> = (low..ell)
                    .map(|c| {
                        mask[..tw]
                            .iter()
                            .zip(&est.columns[c])
                            .map(|(w, col)| (w & col).count_ones() as u64)
                            .sum()
                    })
                    .collect();
                hits.sort_unstable_by(|a, b| b.cmp(a));
                let removable: u64 = hits.iter().take(remaining).sum();
                if theta.saturating_sub(removable) > cap {
                    self.masks[depth] = mask;
                    return false;
                }
            }
            for c in (low..=high).rev() {
                let next = &mut self.masks[depth + 1];
                for ((n, w), col) in next.iter_mut().zip(&mask).zip(&est.columns[c]) {
                    *n = w & !col;
                }
                self.chosen.push(c);
                let done = self.descend(depth + 1);
                self.chosen.pop();
                if done {
                    self.masks[depth] = mask;
                    return true;
                }
            }
            self.masks[depth] = mask;
            return false;
        }

        for c in (low..=high).rev() {
            let col = &est.columns[c];
            let mut theta = 0u64;
            let mut over = false;
            for (w, cw) in mask[..tw].iter().zip(col) {
                theta += (w & !cw).count_ones() as u64;
                if theta > cap {
                    over = true;
                    break;
                }
            }
            if over {
                continue;
            }
            let rest: u64 = mask[tw..]
                .iter()
                .zip(&col[tw..])
                .map(|(w, cw)| (w & !cw).count_ones() as u64)
                .sum();
            let b = BucketEstimate::new(theta + rest, theta);
            if b.count > 0 && b.value <= self.threshold {
                let mut comp = self.chosen.clone();
                comp.push(c);
                self.found = Some((comp, b));
                self.masks[depth] = mask;
                return true;
            }
        }
        self.masks[depth] = mask;
        false
    }
}

/// Draws the probe pool for `partition` and arranges it for aggregation.
pub fn simultaneous_estimate<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    partition: &Partition,
    params: &SimultaneousParams,
    rng: &mut R,
) -> Result<SimultaneousEstimate> {
    let SimultaneousParams {
        rho,
        eps,
        gamma,
        k,
        scale,
    } = *params;
    if !(rho > 0.0
        && rho < 1.0
        && eps > 0.0
        && eps < 1.0
        && gamma > 0.0
        && gamma < 1.0
        && scale > 0.0)
    {
        return Err(invalid("need rho, eps, gamma in (0, 1) and scale > 0"));
    }
    if k > partition.ell() {
        return Err(invalid(format!(
            "k = {k} exceeds the part count {}",
            partition.ell()
        )));
    }
    let m = simultaneous_sample_count(partition.ell(), params);
    let samples = draw_rho_samples(oracle, partition, rho, m, rng)?;
    Ok(SimultaneousEstimate::from_samples(
        partition.ell(),
        k,
        &samples,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pool(ell: usize, m: usize, rho: f64, p_theta: f64, seed: u64) -> Vec<RhoSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| RhoSample {
                subset: crate::tradeoff::sample_rho_subset(&BitSet::full(ell), rho, &mut rng),
                theta: rng.gen::<f64>() < p_theta,
            })
            .collect()
    }

    /// Independent oracle: direct loop over samples.
    fn brute(samples: &[RhoSample], complement: &[usize]) -> (u64, u64) {
        let mut count = 0;
        let mut theta = 0;
        for s in samples {
            if complement.iter().all(|&c| !s.subset.contains(c)) {
                count += 1;
                theta += s.theta as u64;
            }
        }
        (count, theta)
    }

    #[test]
    fn buckets_match_direct_count() {
        let samples = random_pool(9, 300, 0.3, 0.4, 1);
        let est = SimultaneousEstimate::from_samples(9, 3, &samples);
        let mut visited = 0;
        est.for_each(|comp, b| {
            assert_eq!((b.count, b.theta), brute(&samples, comp));
            visited += 1;
            true
        });
        assert_eq!(visited, 84);
    }

    #[test]
    fn pruned_search_matches_scan() {
        for seed in 0..40 {
            let ell = 7 + (seed as usize % 4);
            let k = 1 + (seed as usize % 3);
            let samples = random_pool(ell, 150, 0.35, 0.15, seed);
            let est = SimultaneousEstimate::from_samples(ell, k, &samples);
            for threshold in [0.0, 0.05, 0.2, 0.4, 1.0] {
                let mut expected = None;
                est.for_each(|comp, b| {
                    if b.count > 0 && b.value <= threshold {
                        expected = Some((comp.to_vec(), b));
                        false
                    } else {
                        true
                    }
                });
                assert_eq!(
                    est.first_at_most(threshold),
                    expected,
                    "seed {seed} t {threshold}"
                );
            }
        }
    }

    #[test]
    fn empty_bucket_is_infinite() {
        let samples = vec![RhoSample {
            subset: BitSet::full(3),
            theta: false,
        }];
        let est = SimultaneousEstimate::from_samples(3, 1, &samples);
        let b = est.estimate(&[0]);
        assert_eq!(b.count, 0);
        assert!(b.value.is_infinite());
        assert_eq!(est.first_at_most(10.0), None);
    }

    #[test]
    fn sample_count_formula() {
        let p = SimultaneousParams {
            rho: 0.5,
            eps: 0.2,
            gamma: 0.125,
            k: 3,
            scale: 1.0,
        };
        let expected = (3.0 * 216f64.log2() / (0.015625 * 0.2 * 0.5 * 0.125)).ceil() as u64;
        assert_eq!(simultaneous_sample_count(216, &p), expected);
    }
}
