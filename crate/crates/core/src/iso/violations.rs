use super::sampler::CoreSample;
use crate::error::{JuntaError, Result};

/// Largest `k` whose permutations are enumerated.
pub const MAX_PERMUTED_K: usize = 8;

/// `y` with `y_i = x_{π(i)}`, matching [`crate::boolfn::BooleanFunction::permute`].
pub fn apply_permutation(x: u32, pi: &[usize]) -> u32 {
    pi.iter()
        .enumerate()
        .fold(0u32, |y, (i, &p)| y | (x >> p & 1) << i)
}

/// Heap's algorithm over all permutations of `0..k`; stops when `visit` returns `false`.
pub fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut pi: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    if !visit(&pi) {
        return;
    }
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                pi.swap(0, i);
            } else {
                pi.swap(c[i], i);
            }
            if !visit(&pi) {
                return;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Per-point label counts: `[minus, plus]`.
fn tally(samples: &[CoreSample], k: usize) -> Vec<[u64; 2]> {
    let mut counts = vec![[0u64; 2]; 1 << k];
    for s in samples {
        counts[s.point as usize][(s.label > 0) as usize] += 1;
    }
    counts
}

fn violations_from_tallies(f: &[[u64; 2]], g: &[[u64; 2]], pi: &[usize]) -> u64 {
    f.iter()
        .enumerate()
        .map(|(x, cf)| {
            let cg = &g[apply_permutation(x as u32, pi) as usize];
            cf[0] * cg[1] + cf[1] * cg[0]
        })
        .sum()
}

/// Pairs `((x, a₁), (y, a₂)) ∈ Q_f × Q_g` with `y = π(x)` and `a₁ ≠ a₂`, counted with
/// multiplicity.
pub fn count_violations(q_f: &[CoreSample], q_g: &[CoreSample], pi: &[usize]) -> u64 {
    let k = pi.len();
    violations_from_tallies(&tally(q_f, k), &tally(q_g, k), pi)
}

/// Quadratic reference implementation of [`count_violations`].
pub fn count_violations_brute(q_f: &[CoreSample], q_g: &[CoreSample], pi: &[usize]) -> u64 {
    let mut count = 0;
    for a in q_f {
        for b in q_g {
            if b.point == apply_permutation(a.point, pi) && a.label != b.label {
                count += 1;
            }
        }
    }
    count
}

/// Smallest `V_π` over all permutations of `0..k` with a minimizing `π`.
pub fn min_violations(
    q_f: &[CoreSample],
    q_g: &[CoreSample],
    k: usize,
) -> Result<(u64, Vec<usize>)> {
    if k > MAX_PERMUTED_K {
        return Err(JuntaError::KTooLarge {
            k,
            cap: MAX_PERMUTED_K,
        });
    }
    let (tf, tg) = (tally(q_f, k), tally(q_g, k));
    let mut best = (u64::MAX, Vec::new());
    for_each_permutation(k, |pi| {
        let v = violations_from_tallies(&tf, &tg, pi);
        if v < best.0 {
            best = (v, pi.to_vec());
        }
        best.0 > 0
    });
    Ok(best)
}
