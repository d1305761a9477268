use super::{embed_junta, BooleanFunction, JuntaSpec};
use crate::error::{JuntaError, Result};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_vars(n: usize, vars: &[usize]) -> Result<u32> {
    let mut mask = 0u32;
    for &v in vars {
        if v >= n {
            return Err(JuntaError::IndexOutOfRange { index: v, bound: n });
        }
        mask |= 1 << v;
    }
    Ok(mask)
}

/// Product of the listed coordinates.
pub fn parity(n: usize, vars: &[usize]) -> Result<BooleanFunction> {
    let mask = check_vars(n, vars)?;
    BooleanFunction::from_fn(n, |x| (!x & mask).count_ones() % 2 == 0)
}

/// Sign of the sum of the listed coordinates, with a tie mapped to `+1`.
pub fn majority(n: usize, vars: &[usize]) -> Result<BooleanFunction> {
    let mask = check_vars(n, vars)?;
    let m = vars.len() as u32;
    BooleanFunction::from_fn(n, |x| 2 * (x & mask).count_ones() >= m)
}

/// `f(x) = x_i`.
pub fn dictator(n: usize, i: usize) -> Result<BooleanFunction> {
    let mask = check_vars(n, &[i])?;
    BooleanFunction::from_fn(n, |x| x & mask != 0)
}

/// Uniformly random truth table determined by `seed`.
pub fn random_function(n: usize, seed: u64) -> Result<BooleanFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1usize << n.min(BooleanFunction::MAX_VARS);
    let words = (0..size.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BooleanFunction::from_words(n, words)
}

/// Random function on `k` variables that depends on every one of them.
pub fn random_core_on_all_vars<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<BooleanFunction> {
    loop {
        let size = 1usize << k;
        let words: Vec<u64> = (0..size.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let f = BooleanFunction::from_words(k, words)?;
        if f.relevant_variables().len() == k {
            return Ok(f);
        }
    }
}

/// A `k`-junta on `n` coordinates with a random relevant set and a random core
/// depending on all of its inputs.
pub fn planted_junta<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(BooleanFunction, JuntaSpec)> {
    if k > n {
        return Err(JuntaError::InvalidParameter(format!(
            "k = {k} exceeds n = {n}"
        )));
    }
    let mut relevant = sample(rng, n, k).into_vec();
    relevant.sort_unstable();
    let core = random_core_on_all_vars(k, rng)?;
    let spec = JuntaSpec::new(relevant, core)?;
    Ok((embed_junta(&spec, n)?, spec))
}
