//! Boolean functions over {−1,+1}^n as explicit truth tables.
//!
//! A point is an `n`-bit integer whose bit `i` is 1 exactly when `x_i = +1`.
//! Table bit `x` is 1 exactly when `f(x) = +1`.

mod generators;
mod io;
mod metrics;
mod oracle;

pub use generators::{
    dictator, majority, parity, planted_junta, random_core_on_all_vars, random_function,
};
pub use io::{function_from_json, function_to_json, table_from_hex, table_to_hex, FunctionFile};
pub use metrics::{
    distance, distance_to_junta, isomorphism_distance, JuntaDistance, ISO_ENUMERATION_CAP,
};
pub use oracle::FunctionOracle;

use crate::bits::pext32;
use crate::error::{invalid, JuntaError, Result};
use rand::seq::index::sample;
use rand::Rng;

/// Truth table of a function `{−1,+1}^n → {−1,+1}` with `n <= 24`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BooleanFunction(n = {}, table = {})",
            self.n,
            table_to_hex(self)
        )
    }
}

impl BooleanFunction {
    pub const MAX_VARS: usize = 24;

    fn check_n(n: usize) -> Result<()> {
        if n > Self::MAX_VARS {
            Err(JuntaError::DimensionTooLarge {
                n,
                limit: Self::MAX_VARS,
            })
        } else {
            Ok(())
        }
    }

    /// Tabulates `value(x)`, where `true` stands for `+1`.
    pub fn from_fn(n: usize, mut value: impl FnMut(u32) -> bool) -> Result<Self> {
        Self::check_n(n)?;
        let size = 1usize << n;
        let mut words = vec![0u64; size.div_ceil(64)];
        for x in 0..size {
            if value(x as u32) {
                words[x / 64] |= 1 << (x % 64);
            }
        }
        Ok(BooleanFunction { n, words })
    }

    /// Constant function with value `+1` when `plus` is set.
    pub fn constant(n: usize, plus: bool) -> Result<Self> {
        Self::from_fn(n, |_| plus)
    }

    /// Builds a function from packed table words (bit `x` of the stream is entry `x`).
    pub fn from_words(n: usize, mut words: Vec<u64>) -> Result<Self> {
        Self::check_n(n)?;
        let size = 1usize << n;
        if words.len() != size.div_ceil(64) {
            return Err(invalid(format!(
                "table for n = {n} needs {} words, got {}",
                size.div_ceil(64),
                words.len()
            )));
        }
        if size < 64 {
            words[0] &= (1u64 << size) - 1;
        }
        Ok(BooleanFunction { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of table entries, `2^n`.
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `true` when `f(x) = +1`.
    #[inline]
    pub fn bit(&self, x: u32) -> bool {
        let x = x as usize;
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    /// The value `f(x) ∈ {−1, +1}`.
    #[inline]
    pub fn value(&self, x: u32) -> i8 {
        if self.bit(x) {
            1
        } else {
            -1
        }
    }

    pub(crate) fn flip(&mut self, x: usize) {
        self.words[x >> 6] ^= 1 << (x & 63);
    }

    /// The function `−f`.
    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        if self.size() < 64 {
            out.words[0] &= (1u64 << self.size()) - 1;
        }
        out
    }

    /// Number of points with value `+1`.
    pub fn count_plus(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The function `x ↦ f(y)` with `y_i = x_{pi[i]}`.
    pub fn permute(&self, pi: &[usize]) -> Result<Self> {
        check_permutation(pi, self.n)?;
        Self::from_fn(self.n, |x| {
            let mut y = 0u32;
            for (i, &p) in pi.iter().enumerate() {
                y |= (x >> p & 1) << i;
            }
            self.bit(y)
        })
    }

    /// Coordinates the function actually depends on, ascending.
    pub fn relevant_variables(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| (0..self.size() as u32).any(|x| self.bit(x) != self.bit(x ^ (1 << i))))
            .collect()
    }
}

pub(crate) fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(JuntaError::DimensionMismatch {
            left: pi.len(),
            right: n,
        });
    }
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || seen[p] {
            return Err(invalid(format!("{pi:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// A junta described by its relevant coordinates and its core function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaSpec {
    relevant: Vec<usize>,
    core: BooleanFunction,
}

impl JuntaSpec {
    /// Core bit `j` reads coordinate `relevant[j]`.
    pub fn new(relevant: Vec<usize>, core: BooleanFunction) -> Result<Self> {
        if relevant.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("relevant indices must be strictly increasing"));
        }
        if relevant.len() != core.n() {
            return Err(JuntaError::DimensionMismatch {
                left: relevant.len(),
                right: core.n(),
            });
        }
        Ok(JuntaSpec { relevant, core })
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn core(&self) -> &BooleanFunction {
        &self.core
    }

    pub fn k(&self) -> usize {
        self.relevant.len()
    }

    /// Bitmask of the relevant coordinates.
    pub fn mask(&self) -> u32 {
        self.relevant.iter().fold(0, |m, &i| m | 1 << i)
    }
}

/// Lifts a junta to a function on `n` coordinates.
pub fn embed_junta(spec: &JuntaSpec, n: usize) -> Result<BooleanFunction> {
    if let Some(&bad) = spec.relevant.iter().find(|&&i| i >= n) {
        return Err(JuntaError::IndexOutOfRange {
            index: bad,
            bound: n,
        });
    }
    let mask = spec.mask();
    BooleanFunction::from_fn(n, |x| spec.core.bit(pext32(x, mask)))
}

/// Flips exactly `⌊delta·2^n⌋` distinct, uniformly chosen table entries.
pub fn corrupt<R: Rng + ?Sized>(
    f: &BooleanFunction,
    delta: f64,
    rng: &mut R,
) -> Result<BooleanFunction> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid(format!("corruption rate {delta} outside [0, 1]")));
    }
    let size = f.size();
    let flips = ((delta * size as f64).floor() as usize).min(size);
    let mut out = f.clone();
    for x in sample(rng, size, flips).into_iter() {
        out.flip(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fraction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_dictator_values() {
        let c = BooleanFunction::constant(3, true).unwrap();
        assert!((0..8).all(|x| c.value(x) == 1));
        let d = dictator(3, 0).unwrap();
        // x_0 = -1 means bit 0 clear
        assert_eq!(d.value(0b110), -1);
        assert_eq!(d.value(0b001), 1);
    }

    #[test]
    fn parity_by_direct_product() {
        let p = parity(2, &[0, 1]).unwrap();
        // (x_0, x_1) = (+1, -1): product is -1
        assert_eq!(p.value(0b01), -1);
        for x in 0..4u32 {
            let prod: i8 = (0..2)
                .map(|i| if x >> i & 1 == 1 { 1 } else { -1 })
                .product();
            assert_eq!(p.value(x), prod);
        }
    }

    #[test]
    fn embed_dictator_and_majority() {
        let core = dictator(1, 0).unwrap();
        let spec = JuntaSpec::new(vec![5], core).unwrap();
        let f = embed_junta(&spec, 8).unwrap();
        assert_eq!(f, dictator(8, 5).unwrap());

        let maj = majority(3, &[0, 1, 2]).unwrap();
        let spec = JuntaSpec::new(vec![0, 3, 7], maj).unwrap();
        let f = embed_junta(&spec, 10).unwrap();
        assert_eq!(f.relevant_variables(), vec![0, 3, 7]);
        assert_eq!(
            distance_to_junta(&f, 3).unwrap().distance,
            Fraction::from_integer(0)
        );

        let bad = JuntaSpec::new(vec![12], dictator(1, 0).unwrap()).unwrap();
        assert!(matches!(
            embed_junta(&bad, 8),
            Err(JuntaError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn corrupt_flips_exact_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_function(10, 3).unwrap();
        let g = corrupt(&f, 0.05, &mut rng).unwrap();
        assert_eq!(distance(&f, &g).unwrap(), Fraction::new(51, 1024));
        assert_eq!(corrupt(&f, 0.0, &mut rng).unwrap(), f);
        assert_eq!(corrupt(&f, 1.0, &mut rng).unwrap(), f.negate());
    }

    #[test]
    fn corrupt_is_deterministic_given_seed() {
        let f = random_function(8, 1).unwrap();
        let a = corrupt(&f, 0.1, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = corrupt(&f, 0.1, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn permute_moves_dictator() {
        let d = dictator(3, 0).unwrap();
        // y_i = x_{pi[i]}, so y_0 = x_2
        let p = d.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p, dictator(3, 2).unwrap());
        assert!(d.permute(&[0, 0, 1]).is_err());
    }

    #[test]
    fn small_tables_mask_unused_bits() {
        let f = BooleanFunction::constant(2, false).unwrap();
        let g = f.negate();
        assert_eq!(g.count_plus(), 4);
        assert_eq!(g.words()[0], 0b1111);
    }
}
