use super::params::IsoConfig;
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, JuntaError, Result};
use crate::tradeoff::{rho_tolerant_tester, RhoTesterConfig};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Majority-vote repetitions for confidence `1 − δ`: `2⌈ln(1/δ)⌉ + 1`.
pub fn amplification_reps(delta: f64) -> usize {
    2 * (1.0 / delta).ln().ceil().max(0.0) as usize + 1
}

/// Confidence budget of level `k` in the degree search, `3δ / (2π²(k+1)²)`.
pub fn finder_confidence(delta: f64, k: usize) -> f64 {
    let kp = (k + 1) as f64;
    3.0 * delta / (2.0 * std::f64::consts::PI.powi(2) * kp * kp)
}

/// Result of a majority vote over independent tester runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplifiedOutcome {
    pub accept: bool,
    pub reps: usize,
    pub accepts: usize,
    pub queries: u64,
}

/// Runs the ρ-tolerant tester `reps` times and accepts on a strict majority.
pub fn amplified_rho_tester<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    config: &RhoTesterConfig,
    reps: usize,
    rng: &mut R,
) -> Result<AmplifiedOutcome> {
    if reps == 0 {
        return Err(invalid("reps must be positive"));
    }
    let before = oracle.queries_used();
    let mut accepts = 0;
    for _ in 0..reps {
        accepts += rho_tolerant_tester(oracle, config, rng)?.accept as usize;
    }
    Ok(AmplifiedOutcome {
        accept: 2 * accepts > reps,
        reps,
        accepts,
        queries: oracle.queries_used() - before,
    })
}

/// Outcome of the linear search for the junta degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeOutcome {
    pub k: usize,
    /// `(k, verdict on f, verdict on g)` for every level tried.
    pub levels: Vec<(usize, AmplifiedOutcome, AmplifiedOutcome)>,
    pub queries: u64,
}

/// Tries `k = 0, 1, …, n` and returns the first `k` at which the amplified tester
/// accepts `f` or `g`, or `n` if none does.
pub fn junta_degree_finder<R: RngCore + ?Sized>(
    oracle_f: &FunctionOracle<'_>,
    oracle_g: &FunctionOracle<'_>,
    eps_prime: f64,
    delta: f64,
    config: &IsoConfig,
    rng: &mut R,
) -> Result<DegreeOutcome> {
    config.validate()?;
    let n = oracle_f.n();
    if oracle_g.n() != n {
        return Err(JuntaError::DimensionMismatch {
            left: n,
            right: oracle_g.n(),
        });
    }
    if !(eps_prime > 0.0 && eps_prime < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(invalid("eps_prime and delta must lie in (0, 1)"));
    }
    let mut levels = Vec::new();
    let mut queries = 0;
    for k in 0..=n {
        let tester = RhoTesterConfig {
            eps: eps_prime,
            rho: config.rho,
            k,
            scale: config.estimator_scale,
            gamma: config.gamma,
            parts: Some(config.finder_parts(k)),
        };
        let reps = config
            .reps
            .unwrap_or_else(|| amplification_reps(finder_confidence(delta, k)));
        let on_f = amplified_rho_tester(oracle_f, &tester, reps, rng)?;
        let on_g = amplified_rho_tester(oracle_g, &tester, reps, rng)?;
        queries += on_f.queries + on_g.queries;
        levels.push((k, on_f, on_g));
        if on_f.accept || on_g.accept {
            return Ok(DegreeOutcome { k, levels, queries });
        }
    }
    Ok(DegreeOutcome {
        k: n,
        levels,
        queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{parity, BooleanFunction};
    use crate::tradeoff::BASE_SCALE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn confidence_budget_sums_to_half_delta() {
        let total: f64 = (0..100_000).map(|k| 2.0 * finder_confidence(0.2, k)).sum();
        assert!((total - 0.1).abs() < 1e-5);
        assert_eq!(amplification_reps(0.4), 3);
        assert_eq!(amplification_reps(0.05), 7);
    }

    #[test]
    fn constant_has_degree_zero() {
        let f = BooleanFunction::constant(8, false).unwrap();
        let g = parity(8, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let (of, og) = (FunctionOracle::new(&f), FunctionOracle::new(&g));
        let cfg = IsoConfig {
            estimator_scale: BASE_SCALE / 256.0,
            ..IsoConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = junta_degree_finder(&of, &og, 0.1, 0.1, &cfg, &mut rng).unwrap();
        assert_eq!(out.k, 0);
        assert_eq!(out.queries, of.queries_used() + og.queries_used());
    }

    #[test]
    fn parity_needs_every_coordinate() {
        let f = parity(4, &[0, 1, 2, 3]).unwrap();
        let (of, og) = (FunctionOracle::new(&f), FunctionOracle::new(&f));
        let cfg = IsoConfig {
            estimator_scale: BASE_SCALE / 256.0,
            finder_parts_factor: 4.0,
            reps: Some(3),
            ..IsoConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = junta_degree_finder(&of, &og, 0.2, 0.1, &cfg, &mut rng).unwrap();
        assert_eq!(out.k, 4);
    }
}
