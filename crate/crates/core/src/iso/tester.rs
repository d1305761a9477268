use super::degree::{amplification_reps, finder_confidence, junta_degree_finder, DegreeOutcome};
use super::params::{IsoConfig, IsoParams};
use super::sampler::{draw_core_samples, preprocess, CoreSample};
use super::violations::{min_violations, MAX_PERMUTED_K};
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, JuntaError, Result};
use crate::tradeoff::{simultaneous_sample_count, SimultaneousParams};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// One run of the fixed-`k` isomorphism test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GivenKOutcome {
    pub accept: bool,
    pub params: IsoParams,
    /// Whether preprocessing returned a state, for `f` and then `g`. `None` marks a
    /// stage that was skipped after an earlier failure.
    pub preprocessed: (bool, Option<bool>),
    pub min_violations: Option<u64>,
    pub permutation: Option<Vec<usize>>,
    pub queries: u64,
    /// Core samples of `f` and `g`, kept for offline inspection.
    #[serde(skip)]
    pub samples: Option<(Vec<CoreSample>, Vec<CoreSample>)>,
}

impl GivenKOutcome {
    /// CSV lines `function,point_hex,label` for the stored core samples.
    pub fn samples_csv(&self) -> Vec<String> {
        let Some((q_f, q_g)) = &self.samples else {
            return Vec::new();
        };
        let row = |name: &str, s: &CoreSample| format!("{name},{:x},{}", s.point, s.label);
        q_f.iter()
            .map(|s| row("f", s))
            .chain(q_g.iter().map(|s| row("g", s)))
            .collect()
    }
}

/// Preprocesses both functions, draws `s` uniform core samples from each, and
/// accepts iff some permutation of the core coordinates has at most `t` violating
/// pairs.
pub fn iso_test_given_k<R: RngCore + ?Sized>(
    oracle_f: &FunctionOracle<'_>,
    oracle_g: &FunctionOracle<'_>,
    eps: f64,
    k: usize,
    config: &IsoConfig,
    rng: &mut R,
) -> Result<GivenKOutcome> {
    let cap = config.max_k.min(MAX_PERMUTED_K);
    if k > cap {
        return Err(JuntaError::KTooLarge { k, cap });
    }
    if oracle_f.n() != oracle_g.n() {
        return Err(JuntaError::DimensionMismatch {
            left: oracle_f.n(),
            right: oracle_g.n(),
        });
    }
    let params = IsoParams::new(eps, k, config)?;
    let start = oracle_f.queries_used() + oracle_g.queries_used();
    let spent = |start: u64| oracle_f.queries_used() + oracle_g.queries_used() - start;

    let reject = |pre, queries| GivenKOutcome {
        accept: false,
        params: params.clone(),
        preprocessed: pre,
        min_violations: None,
        permutation: None,
        queries,
        samples: None,
    };
    let Some(state_f) = preprocess(oracle_f, params.eps_prime, k, config, rng)? else {
        return Ok(reject((false, None), spent(start)));
    };
    let Some(state_g) = preprocess(oracle_g, params.eps_prime, k, config, rng)? else {
        return Ok(reject((true, Some(false)), spent(start)));
    };
    let q_f = draw_core_samples(&state_f, oracle_f, params.s, rng)?;
    let q_g = draw_core_samples(&state_g, oracle_g, params.s, rng)?;
    let (v, pi) = min_violations(&q_f, &q_g, k)?;
    Ok(GivenKOutcome {
        accept: v as f64 <= params.t,
        params,
        preprocessed: (true, Some(true)),
        min_violations: Some(v),
        permutation: Some(pi),
        queries: spent(start),
        samples: Some((q_f, q_g)),
    })
}

/// Final decision of the end-to-end tester.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsoVerdict {
    Accept,
    Reject,
    /// The discovered degree exceeds the permutation cap.
    Aborted,
}

/// Everything the end-to-end tester measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoReport {
    pub verdict: IsoVerdict,
    pub k_star: usize,
    pub queries_total: u64,
    pub queries_finder: u64,
    pub queries_iso: u64,
    /// Query count predicted for a run that stops its search at `k_star`.
    pub query_bound: u64,
    pub queries_bound_met: bool,
    pub reps: usize,
    pub accept_votes: usize,
    pub eps: f64,
    pub delta: f64,
    pub config: IsoConfig,
    pub params: Option<IsoParams>,
    pub finder: DegreeOutcome,
    pub runs: Vec<GivenKOutcome>,
}

/// Queries spent by a run whose degree search stops at `k_star` and whose
/// preprocessing always succeeds. Every stage draws a fixed number of samples, so
/// this is an exact upper bound on such a run, of order `2^{k*/2}/ε` up to
/// polylogarithmic factors.
pub fn predicted_queries(k_star: usize, eps: f64, delta: f64, config: &IsoConfig) -> Result<u64> {
    let eps_finder = config.c * eps;
    let mut total = 0u64;
    for k in 0..=k_star {
        let params = SimultaneousParams {
            rho: config.rho,
            eps: eps_finder,
            gamma: config.gamma,
            k,
            scale: config.estimator_scale,
        };
        let m = simultaneous_sample_count(config.finder_parts(k), &params);
        let reps = config
            .reps
            .unwrap_or_else(|| amplification_reps(finder_confidence(delta / 2.0, k)));
        total += 2 * reps as u64 * 2 * m;
    }
    if k_star <= config.max_k.min(MAX_PERMUTED_K) {
        let iso = IsoParams::new(eps, k_star, config)?;
        let params = SimultaneousParams {
            rho: config.rho,
            eps: iso.eps_prime,
            gamma: config.gamma,
            k: k_star,
            scale: config.estimator_scale,
        };
        let m = simultaneous_sample_count(config.preprocess_parts(k_star, iso.eps_prime), &params);
        let reps = config
            .reps
            .unwrap_or_else(|| amplification_reps(delta / 2.0));
        total += reps as u64 * (2 * 2 * m + 2 * iso.s);
    }
    Ok(total)
}

/// Degree search at `ε′ = cε` and confidence `δ/2`, then a majority vote over
/// `2⌈ln(2/δ)⌉ + 1` fixed-`k` runs.
pub fn tolerant_iso_tester<R: RngCore + ?Sized>(
    oracle_f: &FunctionOracle<'_>,
    oracle_g: &FunctionOracle<'_>,
    eps: f64,
    delta: f64,
    config: &IsoConfig,
    rng: &mut R,
) -> Result<IsoReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta must lie in (0, 1]"));
    }
    IsoParams::new(eps, 0, config)?;
    let start = oracle_f.queries_used() + oracle_g.queries_used();
    let finder = junta_degree_finder(oracle_f, oracle_g, config.c * eps, delta / 2.0, config, rng)?;
    let k_star = finder.k;
    let reps = config
        .reps
        .unwrap_or_else(|| amplification_reps(delta / 2.0));
    let query_bound = predicted_queries(k_star, eps, delta, config)?;

    let mut report = IsoReport {
        verdict: IsoVerdict::Aborted,
        k_star,
        queries_total: finder.queries,
        queries_finder: finder.queries,
        queries_iso: 0,
        query_bound,
        queries_bound_met: finder.queries <= query_bound,
        reps,
        accept_votes: 0,
        eps,
        delta,
        config: config.clone(),
        params: None,
        finder,
        runs: Vec::new(),
    };
    if k_star > config.max_k.min(MAX_PERMUTED_K) {
        return Ok(report);
    }
    for _ in 0..reps {
        let run = iso_test_given_k(oracle_f, oracle_g, eps, k_star, config, rng)?;
        report.accept_votes += run.accept as usize;
        report.params.get_or_insert_with(|| run.params.clone());
        report.runs.push(run);
    }
    let total = oracle_f.queries_used() + oracle_g.queries_used() - start;
    report.queries_iso = total - report.queries_finder;
    report.queries_total = total;
    report.queries_bound_met = total <= query_bound;
    report.verdict = if 2 * report.accept_votes > reps {
        IsoVerdict::Accept
    } else {
        IsoVerdict::Reject
    };
    Ok(report)
}
