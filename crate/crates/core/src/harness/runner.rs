use super::config::{ExperimentConfig, InstanceSpec, PartnerSpec, TesterKind};
use super::stats::{wilson_interval, WILSON_Z95};
use crate::bits::{binomial, BitSet};
use crate::boolfn::{
    corrupt, dictator, distance_to_junta, majority, parity, planted_junta, random_function,
    table_from_hex, table_to_hex, BooleanFunction, FunctionOracle, JuntaSpec,
};
use crate::error::{JuntaError, Result};
use crate::iso::{tolerant_iso_tester, IsoConfig};
use crate::partition::{
    exhaustive_tester, random_partition, reduction_part_count, PartitionFile, DEFAULT_SET_CAP,
};
use crate::sfm::{parameterized_tolerant_tester, ParameterizedConfig};
use crate::tradeoff::{rho_tolerant_tester, RhoTesterConfig, BASE_SCALE};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Instant;

/// SplitMix64 finalizer applied to `master + (counter+1)·φ`. Counter 0 seeds the
/// instance and counter `t + 1` seeds trial `t`, so a trial's randomness does not
/// depend on which worker runs it.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut z = master.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The functions an experiment runs on.
#[derive(Clone, Debug)]
pub struct Instance {
    pub f: BooleanFunction,
    pub g: Option<BooleanFunction>,
    /// Planted junta behind `f`, when known.
    pub planted: Option<JuntaSpec>,
}

fn generate(
    spec: &InstanceSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(BooleanFunction, Option<JuntaSpec>)> {
    let all =
        |n: usize, vars: &Option<Vec<usize>>| vars.clone().unwrap_or_else(|| (0..n).collect());
    Ok(match spec {
        InstanceSpec::PlantedJunta { n, k, corruption } => {
            let (f, planted) = planted_junta(*n, *k, rng)?;
            (corrupt(&f, *corruption, rng)?, Some(planted))
        }
        InstanceSpec::Parity { n, vars } => (parity(*n, &all(*n, vars))?, None),
        InstanceSpec::Majority { n, vars } => (majority(*n, &all(*n, vars))?, None),
        InstanceSpec::Dictator { n, index } => (dictator(*n, *index)?, None),
        InstanceSpec::Constant { n, plus } => (BooleanFunction::constant(*n, *plus)?, None),
        InstanceSpec::Random { n } => (random_function(*n, rand::Rng::gen(rng))?, None),
        InstanceSpec::Table { n, table_hex } => (table_from_hex(*n, table_hex)?, None),
    })
}

/// Generates the instance from the master seed.
pub fn build_instance(config: &ExperimentConfig) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0));
    let (f, planted) = generate(&config.instance, &mut rng)?;
    let g = match &config.partner {
        None => None,
        Some(PartnerSpec::Same) => Some(f.clone()),
        Some(PartnerSpec::Negated) => Some(f.negate()),
        Some(PartnerSpec::Permuted { corruption }) => {
            let mut pi: Vec<usize> = (0..f.n()).collect();
            pi.shuffle(&mut rng);
            Some(corrupt(&f.permute(&pi)?, *corruption, &mut rng)?)
        }
        Some(PartnerSpec::Instance { instance }) => Some(generate(instance, &mut rng)?.0),
    };
    Ok(Instance { f, g, planted })
}

/// Facts about the generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub planted_relevant: Option<Vec<usize>>,
    /// Exact distance of `f` to `k`-juntas, when cheap to compute.
    pub junta_distance: Option<f64>,
    /// Truth table of `f` for `n ≤ 12`.
    pub table_hex: Option<String>,
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// `None` when the trial ended in an error.
    pub accept: Option<bool>,
    pub queries: u64,
    pub witness: Option<Vec<usize>>,
    pub partition: Option<PartitionFile>,
    pub detail: serde_json::Value,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryStats {
    pub min: u64,
    pub median: f64,
    pub max: u64,
}

impl QueryStats {
    fn of(values: &[u64]) -> Self {
        if values.is_empty() {
            return QueryStats {
                min: 0,
                median: 0.0,
                max: 0,
            };
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let mid = v.len() / 2;
        let median = if v.len() % 2 == 1 {
            v[mid] as f64
        } else {
            (v[mid - 1] + v[mid]) as f64 / 2.0
        };
        QueryStats {
            min: v[0],
            median,
            max: v[v.len() - 1],
        }
    }
}

/// Aggregated result of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub config: ExperimentConfig,
    pub instance: InstanceSummary,
    pub trials: Vec<TrialRecord>,
    pub accepted: usize,
    pub errors: usize,
    /// `accepted / trials`.
    pub acceptance_fraction: f64,
    pub wilson95: (f64, f64),
    pub queries: QueryStats,
    pub wall_time_ms: Option<u64>,
    /// Per-set estimates (ρ-tradeoff) or core samples (isomorphism), one CSV line each.
    #[serde(skip)]
    pub dump_rows: Vec<String>,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV line per trial.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,accept,queries,witness_hex,error\n");
        for t in &self.trials {
            let accept = t.accept.map_or("error".to_string(), |a| a.to_string());
            let witness = match (&t.witness, t.detail.get("ell").and_then(|v| v.as_u64())) {
                (Some(w), Some(ell)) => {
                    BitSet::from_indices(ell as usize, w.iter().copied()).to_hex()
                }
                _ => String::new(),
            };
            let error = t.error.clone().unwrap_or_default().replace(',', ";");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.trial, t.seed, accept, t.queries, witness, error
            ));
        }
        out
    }

    /// Header line for [`TestReport::dump_rows`].
    pub fn dump_header(&self) -> &'static str {
        match self.config.tester {
            TesterKind::Isomorphism => "trial,run,function,point_hex,label",
            _ => "trial,j_hex,count,estimate",
        }
    }
}

struct TrialOutput {
    record: TrialRecord,
    rows: Vec<String>,
}

fn summarize(config: &ExperimentConfig, instance: &Instance) -> Result<InstanceSummary> {
    let f = &instance.f;
    let n = f.n();
    let cheap = binomial(n, config.k).saturating_mul(f.size() as u128) <= 50_000_000;
    let junta_distance = if cheap {
        let d = distance_to_junta(f, config.k)?.distance;
        Some(*d.numer() as f64 / *d.denom() as f64)
    } else {
        None
    };
    Ok(InstanceSummary {
        n,
        planted_relevant: instance.planted.as_ref().map(|s| s.relevant().to_vec()),
        junta_distance,
        table_hex: (n <= 12).then(|| table_to_hex(f)),
    })
}

/// Runs one tester invocation: the oracles for `f` and `g`, the trial RNG, and the
/// record and dump rows to fill in.
type TrialBody<'a> = dyn Fn(
        &FunctionOracle<'_>,
        &FunctionOracle<'_>,
        &mut ChaCha8Rng,
        &mut TrialRecord,
        &mut Vec<String>,
    ) -> Result<()>
    + Sync
    + 'a;

fn builtin_trial(
    config: &ExperimentConfig,
    dump: bool,
    of: &FunctionOracle<'_>,
    og: &FunctionOracle<'_>,
    rng: &mut ChaCha8Rng,
    record: &mut TrialRecord,
    rows: &mut Vec<String>,
) -> Result<()> {
    let trial = record.trial;
    match config.tester {
        TesterKind::Exhaustive => {
            let ell = config
                .parts
                .unwrap_or_else(|| reduction_part_count(config.k));
            let partition = random_partition(of.n(), ell, rng)?;
            let out =
                exhaustive_tester(of, &partition, config.k, config.eps, rng, DEFAULT_SET_CAP)?;
            record.accept = Some(out.accept);
            record.witness = out.witness.map(|w| w.to_vec());
            record.partition = Some(partition.into());
            record.detail = json!({"ell": ell, "sets": out.sets as u64, "samples_per_set": out.samples_per_set});
        }
        TesterKind::Parameterized => {
            let pc = ParameterizedConfig {
                parts: config.parts_preset,
                backend: config.sfm_backend,
                ..ParameterizedConfig::default()
            };
            let out = parameterized_tolerant_tester(of, config.k, config.eps, rng, &pc)?;
            record.accept = Some(out.accept);
            record.detail = json!({
                "ell": out.ell, "nu": out.nu, "threshold": out.threshold,
                "inner_eps": out.inner_eps, "xi": out.xi, "set_queries": out.set_queries,
            });
            record.partition = Some(out.partition.into());
        }
        TesterKind::RhoTradeoff => {
            let rc = RhoTesterConfig {
                eps: config.eps,
                rho: config.rho,
                k: config.k,
                scale: config.scale * BASE_SCALE,
                gamma: 0.125,
                parts: config.parts,
            };
            let out = rho_tolerant_tester(of, &rc, rng)?;
            record.accept = Some(out.accept);
            record.witness = out.witness.as_ref().map(|w| w.to_vec());
            record.detail = json!({
                "ell": out.ell, "m": out.m, "threshold": out.threshold,
                "witness_complement": out.witness_complement, "witness_estimate": out.witness_estimate,
            });
            if dump {
                rows.extend(
                    out.estimate
                        .csv_rows()
                        .into_iter()
                        .map(|r| format!("{trial},{r}")),
                );
            }
            record.partition = Some(out.partition.into());
        }
        TesterKind::Isomorphism => {
            let ic = IsoConfig {
                estimator_scale: config.scale * BASE_SCALE,
                ..config.iso.clone()
            };
            let report = tolerant_iso_tester(of, og, config.eps, config.delta, &ic, rng)?;
            record.accept = match report.verdict {
                crate::iso::IsoVerdict::Accept => Some(true),
                crate::iso::IsoVerdict::Reject => Some(false),
                crate::iso::IsoVerdict::Aborted => {
                    return Err(JuntaError::KTooLarge {
                        k: report.k_star,
                        cap: ic.max_k.min(8),
                    })
                }
            };
            if dump {
                for (run, r) in report.runs.iter().enumerate() {
                    rows.extend(
                        r.samples_csv()
                            .into_iter()
                            .map(|line| format!("{trial},{run},{line}")),
                    );
                }
            }
            record.detail = serde_json::to_value(&report).expect("report serializes");
        }
    }
    Ok(())
}

fn run_trial(
    config: &ExperimentConfig,
    instance: &Instance,
    trial: usize,
    body: &TrialBody<'_>,
) -> TrialOutput {
    let seed = derive_seed(config.seed, trial as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = |f| match config.budget {
        Some(b) => FunctionOracle::with_budget(f, b),
        None => FunctionOracle::new(f),
    };
    let of = oracle(&instance.f);
    let g_fn = instance.g.as_ref().unwrap_or(&instance.f);
    let og = oracle(g_fn);
    let mut record = TrialRecord {
        trial,
        seed,
        accept: None,
        queries: 0,
        witness: None,
        partition: None,
        detail: serde_json::Value::Null,
        error: None,
    };
    let mut rows = Vec::new();
    let result = body(&of, &og, &mut rng, &mut record, &mut rows);
    if let Err(e) = result {
        record.accept = None;
        record.error = Some(e.to_string());
    }
    record.queries = of.queries_used()
        + if instance.g.is_some() {
            og.queries_used()
        } else {
            0
        };
    TrialOutput { record, rows }
}

/// [`run_experiment_with`] using every available core and no estimate dump.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TestReport> {
    run_experiment_with(config, false, 0)
}

/// Generates the instance and runs all trials. `workers = 0` uses the available
/// parallelism; results do not depend on the worker count.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    dump: bool,
    workers: usize,
) -> Result<TestReport> {
    let body =
        |of: &FunctionOracle<'_>,
         og: &FunctionOracle<'_>,
         rng: &mut ChaCha8Rng,
         record: &mut TrialRecord,
         rows: &mut Vec<String>| { builtin_trial(config, dump, of, og, rng, record, rows) };
    run_trials(config, workers, &body)
}

/// Runs `tester` in place of the configured tester, for instance a stub when testing
/// aggregation. It receives the oracles for `f` and `g` and the trial RNG and
/// returns the verdict.
pub fn run_experiment_custom<T>(
    config: &ExperimentConfig,
    workers: usize,
    tester: T,
) -> Result<TestReport>
where
    T: Fn(&FunctionOracle<'_>, &FunctionOracle<'_>, &mut ChaCha8Rng) -> Result<bool> + Sync,
{
    let body = |of: &FunctionOracle<'_>,
                og: &FunctionOracle<'_>,
                rng: &mut ChaCha8Rng,
                record: &mut TrialRecord,
                _: &mut Vec<String>| {
        record.accept = Some(tester(of, og, rng)?);
        Ok(())
    };
    run_trials(config, workers, &body)
}

fn run_trials(
    config: &ExperimentConfig,
    workers: usize,
    body: &TrialBody<'_>,
) -> Result<TestReport> {
    config.validate()?;
    let started = Instant::now();
    let instance = build_instance(config)?;
    let summary = summarize(config, &instance)?;
    let workers = if workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        workers
    }
    .clamp(1, config.trials);

    let mut outputs: Vec<TrialOutput> = if workers == 1 {
        (0..config.trials)
            .map(|t| run_trial(config, &instance, t, body))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let instance = &instance;
                    scope.spawn(move || {
                        (w..config.trials)
                            .step_by(workers)
                            .map(|t| run_trial(config, instance, t, body))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("trial worker panicked"))
                .collect()
        })
    };
    outputs.sort_by_key(|o| o.record.trial);

    let accepted = outputs
        .iter()
        .filter(|o| o.record.accept == Some(true))
        .count();
    let errors = outputs.iter().filter(|o| o.record.error.is_some()).count();
    let queries: Vec<u64> = outputs.iter().map(|o| o.record.queries).collect();
    let mut dump_rows = Vec::new();
    let mut trials = Vec::with_capacity(outputs.len());
    for o in outputs {
        dump_rows.extend(o.rows);
        trials.push(o.record);
    }
    Ok(TestReport {
        config: config.clone(),
        instance: summary,
        accepted,
        errors,
        acceptance_fraction: accepted as f64 / config.trials as f64,
        wilson95: wilson_interval(accepted, config.trials, WILSON_Z95),
        queries: QueryStats::of(&queries),
        wall_time_ms: config.timing.then(|| started.elapsed().as_millis() as u64),
        trials,
        dump_rows,
    })
}
