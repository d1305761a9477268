//! Self-checks of the library against independent reference computations.
//!
//! Most checks take the influence of a coordinate set from an injected function so
//! that a faulty implementation can be plugged in and caught.

use super::suite::{reference_functions, reference_partitions, SUITE_RHOS};
use crate::bits::{for_each_combination, BitSet};
use crate::boolfn::{
    distance, distance_to_junta, embed_junta, isomorphism_distance, BooleanFunction, FunctionOracle,
};
use crate::influence::{influence_estimate, influence_exact};
use crate::partition::Partition;
use crate::scalar::fraction_to;
use crate::sfm::{lovasz_value, SetFunction, TabulatedSetFunction};
use crate::tradeoff::{
    build_legal_covers, legal_cover_count, rho_tolerant_tester, sandwich_holds,
    simultaneous_estimate, RhoTesterConfig, SimultaneousParams, BASE_SCALE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Deterministic identities only.
    Fast,
    /// Adds statistical checks of the sampling estimators.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// First failing case, if any.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub level: VerifyLevel,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates cases of one named check and keeps the first failure.
struct Check {
    name: &'static str,
    cases: u64,
    failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failure: None,
        }
    }

    fn expect(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.failure.is_none(),
            cases: self.cases,
            failure: self.failure,
        }
    }
}

fn exact(f: &BooleanFunction, set: u32) -> f64 {
    fraction_to(&influence_exact(f, set))
}

/// `2·Pr[f(x⊔u) ≠ f(x⊔v)]` by enumerating every triple.
fn influence_by_triples(f: &BooleanFunction, set: u32) -> f64 {
    let full = (1u32 << f.n()) - 1;
    let rest = !set & full;
    let mut total = 0u64;
    let mut disagree = 0u64;
    let mut x = 0u32;
    loop {
        let mut u = 0u32;
        loop {
            let mut v = 0u32;
            loop {
                total += 1;
                disagree += (f.bit(x | u) != f.bit(x | v)) as u64;
                v = v.wrapping_sub(set) & set;
                if v == 0 {
                    break;
                }
            }
            u = u.wrapping_sub(set) & set;
            if u == 0 {
                break;
            }
        }
        x = x.wrapping_sub(rest) & rest;
        if x == 0 {
            break;
        }
    }
    2.0 * disagree as f64 / total as f64
}

/// `h(J) = Inf(φ(J))` tabulated through the injected influence.
fn part_table(
    f: &BooleanFunction,
    p: &Partition,
    inf: &dyn Fn(&BooleanFunction, u32) -> f64,
) -> Vec<f64> {
    (0..1u64 << p.ell())
        .map(|m| inf(f, p.phi_mask(&BitSet::from_mask(p.ell(), m))))
        .collect()
}

/// `∫₀¹ g({i : x_i ≥ t}) dt`, integrated piecewise over the distinct coordinates.
fn lovasz_by_integral(g: &TabulatedSetFunction<f64>, x: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = x.to_vec();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let t = 0.5 * (w[0] + w[1]);
        let level = BitSet::from_indices(x.len(), (0..x.len()).filter(|&i| x[i] >= t));
        total += (w[1] - w[0]) * g.value(&level);
    }
    total
}

fn plurality_distance_brute(f: &BooleanFunction, k: usize) -> f64 {
    let n = f.n();
    let mut best = f64::INFINITY;
    for_each_combination(n, k, |vars| {
        let mask: u32 = vars.iter().map(|&i| 1u32 << i).sum();
        let mut plus = vec![0u32; 1 << n];
        let mut size = vec![0u32; 1 << n];
        for x in 0..1u32 << n {
            let key = (x & mask) as usize;
            size[key] += 1;
            plus[key] += f.bit(x) as u32;
        }
        let wrong: u32 = plus.iter().zip(&size).map(|(&p, &s)| p.min(s - p)).sum();
        best = best.min(wrong as f64 / (1u32 << n) as f64);
        true
    });
    best
}

/// [`verify_suite_with`] using the library's exact influence.
pub fn verify_suite(level: VerifyLevel) -> VerifySummary {
    verify_suite_with(level, &exact)
}

/// Runs every check, taking `Inf_f(S)` (for a coordinate mask `S`) from `influence`.
pub fn verify_suite_with(
    level: VerifyLevel,
    influence: &dyn Fn(&BooleanFunction, u32) -> f64,
) -> VerifySummary {
    let functions = reference_functions();
    let mut range = Check::new("influence-range");
    let mut agreement = Check::new("influence-agreement");
    let mut monotone = Check::new("monotonicity");
    let mut submodular = Check::new("submodularity");
    let mut sandwich = Check::new("sandwich");
    let mut lovasz = Check::new("lovasz-identities");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for (fi, (name, f)) in functions.iter().enumerate() {
        let n = f.n();
        for set in 0..1u32 << n {
            let v = influence(f, set);
            range.expect((-TOL..=1.0 + TOL).contains(&v), || {
                format!("{name}: Inf({set:#x}) = {v}")
            });
            if n <= 6 {
                let brute = influence_by_triples(f, set);
                agreement.expect((v - brute).abs() <= TOL, || {
                    format!("{name}: Inf({set:#x}) = {v}, triples give {brute}")
                });
            }
        }

        for p in reference_partitions(n, fi as u64) {
            let ell = p.ell();
            let h = part_table(f, &p, influence);
            let full = (1usize << ell) - 1;
            for a in 0..=full {
                for i in (0..ell).filter(|i| a >> i & 1 == 0) {
                    let ai = a | 1 << i;
                    monotone.expect(h[a] <= h[ai] + TOL, || {
                        format!("{name}, ell {ell}: h({a:#x}) > h({ai:#x})")
                    });
                    for j in (i + 1..ell).filter(|j| a >> j & 1 == 0) {
                        let (aj, aij) = (a | 1 << j, a | 1 << i | 1 << j);
                        submodular.expect(h[ai] + h[aj] + TOL >= h[a] + h[aij], || {
                            format!("{name}, ell {ell}: base {a:#x}, elements {i}, {j}")
                        });
                    }
                }
            }

            // ρ-subset influence assembled from the injected table, bounds from exact influence.
            for j_mask in 0..=full {
                let size = j_mask.count_ones() as i32;
                let trusted = exact(f, p.phi_mask(&BitSet::from_mask(ell, j_mask as u64)));
                for &rho in &SUITE_RHOS {
                    let mut value = 0.0;
                    let mut sub = j_mask;
                    loop {
                        let s = sub.count_ones() as i32;
                        value += rho.powi(s) * (1.0 - rho).powi(size - s) * h[sub];
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & j_mask;
                    }
                    sandwich.expect(sandwich_holds(rho, trusted, value, TOL), || {
                        format!("{name}, ell {ell}, J {j_mask:#x}, rho {rho}: value {value}, Inf {trusted}")
                    });
                }
            }

            if ell <= 8 {
                let g = TabulatedSetFunction::new(ell, h.clone()).expect("table size");
                for m in 0..=full {
                    let x: Vec<f64> = (0..ell).map(|i| (m >> i & 1) as f64).collect();
                    let v = lovasz_value(&g, &x);
                    lovasz.expect((v - h[m]).abs() <= TOL, || {
                        format!("{name}: L(1_{m:#x}) = {v}, g = {}", h[m])
                    });
                }
                for _ in 0..4 {
                    let x: Vec<f64> = (0..ell).map(|_| rng.gen::<f64>()).collect();
                    let (v, w) = (lovasz_value(&g, &x), lovasz_by_integral(&g, &x));
                    lovasz.expect((v - w).abs() <= 1e-9, || {
                        format!("{name}: L(x) = {v}, integral {w}")
                    });
                }
            }
        }
    }

    let mut covers = Check::new("covers");
    for j in 1..=8 {
        for s in 1..=j {
            match build_legal_covers(j, s) {
                Ok(c) => covers.expect(
                    c.is_valid() && c.covers.len() as u64 == legal_cover_count(j, s),
                    || format!("j {j}, s {s}: {} covers", c.covers.len()),
                ),
                Err(e) => covers.expect(false, || format!("j {j}, s {s}: {e}")),
            }
        }
    }

    let mut distances = Check::new("distance-oracles");
    for (name, f) in functions.iter().filter(|(_, f)| f.n() <= 6) {
        for k in 0..=f.n().min(3) {
            let d = distance_to_junta(f, k).expect("k <= n");
            let reported: f64 = fraction_to(&d.distance);
            let closest = embed_junta(&d.closest, f.n()).expect("closest junta");
            let realized: f64 = fraction_to(&distance(f, &closest).expect("same n"));
            let brute = plurality_distance_brute(f, k);
            distances.expect(
                reported == realized && (reported - brute).abs() <= TOL,
                || {
                    format!(
                        "{name}, k {k}: reported {reported}, realized {realized}, brute {brute}"
                    )
                },
            );
        }
        let mut pi: Vec<usize> = (0..f.n()).collect();
        pi.reverse();
        let d = isomorphism_distance(f, &f.permute(&pi).expect("permutation")).expect("same n");
        distances.expect(*d.numer() == 0, || {
            format!("{name}: permuted copy at distance {d}")
        });
    }

    let mut recycling = Check::new("query-recycling");
    for (name, f) in functions.iter().filter(|(_, f)| f.n() >= 8) {
        let oracle = FunctionOracle::new(f);
        let config = RhoTesterConfig {
            rho: 0.5,
            scale: BASE_SCALE / 256.0,
            ..RhoTesterConfig::new(0.2, 2)
        };
        match rho_tolerant_tester(&oracle, &config, &mut rng) {
            Ok(out) => recycling.expect(
                out.queries == 2 * out.m && out.estimate.queries() == out.queries,
                || format!("{name}: {} queries for {} probes", out.queries, out.m),
            ),
            Err(e) => recycling.expect(false, || format!("{name}: {e}")),
        }
    }

    let mut checks: Vec<CheckResult> = [
        range, agreement, monotone, submodular, sandwich, lovasz, covers, distances, recycling,
    ]
    .into_iter()
    .map(Check::finish)
    .collect();
    if level == VerifyLevel::Full {
        checks.extend(statistical_checks(&functions, &mut rng));
    }
    VerifySummary {
        level,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn statistical_checks(
    functions: &[(String, BooleanFunction)],
    rng: &mut ChaCha8Rng,
) -> Vec<CheckResult> {
    // Each estimate may miss with probability δ; the check fails only when the miss
    // count is implausible at that rate.
    let mut coverage = Check::new("estimator-coverage");
    let (tau, delta, runs) = (0.1, 0.1, 200u64);
    for (name, f) in functions.iter().filter(|(_, f)| f.n() >= 6).take(6) {
        let oracle = FunctionOracle::new(f);
        let set = 0b1011u32;
        let truth = exact(f, set);
        let misses = (0..runs)
            .filter(|_| {
                let e = influence_estimate::<f64, _>(&oracle, set, tau, delta, rng)
                    .expect("valid parameters");
                (e.value - truth).abs() > tau
            })
            .count();
        let (lo, _) =
            super::stats::wilson_interval(misses, runs as usize, super::stats::WILSON_Z95);
        coverage.expect(lo <= delta, || {
            format!("{name}: {misses}/{runs} estimates off by more than {tau}")
        });
    }

    let mut buckets = Check::new("bucket-estimates");
    for (name, f) in functions.iter().filter(|(_, f)| (7..=9).contains(&f.n())) {
        let partition = crate::partition::random_partition(f.n(), 6, rng).expect("valid partition");
        let oracle = FunctionOracle::new(f);
        let rho = 0.3;
        let params = SimultaneousParams {
            rho,
            eps: 0.5,
            gamma: 0.5,
            k: 2,
            scale: 1000.0,
        };
        let est =
            simultaneous_estimate(&oracle, &partition, &params, rng).expect("valid parameters");
        est.for_each(|comp, b| {
            let j = BitSet::from_indices(6, comp.iter().copied()).complement();
            let truth: f64 = crate::tradeoff::rho_subset_influence_exact(f, &partition, &j, rho)
                .expect("small J");
            let p = (truth / 2.0).clamp(1e-3, 0.5);
            let sd = 2.0 * (p * (1.0 - p) / b.count as f64).sqrt();
            buckets.expect((b.value - truth).abs() <= 6.0 * sd + 1e-3, || {
                format!(
                    "{name}, K {comp:?}: estimate {} vs {truth} from {} probes",
                    b.value, b.count
                )
            });
            true
        });
    }
    vec![coverage.finish(), buckets.finish()]
}
