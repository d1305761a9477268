use super::asfm::AsfmOutcome;
use super::separation::{separation_oracle, SeparationResult};
use super::SetFunctionOracle;
use crate::bits::BitSet;
use crate::error::{invalid, JuntaError, Result};
use crate::scalar::Scalar;
use rand::Rng;
use rand_distr::StandardNormal;

/// Tuning of the randomized center-of-gravity loop.
#[derive(Clone, Debug, PartialEq)]
pub struct CuttingPlaneOptions {
    /// Bound `M` on `|g|`; enters the iteration cap.
    pub range_bound: f64,
    /// The loop runs at most `⌈factor · ℓ · ln(ℓM/ξ)⌉` iterations.
    pub iteration_factor: f64,
    /// Number of points kept to approximate the centroid of the feasible region.
    pub pool_size: usize,
    /// Hit-and-run steps per replacement point.
    pub walk_steps: usize,
}

impl Default for CuttingPlaneOptions {
    fn default() -> Self {
        CuttingPlaneOptions {
            range_bound: 4.0,
            iteration_factor: 2.5,
            pool_size: 48,
            walk_steps: 4,
        }
    }
}

impl CuttingPlaneOptions {
    pub fn iteration_cap(&self, ell: usize, xi: f64) -> usize {
        let l = ell.max(1) as f64;
        let log = (l * self.range_bound / xi).ln().max(1.0);
        (self.iteration_factor * l * log).ceil() as usize
    }
}

struct Cut<S> {
    a: Vec<S>,
    b: S,
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

fn feasible<S: Scalar>(p: &[S], cuts: &[Cut<S>]) -> bool {
    cuts.iter().all(|c| dot(&c.a, p) <= c.b)
}

/// One hit-and-run step inside `[0,1]^ℓ ∩ cuts`.
fn hit_and_run_step<S: Scalar, R: Rng + ?Sized>(p: &mut [S], cuts: &[Cut<S>], rng: &mut R) {
    let d: Vec<S> = (0..p.len())
        .map(|_| S::of(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let mut lo = S::neg_infinity();
    let mut hi = S::infinity();
    for (&pi, &di) in p.iter().zip(&d) {
        if di > S::zero() {
            lo = lo.max(-pi / di);
            hi = hi.min((S::one() - pi) / di);
        } else if di < S::zero() {
            lo = lo.max((S::one() - pi) / di);
            hi = hi.min(-pi / di);
        }
    }
    for c in cuts {
        let ad = dot(&c.a, &d);
        let slack = c.b - dot(&c.a, p);
        if ad > S::zero() {
            hi = hi.min(slack / ad);
        } else if ad < S::zero() {
            lo = lo.max(slack / ad);
        }
    }
    if !(lo < hi) {
        return;
    }
    let t = lo + (hi - lo) * S::of(rng.gen::<f64>());
    for (pi, &di) in p.iter_mut().zip(&d) {
        *pi = (*pi + t * di).max(S::zero()).min(S::one());
    }
}

/// Minimizes the Lovász extension of `g` over the unit cube with a randomized
/// center-of-gravity cutting-plane loop. Every probed prefix set is remembered; the
/// best one is re-evaluated at accuracy `ξ/4` and returned.
pub(crate) fn minimize_lovasz_cp<S: Scalar, O: SetFunctionOracle<S> + ?Sized, R: Rng + ?Sized>(
    g: &mut O,
    xi: S,
    delta: S,
    options: &CuttingPlaneOptions,
    rng: &mut R,
) -> Result<AsfmOutcome<S>> {
    if !(xi > S::zero()) {
        return Err(invalid("the cutting-plane backend needs xi > 0"));
    }
    let ell = g.ground_size();
    let cap = options.iteration_cap(ell, xi.as_f64());
    let eta = xi / S::of(4.0);
    let gamma = eta;
    let call_delta = delta / S::of(2.0 * cap as f64);
    let pool_size = options.pool_size.max(2);

    let mut pool: Vec<Vec<S>> = (0..pool_size)
        .map(|_| (0..ell).map(|_| S::of(rng.gen::<f64>())).collect())
        .collect();
    let mut cuts: Vec<Cut<S>> = Vec::new();
    let mut best: Option<(S, BitSet)> = None;
    let mut set_queries = 0u64;
    let mut iterations = 0;

    while iterations < cap {
        iterations += 1;
        let mut center = vec![S::zero(); ell];
        for p in &pool {
            for (c, &v) in center.iter_mut().zip(p) {
                *c = *c + v;
            }
        }
        let count = S::of(pool.len() as f64);
        center
            .iter_mut()
            .for_each(|c| *c = (*c / count).max(S::zero()).min(S::one()));

        let out = separation_oracle(g, &center, eta, gamma, call_delta)?;
        set_queries += out.prefixes.len() as u64;
        for (set, value) in out.prefixes {
            if best.as_ref().map_or(true, |(b, _)| value < *b) {
                best = Some((value, set));
            }
        }
        match out.result {
            SeparationResult::AssertNearMin { .. } => break,
            SeparationResult::Halfspace {
                coefficients,
                offset,
            } => {
                cuts.push(Cut {
                    a: coefficients,
                    b: offset,
                });
            }
        }
        pool.retain(|p| feasible(p, &cuts));
        let seeds: Vec<Vec<S>> = if pool.is_empty() {
            vec![center]
        } else {
            pool.clone()
        };
        while pool.len() < pool_size {
            let mut p = seeds[rng.gen_range(0..seeds.len())].clone();
            for _ in 0..options.walk_steps {
                hit_and_run_step(&mut p, &cuts, rng);
            }
            pool.push(p);
        }
    }

    let (_, argmin) = best.ok_or(JuntaError::IterationLimitExceeded { iterations })?;
    let value = g.query(&argmin, xi / S::of(4.0), delta / S::of(2.0))?;
    Ok(AsfmOutcome {
        value,
        argmin,
        set_queries: set_queries + 1,
        iterations,
    })
}
