use super::params::IsoConfig;
use crate::boolfn::FunctionOracle;
use crate::error::{invalid, JuntaError, Result};
use crate::partition::Partition;
use crate::tradeoff::{rho_tolerant_tester, RhoTesterConfig};
use rand::seq::index::sample;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// Partition plus the `k` parts picked by an accepting tester run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateFile", into = "StateFile")]
pub struct SamplerState {
    partition: Partition,
    chosen_parts: Vec<usize>,
    eps: f64,
    mass: DjMass,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StateFile {
    partition: Partition,
    chosen_parts: Vec<usize>,
    eps: f64,
}

impl TryFrom<StateFile> for SamplerState {
    type Error = JuntaError;
    fn try_from(f: StateFile) -> Result<Self> {
        SamplerState::new(f.partition, f.chosen_parts, f.eps)
    }
}

impl From<SamplerState> for StateFile {
    fn from(s: SamplerState) -> Self {
        StateFile {
            partition: s.partition,
            chosen_parts: s.chosen_parts,
            eps: s.eps,
        }
    }
}

impl SamplerState {
    /// Chosen parts are kept in increasing order; core coordinate `j` is the `j`-th.
    pub fn new(partition: Partition, mut chosen_parts: Vec<usize>, eps: f64) -> Result<Self> {
        let ell = partition.ell();
        if ell % 2 != 0 {
            return Err(JuntaError::OddPartCount(ell));
        }
        chosen_parts.sort_unstable();
        chosen_parts.dedup();
        if let Some(&bad) = chosen_parts.iter().find(|&&p| p >= ell) {
            return Err(JuntaError::IndexOutOfRange {
                index: bad,
                bound: ell,
            });
        }
        if chosen_parts.len() > 32 || 2 * chosen_parts.len() > ell {
            return Err(invalid("need at most min(32, ell/2) chosen parts"));
        }
        let nonempty: Vec<bool> = chosen_parts
            .iter()
            .map(|&p| partition.part_mask(p) != 0)
            .collect();
        let mass = DjMass::new(ell, &nonempty);
        Ok(SamplerState {
            partition,
            chosen_parts,
            eps,
            mass,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn chosen_parts(&self) -> &[usize] {
        &self.chosen_parts
    }

    pub fn k(&self) -> usize {
        self.chosen_parts.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Exact distribution of extracted points.
    pub fn mass(&self) -> &DjMass {
        &self.mass
    }
}

/// A labelled core point; bit `j` of `point` is set when `x_j = +1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreSample {
    pub point: u32,
    /// `+1` or `−1`.
    pub label: i8,
}

/// Draws `y ∼ D_I`: a uniformly random balanced sign pattern on the parts, copied
/// to every coordinate of each part.
pub fn sample_di<R: Rng + ?Sized>(partition: &Partition, rng: &mut R) -> Result<u32> {
    let ell = partition.ell();
    if ell % 2 != 0 {
        return Err(JuntaError::OddPartCount(ell));
    }
    Ok(sample(rng, ell, ell / 2)
        .iter()
        .fold(0u32, |y, j| y | partition.part_mask(j)))
}

/// Projects a part-constant point onto the chosen parts. Empty chosen parts get a
/// fresh uniform bit.
pub fn extract<R: Rng + ?Sized>(state: &SamplerState, y: u32, rng: &mut R) -> Result<u32> {
    let mut x = 0u32;
    for (j, &part) in state.chosen_parts.iter().enumerate() {
        let mask = state.partition.part_mask(part);
        let bit = if mask == 0 {
            rng.gen::<bool>()
        } else if y & mask == mask {
            true
        } else if y & mask == 0 {
            false
        } else {
            return Err(JuntaError::NonConstantPart(part));
        };
        x |= (bit as u32) << j;
    }
    Ok(x)
}

/// Probability mass of extracted points under `D_I`.
///
/// With `r` nonempty chosen parts, a point whose nonempty coordinates hold `w`
/// plus signs has mass `C(ℓ−r, ℓ/2−w) / C(ℓ, ℓ/2) · 2^{r−k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DjMass {
    k: usize,
    nonempty_mask: u32,
    by_weight: Vec<f64>,
    min: f64,
}

impl DjMass {
    fn new(ell: usize, nonempty: &[bool]) -> Self {
        let k = nonempty.len();
        let r = nonempty.iter().filter(|&&b| b).count();
        let nonempty_mask = nonempty
            .iter()
            .enumerate()
            .fold(0u32, |m, (j, &b)| m | (b as u32) << j);
        let half = (ell / 2) as f64;
        let empty_factor = 0.5f64.powi((k - r) as i32);
        let by_weight: Vec<f64> = (0..=r)
            .map(|w| {
                // falling factorials: (h)_w (h)_{r−w} / (ℓ)_r
                let mut p = empty_factor;
                for i in 0..w {
                    p *= half - i as f64;
                }
                for i in 0..r - w {
                    p *= half - i as f64;
                }
                for i in 0..r {
                    p /= (ell - i) as f64;
                }
                p
            })
            .collect();
        let min = by_weight.iter().copied().fold(f64::INFINITY, f64::min);
        DjMass {
            k,
            nonempty_mask,
            by_weight,
            min,
        }
    }

    pub fn probability(&self, x: u32) -> f64 {
        self.by_weight[(x & self.nonempty_mask).count_ones() as usize]
    }

    pub fn min_probability(&self) -> f64 {
        self.min
    }

    /// Total-variation distance to uniform on `{−1,1}^k`.
    pub fn tv_to_uniform(&self) -> f64 {
        let r = self.by_weight.len() - 1;
        let uniform = 0.5f64.powi(self.k as i32);
        let free = 2f64.powi((self.k - r) as i32);
        let mut total = 0.0;
        let mut choose = 1.0;
        for (w, p) in self.by_weight.iter().enumerate() {
            total += choose * free * (p - uniform).abs();
            choose = choose * (r - w) as f64 / (w + 1) as f64;
        }
        total / 2.0
    }
}

/// One raw sampler draw: `y ∼ D_I`, one query, and the extracted point with `f(y)`.
pub fn draw_core_sample_raw<R: RngCore + ?Sized>(
    state: &SamplerState,
    oracle: &FunctionOracle<'_>,
    rng: &mut R,
) -> Result<CoreSample> {
    let y = sample_di(&state.partition, rng)?;
    let label = if oracle.query(y)? { 1 } else { -1 };
    Ok(CoreSample {
        point: extract(state, y, rng)?,
        label,
    })
}

/// One uniformized draw. The raw draw is kept with probability `D_min / D(x)`;
/// otherwise a uniform point with a uniform label is returned instead, so the point
/// is exactly uniform. Exactly one query is spent either way.
pub fn draw_core_sample<R: RngCore + ?Sized>(
    state: &SamplerState,
    oracle: &FunctionOracle<'_>,
    rng: &mut R,
) -> Result<CoreSample> {
    let raw = draw_core_sample_raw(state, oracle, rng)?;
    let keep = state.mass.min_probability() / state.mass.probability(raw.point);
    if rng.gen::<f64>() < keep {
        return Ok(raw);
    }
    let k = state.k();
    let point = if k == 0 {
        0
    } else {
        rng.next_u32() & (u32::MAX >> (32 - k))
    };
    Ok(CoreSample {
        point,
        label: if rng.gen::<bool>() { 1 } else { -1 },
    })
}

pub fn draw_core_samples<R: RngCore + ?Sized>(
    state: &SamplerState,
    oracle: &FunctionOracle<'_>,
    count: u64,
    rng: &mut R,
) -> Result<Vec<CoreSample>> {
    (0..count)
        .map(|_| draw_core_sample(state, oracle, rng))
        .collect()
}

/// Runs the ρ-tolerant tester with the preprocessing part count and, on acceptance,
/// keeps the partition and the parts outside the witness. `None` means fail.
pub fn preprocess<R: RngCore + ?Sized>(
    oracle: &FunctionOracle<'_>,
    eps_prime: f64,
    k: usize,
    config: &IsoConfig,
    rng: &mut R,
) -> Result<Option<SamplerState>> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(invalid("eps_prime must lie in (0, 1)"));
    }
    let ell = config.preprocess_parts(k, eps_prime);
    let tester = RhoTesterConfig {
        eps: eps_prime,
        rho: config.rho,
        k,
        scale: config.estimator_scale,
        gamma: config.gamma,
        parts: Some(ell),
    };
    let outcome = rho_tolerant_tester(oracle, &tester, rng)?;
    match outcome.witness_complement {
        Some(chosen) => Ok(Some(SamplerState::new(
            outcome.partition,
            chosen,
            eps_prime,
        )?)),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::BooleanFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_singleton_parts() {
        let p = Partition::from_assignment(2, 2, vec![0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = [0u32; 4];
        for _ in 0..2000 {
            seen[sample_di(&p, &mut rng).unwrap() as usize] += 1;
        }
        assert_eq!(seen[0] + seen[3], 0);
        assert!(seen[1] > 900 && seen[2] > 900);
        let odd = Partition::from_assignment(2, 3, vec![0, 1]).unwrap();
        assert!(matches!(
            sample_di(&odd, &mut rng),
            Err(JuntaError::OddPartCount(3))
        ));
    }

    #[test]
    fn extract_checks_constancy() {
        let p = Partition::from_assignment(4, 4, vec![0, 0, 1, 2]).unwrap();
        let state = SamplerState::new(p, vec![0, 2], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(extract(&state, 0b1011, &mut rng).unwrap(), 0b11);
        assert_eq!(extract(&state, 0b0100, &mut rng).unwrap(), 0b00);
        assert!(matches!(
            extract(&state, 0b0001, &mut rng),
            Err(JuntaError::NonConstantPart(0))
        ));
    }

    /// Independent oracle: enumerate every balanced pattern.
    fn mass_by_enumeration(state: &SamplerState) -> Vec<f64> {
        let ell = state.partition.ell();
        let k = state.k();
        let mut mass = vec![0.0; 1 << k];
        let patterns: Vec<u32> = (0..1u32 << ell)
            .filter(|z| z.count_ones() as usize == ell / 2)
            .collect();
        for &z in &patterns {
            // empty chosen parts spread their mass over both values
            let mut fixed = 0u32;
            let mut free = Vec::new();
            for (j, &part) in state.chosen_parts.iter().enumerate() {
                if state.partition.part_mask(part) == 0 {
                    free.push(j);
                } else if z >> part & 1 == 1 {
                    fixed |= 1 << j;
                }
            }
            for bits in 0..1u32 << free.len() {
                let x = free
                    .iter()
                    .enumerate()
                    .fold(fixed, |x, (b, &j)| x | (bits >> b & 1) << j);
                mass[x as usize] += 1.0 / patterns.len() as f64 / (1u32 << free.len()) as f64;
            }
        }
        mass
    }

    #[test]
    fn mass_matches_enumeration() {
        let p = Partition::from_assignment(5, 8, vec![0, 0, 3, 5, 6]).unwrap();
        let state = SamplerState::new(p, vec![0, 1, 3, 5], 0.1).unwrap();
        let brute = mass_by_enumeration(&state);
        let total: f64 = brute.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for x in 0..16u32 {
            assert!((state.mass().probability(x) - brute[x as usize]).abs() < 1e-12);
        }
        let tv: f64 = brute.iter().map(|p| (p - 1.0 / 16.0).abs()).sum::<f64>() / 2.0;
        assert!((state.mass().tv_to_uniform() - tv).abs() < 1e-12);
    }

    #[test]
    fn one_query_per_draw_and_noise_free_labels() {
        let p = Partition::from_assignment(6, 8, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let f = BooleanFunction::from_fn(6, |x| (x & 1 == 1) ^ (x >> 2 & 1 == 1)).unwrap();
        let o = FunctionOracle::new(&f);
        let state = SamplerState::new(p, vec![0, 2], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let raw: Vec<CoreSample> = (0..500)
            .map(|_| draw_core_sample_raw(&state, &o, &mut rng).unwrap())
            .collect();
        for s in &raw {
            let core = (s.point & 1 == 1) ^ (s.point >> 1 & 1 == 1);
            assert_eq!(s.label, if core { 1 } else { -1 });
        }
        draw_core_samples(&state, &o, 300, &mut rng).unwrap();
        assert_eq!(o.queries_used(), 800);
    }

    #[test]
    fn state_round_trips_through_json() {
        let p = Partition::from_assignment(3, 4, vec![0, 1, 1]).unwrap();
        let state = SamplerState::new(p, vec![1, 3], 0.05).unwrap();
        let text = serde_json::to_string(&state).unwrap();
        let back: SamplerState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, state);
    }
}
