use crate::error::{invalid, Result};
use crate::tradeoff::{BASE_SCALE, DEFAULT_RHO};
use serde::{Deserialize, Serialize};

/// Closeness constant `c` relating the junta search to the isomorphism distance.
pub const C_DEFAULT: f64 = 1.0 / 1750.0;

/// Largest admissible `ε`: `(16/15)(5 − 2√6)`.
pub const EPS0: f64 = 16.0 / 15.0 * (5.0 - 2.0 * 2.449_489_742_783_178);

/// Constant knobs of the isomorphism pipeline. The defaults follow the analysis;
/// every field can be relaxed for desk-scale runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IsoConfig {
    pub c: f64,
    pub rho: f64,
    pub gamma: f64,
    /// Leading constant `C` of the core sample size `s`.
    pub sample_constant: f64,
    /// Leading constant of the preprocessing part count `⌈C·k²/ε′⌉`.
    pub parts_constant: f64,
    /// Fixed preprocessing part count, replacing the formula (rounded up to even).
    pub preprocess_parts: Option<usize>,
    /// Part count of the degree search is `max(1, ⌈factor·k²⌉)`.
    pub finder_parts_factor: f64,
    /// Sample-count constant of the ρ-subset estimator, for both stages.
    pub estimator_scale: f64,
    /// Largest `k` for which permutations are enumerated.
    pub max_k: usize,
    /// Fixed repetition count replacing `2⌈ln(1/δ)⌉ + 1`.
    pub reps: Option<usize>,
}

impl Default for IsoConfig {
    fn default() -> Self {
        IsoConfig {
            c: C_DEFAULT,
            rho: DEFAULT_RHO,
            gamma: 0.125,
            sample_constant: 4.0,
            parts_constant: 2.0,
            preprocess_parts: None,
            finder_parts_factor: 24.0,
            estimator_scale: BASE_SCALE,
            max_k: 8,
            reps: None,
        }
    }
}

impl IsoConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(unit(self.c) && unit(self.rho) && unit(self.gamma)) {
            return Err(invalid("c, rho and gamma must lie in (0, 1)"));
        }
        if !(self.sample_constant > 0.0 && self.parts_constant > 0.0 && self.estimator_scale > 0.0)
        {
            return Err(invalid("scale constants must be positive"));
        }
        if !(self.finder_parts_factor > 0.0) {
            return Err(invalid("finder_parts_factor must be positive"));
        }
        if self.reps == Some(0) {
            return Err(invalid("reps must be positive"));
        }
        Ok(())
    }

    /// Part count of the degree search at `k`.
    pub fn finder_parts(&self, k: usize) -> usize {
        ((self.finder_parts_factor * (k * k) as f64).ceil() as usize).max(1)
    }

    /// Preprocessing part count at `(k, ε′)`, always even and at least `2k`.
    pub fn preprocess_parts(&self, k: usize, eps_prime: f64) -> usize {
        let raw = self
            .preprocess_parts
            .unwrap_or_else(|| (self.parts_constant * (k * k) as f64 / eps_prime).ceil() as usize);
        let raw = raw.max(2 * k).max(2);
        raw + raw % 2
    }
}

/// Derived quantities for one call with fixed `(ε, k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoParams {
    pub eps: f64,
    pub k: usize,
    pub rho: f64,
    /// `ε/16`, the junta tolerance used by the sampler.
    pub eps_prime: f64,
    /// `4cε`.
    pub alpha: f64,
    pub c: f64,
    pub eps0: f64,
    /// Core samples per function, `⌈C·2^{k/2}/ε·√(k ln(k+1))⌉`.
    pub s: u64,
    /// Violation threshold `(3α + 9ε′)·s²/2^k`.
    pub t: f64,
}

impl IsoParams {
    pub fn new(eps: f64, k: usize, config: &IsoConfig) -> Result<Self> {
        config.validate()?;
        if !(eps > 0.0 && eps <= EPS0) {
            return Err(invalid(format!(
                "eps must lie in (0, {EPS0:.6}], got {eps}"
            )));
        }
        let kf = k as f64;
        let eps_prime = eps / 16.0;
        let alpha = 4.0 * config.c * eps;
        let raw_s =
            config.sample_constant * 2f64.powf(kf / 2.0) / eps * (kf * (kf + 1.0).ln()).sqrt();
        let s = (raw_s.ceil() as u64).max(1);
        let t = (3.0 * alpha + 9.0 * eps_prime) * (s * s) as f64 / 2f64.powi(k as i32);
        Ok(IsoParams {
            eps,
            k,
            rho: config.rho,
            eps_prime,
            alpha,
            c: config.c,
            eps0: EPS0,
            s,
            t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps0_value() {
        let expected = 16.0 / 15.0 * (5.0 - 2.0 * 6f64.sqrt());
        assert!((EPS0 - expected).abs() < 1e-15);
    }

    #[test]
    fn formulas() {
        let cfg = IsoConfig::default();
        let p = IsoParams::new(0.1, 3, &cfg).unwrap();
        let s = (4.0 * 2f64.powf(1.5) / 0.1 * (3.0 * 4f64.ln()).sqrt()).ceil();
        assert_eq!(p.s as f64, s);
        let t = (3.0 * 4.0 * 0.1 / 1750.0 + 9.0 * 0.1 / 16.0) * s * s / 8.0;
        assert!((p.t - t).abs() < 1e-9);
        assert!(IsoParams::new(0.2, 3, &cfg).is_err());
        assert_eq!(IsoParams::new(0.1, 0, &cfg).unwrap().s, 1);
    }

    #[test]
    fn part_counts() {
        let cfg = IsoConfig::default();
        assert_eq!(cfg.finder_parts(0), 1);
        assert_eq!(cfg.finder_parts(3), 216);
        let ell = cfg.preprocess_parts(3, 0.1 / 16.0);
        assert_eq!(ell, 2880);
        let odd = IsoConfig {
            preprocess_parts: Some(37),
            ..IsoConfig::default()
        };
        assert_eq!(odd.preprocess_parts(3, 0.01), 38);
    }
}
