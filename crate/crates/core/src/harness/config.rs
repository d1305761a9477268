use crate::boolfn::BooleanFunction;
use crate::error::{JuntaError, Result};
use crate::iso::IsoConfig;
use crate::sfm::{PartsPreset, SfmBackend};
use crate::tradeoff::DEFAULT_RHO;
use serde::{Deserialize, Serialize};

/// Which tester an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterKind {
    Exhaustive,
    Parameterized,
    RhoTradeoff,
    Isomorphism,
}

/// Function family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Random `k`-junta with exactly `⌊corruption·2^n⌋` flipped entries.
    PlantedJunta {
        n: usize,
        k: usize,
        #[serde(default)]
        corruption: f64,
    },
    /// Parity of `vars`, all coordinates when absent.
    Parity {
        n: usize,
        #[serde(default)]
        vars: Option<Vec<usize>>,
    },
    Majority {
        n: usize,
        #[serde(default)]
        vars: Option<Vec<usize>>,
    },
    Dictator {
        n: usize,
        index: usize,
    },
    Constant {
        n: usize,
        plus: bool,
    },
    Random {
        n: usize,
    },
    /// Explicit table in the hexadecimal file encoding.
    Table {
        n: usize,
        table_hex: String,
    },
}

impl InstanceSpec {
    pub fn n(&self) -> usize {
        match *self {
            InstanceSpec::PlantedJunta { n, .. }
            | InstanceSpec::Parity { n, .. }
            | InstanceSpec::Majority { n, .. }
            | InstanceSpec::Dictator { n, .. }
            | InstanceSpec::Constant { n, .. }
            | InstanceSpec::Random { n }
            | InstanceSpec::Table { n, .. } => n,
        }
    }
}

/// How the second function of an isomorphism experiment is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PartnerSpec {
    /// `g = f`.
    Same,
    /// `g = f∘π` for a random `π`, then corrupted.
    Permuted {
        #[serde(default)]
        corruption: f64,
    },
    /// `g = −f`.
    Negated,
    /// An independent instance.
    Instance { instance: InstanceSpec },
}

fn default_rho() -> f64 {
    DEFAULT_RHO
}

fn default_delta() -> f64 {
    0.1
}

fn default_one() -> f64 {
    1.0
}

fn default_trials() -> usize {
    1
}

/// A full experiment description. Identical configurations give identical reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tester: TesterKind,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub partner: Option<PartnerSpec>,
    pub k: usize,
    pub eps: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Fraction of the analysis constant used for ρ-subset sample counts.
    #[serde(default = "default_one")]
    pub scale: f64,
    /// Part count override for the exhaustive and ρ-tradeoff testers.
    #[serde(default)]
    pub parts: Option<usize>,
    #[serde(default)]
    pub parts_preset: PartsPreset,
    #[serde(default)]
    pub sfm_backend: SfmBackend,
    #[serde(default)]
    pub iso: IsoConfig,
    /// Per-trial query budget.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock time; reports are then no longer byte-identical.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(tester: TesterKind, instance: InstanceSpec, k: usize, eps: f64) -> Self {
        ExperimentConfig {
            tester,
            instance,
            partner: None,
            k,
            eps,
            rho: DEFAULT_RHO,
            delta: default_delta(),
            scale: 1.0,
            parts: None,
            parts_preset: PartsPreset::default(),
            sfm_backend: SfmBackend::default(),
            iso: IsoConfig::default(),
            budget: None,
            trials: 1,
            seed: 0,
            timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| JuntaError::ConfigInvalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(JuntaError::ConfigInvalid(msg));
        let n = self.instance.n();
        if n == 0 || n > BooleanFunction::MAX_VARS {
            return bad(format!("n = {n} outside 1..={}", BooleanFunction::MAX_VARS));
        }
        if self.k > n {
            return bad(format!("k = {} exceeds n = {n}", self.k));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.eps));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho = {} outside (0, 1)", self.rho));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta = {} outside (0, 1]", self.delta));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale = {} must be positive", self.scale));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.parts == Some(0) {
            return bad("parts must be positive".into());
        }
        match (&self.tester, &self.partner) {
            (TesterKind::Isomorphism, None) => return bad("isomorphism needs a partner".into()),
            (TesterKind::Isomorphism, Some(PartnerSpec::Instance { instance }))
                if instance.n() != n =>
            {
                return bad("partner must have the same n".into())
            }
            _ => {}
        }
        if let TesterKind::Parameterized = self.tester {
            if self.k == 0 {
                return bad("the parameterized tester needs k >= 1".into());
            }
        }
        self.iso
            .validate()
            .map_err(|e| JuntaError::ConfigInvalid(e.to_string()))
    }
}
