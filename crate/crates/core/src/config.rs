//! Experiment configuration: a versioned JSON document naming an instance
//! constructor, a policy list, horizon, replication count, and seeding.
//! Unknown keys are rejected so a config never silently drifts from what a
//! run actually did.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::instances::{make_fig1, make_phi, make_table1, make_ts_hard, PhiParams};

/// Instance constructor selector, as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Two-arm boundary example: free arm `1/sqrt(t)` above the tolerated
    /// reward.
    Fig1 {
        t: u64,
        alpha: f64,
        #[serde(default)]
        random_costs: bool,
    },
    /// Two-arm reward sweep point: means (0.5, mu2), costs (1, 0), alpha 0.1.
    Table1 {
        mu2: f64,
        #[serde(default)]
        random_costs: bool,
    },
    /// Hard family member with one free arm and k paid arms.
    Phi {
        theta: f64,
        p: f64,
        epsilon: f64,
        k: usize,
        a: usize,
    },
    /// Deterministic-reward instance that punishes posterior sampling on
    /// the cost metric.
    TsHard { alpha: f64, k: usize, t: u64, d: f64 },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        let instance = match *self {
            InstanceSpec::Fig1 { t, alpha, .. } => make_fig1(t, alpha)?,
            InstanceSpec::Table1 { mu2, .. } => make_table1(mu2)?,
            InstanceSpec::Phi {
                theta,
                p,
                epsilon,
                k,
                a,
            } => make_phi(&PhiParams::new(theta, p, epsilon, k, a)?)?,
            InstanceSpec::TsHard { alpha, k, t, d } => make_ts_hard(alpha, k, t, d)?,
        };
        match self {
            InstanceSpec::Fig1 { random_costs, .. } | InstanceSpec::Table1 { random_costs, .. }
                if *random_costs =>
            {
                instance.with_random_bernoulli_costs()
            }
            _ => Ok(instance),
        }
    }

    /// Copy of this spec with the named numeric parameter replaced; used by
    /// sweeps.
    pub fn with_param(&self, param: &str, value: f64) -> Result<InstanceSpec> {
        let mut spec = self.clone();
        match (&mut spec, param) {
            (InstanceSpec::Table1 { mu2, .. }, "mu2") => *mu2 = value,
            (InstanceSpec::Fig1 { alpha, .. }, "alpha") => *alpha = value,
            (InstanceSpec::Phi { epsilon, .. }, "epsilon") => *epsilon = value,
            (InstanceSpec::TsHard { d, .. }, "d") => *d = value,
            _ => {
                return Err(Error::InvalidConfiguration(format!(
                    "unsupported sweep parameter `{param}` for this instance"
                )))
            }
        }
        Ok(spec)
    }
}

fn default_sigma0() -> Option<f64> {
    Some(1.0)
}

fn default_sigman() -> f64 {
    1.0
}

/// Policy selector, as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    CsUcb,
    CsTsBeta {
        #[serde(default)]
        binarize_rewards: bool,
    },
    CsTsGauss {
        /// Prior variance; `null` selects the flat prior (infinite variance).
        #[serde(default = "default_sigma0")]
        sigma0_sq: Option<f64>,
        #[serde(default = "default_sigman")]
        sigman_sq: f64,
    },
    CsEtc {
        #[serde(default)]
        tau: Option<u64>,
    },
    CsEtcUc {
        #[serde(default)]
        tau: Option<u64>,
    },
    OracleIstar,
    OracleMstar,
    RoundRobin,
}

impl PolicySpec {
    /// Stable identifier used in CSV output and CLI messages.
    pub fn id(&self) -> &'static str {
        match self {
            PolicySpec::CsUcb => "cs-ucb",
            PolicySpec::CsTsBeta { .. } => "cs-ts-beta",
            PolicySpec::CsTsGauss { .. } => "cs-ts-gauss",
            PolicySpec::CsEtc { .. } => "cs-etc",
            PolicySpec::CsEtcUc { .. } => "cs-etc-uc",
            PolicySpec::OracleIstar => "oracle-istar",
            PolicySpec::OracleMstar => "oracle-mstar",
            PolicySpec::RoundRobin => "round-robin",
        }
    }
}

/// Which rounds end up in the trajectory CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RecordGranularity {
    PerRound,
    #[default]
    Checkpoints,
}

/// Output file names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub summary: Option<String>,
    #[serde(default)]
    pub trajectories: Option<String>,
}

/// Sweep description: the instance parameter to vary and its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: String,
    pub grid: Vec<f64>,
}

/// A complete declarative experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub replications: u64,
    pub base_seed: u64,
    /// Explicit checkpoint rounds; defaults to 100 log-spaced rounds plus
    /// the horizon.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default)]
    pub record: RecordGranularity,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::InvalidConfiguration(format!(
                "unsupported config version {} (expected 1)",
                self.version
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfiguration(
                "replications must be >= 1".into(),
            ));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidConfiguration(
                "at least one policy is required".into(),
            ));
        }
        let instance = self.instance.build()?;
        if (instance.arm_count() as u64) > self.horizon {
            return Err(Error::InvalidConfiguration(format!(
                "horizon T = {} is smaller than the arm count K = {}; K <= T is required",
                self.horizon,
                instance.arm_count()
            )));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return Err(Error::InvalidConfiguration("sweep grid is empty".into()));
            }
            for &value in &sweep.grid {
                self.instance.with_param(&sweep.param, value)?.build()?;
            }
        }
        if let Some(checkpoints) = &self.checkpoints {
            if checkpoints.is_empty() {
                return Err(Error::InvalidConfiguration(
                    "checkpoint list is empty".into(),
                ));
            }
            if checkpoints.iter().any(|&t| t == 0 || t > self.horizon) {
                return Err(Error::InvalidConfiguration(
                    "checkpoints must lie in 1..=horizon".into(),
                ));
            }
            if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfiguration(
                    "checkpoints must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_json() -> String {
        r#"{
            "version": 1,
            "instance": {"name": "fig1", "t": 1000, "alpha": 0.1},
            "policies": [{"name": "cs-etc"}, {"name": "cs-ts-beta"}],
            "horizon": 1000,
            "replications": 3,
            "base_seed": 7
        }"#
        .to_string()
    }

    #[test]
    fn parses_minimal_config() {
        let config = ExperimentConfig::from_json(&fig1_json()).unwrap();
        assert_eq!(config.horizon, 1000);
        assert_eq!(config.record, RecordGranularity::Checkpoints);
        assert_eq!(config.policies[0].id(), "cs-etc");
        let instance = config.instance.build().unwrap();
        assert_eq!(instance.arm_count(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = fig1_json().replace("\"base_seed\": 7", "\"base_seed\": 7, \"typo\": 1");
        assert!(ExperimentConfig::from_json(&json).is_err());
    }

    #[test]
    fn horizon_below_arm_count_rejected() {
        let json = r#"{
            "version": 1,
            "instance": {"name": "ts-hard", "alpha": 0.1, "k": 5, "t": 10000, "d": 1.0},
            "policies": [{"name": "cs-etc"}],
            "horizon": 3,
            "replications": 1,
            "base_seed": 0
        }"#;
        let err = ExperimentConfig::from_json(json).unwrap_err();
        assert!(err.to_string().contains("K <= T"));
    }

    #[test]
    fn sweep_grid_values_are_validated() {
        let json = r#"{
            "version": 1,
            "instance": {"name": "table1", "mu2": 0.3},
            "sweep": {"param": "mu2", "grid": [0.3, 0.9]},
            "policies": [{"name": "cs-etc"}],
            "horizon": 100,
            "replications": 1,
            "base_seed": 0
        }"#;
        assert!(ExperimentConfig::from_json(json).is_err());
    }

    #[test]
    fn gaussian_ts_prior_defaults_and_flat_prior() {
        let json = r#"{"name": "cs-ts-gauss"}"#;
        let spec: PolicySpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            spec,
            PolicySpec::CsTsGauss {
                sigma0_sq: Some(1.0),
                sigman_sq: 1.0
            }
        );
        let flat: PolicySpec =
            serde_json::from_str(r#"{"name": "cs-ts-gauss", "sigma0_sq": null}"#).unwrap();
        assert_eq!(
            flat,
            PolicySpec::CsTsGauss {
                sigma0_sq: None,
                sigman_sq: 1.0
            }
        );
    }

    #[test]
    fn random_cost_instances() {
        let spec = InstanceSpec::Fig1 {
            t: 1000,
            alpha: 0.1,
            random_costs: true,
        };
        assert!(!spec.build().unwrap().costs_known());
    }
}
