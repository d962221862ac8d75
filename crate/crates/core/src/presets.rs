//! Built-in experiment presets behind the CLI `reproduce` targets. The
//! acceptance suite runs the same configs, so `reproduce` output always
//! matches what the tests measured.

use std::fmt;
use std::str::FromStr;

use crate::config::{ExperimentConfig, InstanceSpec, OutputSpec, PolicySpec, SweepSpec};
use crate::error::Error;

/// Named built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproduceTarget {
    /// Two-arm boundary instance at T = 10000: posterior sampling and UCB
    /// pay heavy cost regret, explore-then-commit does not.
    Fig1,
    /// Reward sweep mu2 in 0.30..=0.60 (step 0.03) at T = 5000.
    Fig2,
    /// Gaussian posterior sampling on the hard deterministic instance at
    /// two horizons; cost regret grows linearly.
    TsLinear,
    /// Explore-then-commit total regret versus horizon on the boundary
    /// instance (T in {2500, 10000, 40000}).
    Scaling,
}

impl ReproduceTarget {
    pub const ALL: [ReproduceTarget; 4] = [
        ReproduceTarget::Fig1,
        ReproduceTarget::Fig2,
        ReproduceTarget::TsLinear,
        ReproduceTarget::Scaling,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ReproduceTarget::Fig1 => "fig1",
            ReproduceTarget::Fig2 => "fig2",
            ReproduceTarget::TsLinear => "ts-linear",
            ReproduceTarget::Scaling => "scaling",
        }
    }

    /// Config list for this target, each with its default summary filename.
    pub fn configs(&self) -> Vec<ExperimentConfig> {
        match self {
            ReproduceTarget::Fig1 => vec![fig1_config()],
            ReproduceTarget::Fig2 => vec![fig2_config()],
            ReproduceTarget::TsLinear => ts_linear_configs(),
            ReproduceTarget::Scaling => scaling_configs(),
        }
    }
}

impl fmt::Display for ReproduceTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ReproduceTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ReproduceTarget::ALL
            .iter()
            .copied()
            .find(|t| t.id() == s)
            .ok_or_else(|| {
                Error::InvalidConfiguration(format!(
                    "unknown reproduce target `{s}` (expected one of fig1, fig2, ts-linear, scaling)"
                ))
            })
    }
}

fn base(
    instance: InstanceSpec,
    policies: Vec<PolicySpec>,
    horizon: u64,
    base_seed: u64,
    summary: &str,
) -> ExperimentConfig {
    ExperimentConfig {
        version: 1,
        instance,
        sweep: None,
        policies,
        horizon,
        replications: 50,
        base_seed,
        checkpoints: None,
        record: Default::default(),
        output: OutputSpec {
            summary: Some(summary.to_string()),
            trajectories: None,
        },
    }
}

/// The three headline policies compared throughout.
fn headline_policies() -> Vec<PolicySpec> {
    vec![
        PolicySpec::CsTsBeta {
            binarize_rewards: false,
        },
        PolicySpec::CsUcb,
        PolicySpec::CsEtc { tau: None },
    ]
}

pub fn fig1_config() -> ExperimentConfig {
    base(
        InstanceSpec::Fig1 {
            t: 10_000,
            alpha: 0.1,
            random_costs: false,
        },
        headline_policies(),
        10_000,
        101,
        "fig1_summary.csv",
    )
}

pub fn fig2_config() -> ExperimentConfig {
    // Grid 0.30..=0.60 in exact hundredth steps of 3.
    let grid: Vec<f64> = (0..=10).map(|k| (30 + 3 * k) as f64 / 100.0).collect();
    let mut config = base(
        InstanceSpec::Table1 {
            mu2: 0.3,
            random_costs: false,
        },
        headline_policies(),
        5_000,
        202,
        "fig2_summary.csv",
    );
    config.sweep = Some(SweepSpec {
        param: "mu2".into(),
        grid,
    });
    config
}

pub fn ts_linear_configs() -> Vec<ExperimentConfig> {
    [5_000u64, 20_000]
        .into_iter()
        .map(|horizon| {
            base(
                InstanceSpec::TsHard {
                    alpha: 0.1,
                    k: 5,
                    t: horizon,
                    d: 1.0,
                },
                vec![
                    PolicySpec::CsTsGauss {
                        sigma0_sq: Some(1.0),
                        sigman_sq: 1.0,
                    },
                    PolicySpec::CsEtc { tau: None },
                ],
                horizon,
                303,
                "ts_linear_summary.csv",
            )
        })
        .collect()
}

pub fn scaling_configs() -> Vec<ExperimentConfig> {
    [2_500u64, 10_000, 40_000]
        .into_iter()
        .map(|horizon| {
            base(
                InstanceSpec::Fig1 {
                    t: horizon,
                    alpha: 0.1,
                    random_costs: false,
                },
                vec![PolicySpec::CsEtc { tau: None }],
                horizon,
                404,
                "scaling_summary.csv",
            )
        })
        .collect()
}
