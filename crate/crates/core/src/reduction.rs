//! Subsidy-removal reduction.
//!
//! Wraps a policy built for subsidy factor `alpha > 0` so that it plays on a
//! zero-subsidy instance whose arm 0 is free and whose paid arms are
//! Bernoulli. Requests for arm 0 pass one real pull through unchanged. A
//! request for a paid arm runs the linear Bernoulli factory with scale
//! `1 / (1 - alpha)` over repeated real pulls of that arm and feeds the
//! synthesized bit — an exact draw from the mean scaled by `1 / (1 - alpha)`
//! — to the wrapped policy. Every real pull is attributed to exactly one
//! inner round, so the outer horizon is the total flip count.

use crate::arm::{ArmSpec, RewardModel};
use crate::bernoulli_factory::{factory_sample, FactoryConfig};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::policies::Policy;
use crate::regret::{PullRecord, RegretLedger};
use crate::EpisodeRng;

/// Default factory margin; admissible whenever every paid-arm mean is at
/// most `(1 - alpha) / 2`.
pub const DEFAULT_FACTORY_MARGIN: f64 = 0.5;

/// One wrapped round: which arm the inner policy asked for, what it was
/// shown, and how many real pulls that cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerRound {
    pub arm: usize,
    pub synthesized_reward: f64,
    pub consumed_pulls: u64,
}

/// Per-round audit trail of the reduction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReductionTranscript {
    pub rounds: Vec<InnerRound>,
    /// Total real pulls; equals the sum of `consumed_pulls`.
    pub total_pulls: u64,
}

impl ReductionTranscript {
    pub fn inner_rounds(&self) -> u64 {
        self.rounds.len() as u64
    }
}

/// Everything produced by one reduction run.
#[derive(Debug)]
pub struct ReductionOutcome {
    pub transcript: ReductionTranscript,
    /// Regret of the realized pull sequence on the zero-subsidy instance.
    pub outer_ledger: RegretLedger,
    /// Regret of the inner policy on the scaled instance it believes it is
    /// playing, at its own horizon.
    pub inner_ledger: RegretLedger,
    /// The scaled instance used for inner accounting.
    pub inner_instance: Instance,
}

impl ReductionOutcome {
    /// Both sides of the expected-regret transfer relation: the outer
    /// modified-quality-plus-cost regret at the realized horizon, and the
    /// inner quality-plus-cost regret scaled by `9.5 / (margin * (1 - alpha))`.
    /// Reported for inspection; the relation binds in expectation over the
    /// random outer horizon and is not asserted sample-path-wise.
    pub fn transfer_report(&self, alpha: f64, margin: f64) -> (f64, f64) {
        let outer = self.outer_ledger.cum_modified_quality() + self.outer_ledger.cum_cost();
        let inner = self.inner_ledger.cum_quality() + self.inner_ledger.cum_cost();
        (outer, 9.5 / (margin * (1.0 - alpha)) * inner)
    }
}

/// Run the wrapped policy for `inner_horizon` rounds on `outer`.
///
/// `outer` must be a zero-subsidy instance whose arm 0 has zero known cost
/// and whose arms are all Bernoulli with known costs; every paid-arm mean
/// must be admissible for the factory, i.e. at most
/// `(1 - margin) * (1 - alpha)`.
pub fn run_reduction(
    outer: &Instance,
    alpha: f64,
    inner_policy: &mut dyn Policy,
    inner_horizon: u64,
    margin: f64,
    rng: &mut EpisodeRng,
) -> Result<ReductionOutcome> {
    if outer.alpha() != 0.0 {
        return Err(Error::InvalidParameters(
            "reduction target must be a zero-subsidy instance".into(),
        ));
    }
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::InvalidParameters(format!(
            "inner subsidy factor must lie in (0, 1), got {alpha}"
        )));
    }
    if outer.arm(0).mean_cost() != 0.0 {
        return Err(Error::InvalidParameters(
            "reduction requires arm 0 to be the zero-cost arm".into(),
        ));
    }
    if !outer.costs_known() {
        return Err(Error::InvalidParameters(
            "reduction requires known costs".into(),
        ));
    }
    let config = FactoryConfig::new(1.0 / (1.0 - alpha), margin)?;
    for (i, arm) in outer.arms().iter().enumerate() {
        if !matches!(arm.reward_model(), RewardModel::Bernoulli(_)) {
            return Err(Error::InvalidParameters(format!(
                "reduction requires Bernoulli rewards; arm {i} is not"
            )));
        }
        if i > 0 && arm.mean_reward() > config.max_input_mean() + 1e-12 {
            return Err(Error::InvalidParameters(format!(
                "arm {i} mean {} exceeds the factory admissibility bound {}",
                arm.mean_reward(),
                config.max_input_mean()
            )));
        }
    }

    // Inner accounting runs on the scaled instance the wrapped policy sees.
    let scaled_arms = outer
        .arms()
        .iter()
        .map(|a| {
            ArmSpec::new(
                RewardModel::Bernoulli(a.mean_reward() / (1.0 - alpha)),
                a.cost_model(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let inner_instance = Instance::new(scaled_arms, alpha, format!("{}/scaled", outer.label()))?;

    let arm_count = outer.arm_count();
    let mut transcript = ReductionTranscript::default();
    let mut outer_ledger = RegretLedger::new();
    let mut inner_ledger = RegretLedger::new();
    let mut outer_t: u64 = 0;

    for l in 1..=inner_horizon {
        let arm = inner_policy.select(rng);
        if arm >= arm_count {
            return Err(Error::Protocol(format!(
                "inner policy requested arm {arm} of {arm_count}"
            )));
        }
        let cost = outer.arm(arm).mean_cost();

        let (synthesized, consumed) = if arm == 0 {
            // Free arm: one real pull passes straight through.
            let reward = outer.arm(0).draw_reward(rng);
            outer_t += 1;
            outer_ledger.update(
                outer,
                PullRecord {
                    t: outer_t,
                    arm: 0,
                    reward,
                    observed_cost: cost,
                },
            )?;
            (reward, 1)
        } else {
            let mut coin = |r: &mut EpisodeRng| -> Result<bool> {
                let reward = outer.arm(arm).draw_reward(r);
                outer_t += 1;
                outer_ledger.update(
                    outer,
                    PullRecord {
                        t: outer_t,
                        arm,
                        reward,
                        observed_cost: cost,
                    },
                )?;
                Ok(reward > 0.5)
            };
            let sample = factory_sample(&config, &mut coin, rng)?;
            (if sample.bit { 1.0 } else { 0.0 }, sample.flips)
        };

        inner_policy.update(arm, synthesized, cost, rng)?;
        inner_ledger.update(
            &inner_instance,
            PullRecord {
                t: l,
                arm,
                reward: synthesized,
                observed_cost: cost,
            },
        )?;
        transcript.rounds.push(InnerRound {
            arm,
            synthesized_reward: synthesized,
            consumed_pulls: consumed,
        });
        transcript.total_pulls += consumed;
    }

    debug_assert_eq!(transcript.total_pulls, outer_t);
    Ok(ReductionOutcome {
        transcript,
        outer_ledger,
        inner_ledger,
        inner_instance,
    })
}
