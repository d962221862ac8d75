//! Selection policies: subsidy-aware UCB, Thompson sampling, and
//! explore-then-commit, plus fixed-arm and round-robin baselines.
//!
//! Every policy is a deterministic-given-seed state machine behind a
//! `select` / `update` interface. A policy instance is confined to one
//! episode on one thread; parallel experiments give each episode its own
//! state and random stream.

mod baselines;
mod etc;
mod ts;
mod ucb;

pub use baselines::{FixedArm, RoundRobin};
pub use etc::{etc_choice, etc_uc_choice, CsEtc, CsEtcUnknownCost, EtcChoice, EtcUcChoice};
pub use ts::{CsTs, TsPosterior};
pub use ucb::CsUcb;

use crate::config::PolicySpec;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::EpisodeRng;

/// One bandit policy driven round by round.
pub trait Policy {
    /// Choose the arm to pull this round.
    fn select(&mut self, rng: &mut EpisodeRng) -> usize;

    /// Observe the outcome of the arm pulled this round.
    fn update(
        &mut self,
        arm: usize,
        reward: f64,
        observed_cost: f64,
        rng: &mut EpisodeRng,
    ) -> Result<()>;
}

/// Confidence radius `sqrt(2 ln T / pulls)` shared by every UCB/LCB
/// construction in the crate.
pub fn confidence_radius(pulls: u64, horizon: u64) -> Result<f64> {
    if pulls == 0 {
        return Err(Error::InvalidParameters(
            "confidence radius undefined before the first pull".into(),
        ));
    }
    if horizon < 2 {
        return Err(Error::InvalidParameters(
            "confidence radius requires a horizon of at least 2".into(),
        ));
    }
    Ok((2.0 * (horizon as f64).ln() / pulls as f64).sqrt())
}

pub(crate) fn radius_unchecked(pulls: u64, horizon: u64) -> f64 {
    debug_assert!(pulls >= 1 && horizon >= 2);
    (2.0 * (horizon as f64).ln() / pulls as f64).sqrt()
}

/// Default per-arm exploration budget `ceil((T/K)^(2/3))`, clamped so the
/// exploration phase fits in the horizon.
pub fn default_tau(horizon: u64, arm_count: usize) -> Result<u64> {
    if arm_count == 0 {
        return Err(Error::InvalidConfiguration("arm count must be >= 1".into()));
    }
    if (arm_count as u64) > horizon {
        return Err(Error::InvalidConfiguration(format!(
            "arm count K = {arm_count} exceeds horizon T = {horizon}"
        )));
    }
    let ratio = horizon as f64 / arm_count as f64;
    let raw = ratio.powf(2.0 / 3.0);
    // Snap values that are integers up to f64 noise before taking the ceiling.
    let tau = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    } as u64;
    Ok(tau.max(1).min(horizon / arm_count as u64))
}

/// Outcome of the score-based feasible-set selection step.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleChoice {
    /// Arm with the highest score (lowest index on ties).
    pub best_score_arm: usize,
    /// Feasibility threshold `(1 - alpha) * score[best_score_arm]`.
    pub threshold: f64,
    /// Arms whose score meets the threshold, ascending.
    pub feasible: Vec<usize>,
    /// The arm to pull.
    pub selected: usize,
    /// True when no arm met the threshold (possible only with negative
    /// scores) and the best-score arm was used instead.
    pub fallback: bool,
}

/// Shared selection step: keep arms whose score is within `(1 - alpha)` of
/// the best score, then pull the cheapest of them (ties: higher score, then
/// lower index).
pub fn select_cheapest_feasible(scores: &[f64], costs: &[f64], alpha: f64) -> FeasibleChoice {
    assert_eq!(scores.len(), costs.len());
    assert!(!scores.is_empty());

    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    let threshold = (1.0 - alpha) * scores[best];
    let feasible: Vec<usize> = (0..scores.len())
        .filter(|&i| scores[i] >= threshold)
        .collect();
    // Nonnegative best score implies the best arm meets its own threshold.
    assert!(
        scores[best] < 0.0 || feasible.contains(&best),
        "best-score arm left the feasible set despite a nonnegative score"
    );

    let (selected, fallback) = match pick_cheapest(&feasible, costs, scores) {
        Some(arm) => (arm, false),
        None => (best, true),
    };
    FeasibleChoice {
        best_score_arm: best,
        threshold,
        feasible,
        selected,
        fallback,
    }
}

/// Cheapest member of `candidates`; ties broken by higher tie score, then
/// lower index.
pub(crate) fn pick_cheapest(
    candidates: &[usize],
    costs: &[f64],
    tie_scores: &[f64],
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &i in candidates {
        best = Some(match best {
            None => i,
            Some(b) => {
                if costs[i] < costs[b] || (costs[i] == costs[b] && tie_scores[i] > tie_scores[b]) {
                    i
                } else {
                    b
                }
            }
        });
    }
    best
}

/// Instantiate a policy for an instance. Checks that the policy's cost-model
/// assumptions match the instance.
pub fn build_policy(
    spec: &PolicySpec,
    instance: &Instance,
    horizon: u64,
) -> Result<Box<dyn Policy>> {
    let known_costs = || -> Result<Vec<f64>> {
        instance.known_costs().ok_or_else(|| {
            Error::InvalidConfiguration(format!(
                "policy `{}` requires known arm costs, but instance `{}` has random costs",
                spec.id(),
                instance.label()
            ))
        })
    };
    match spec {
        PolicySpec::CsUcb => Ok(Box::new(CsUcb::new(horizon, instance.alpha(), known_costs()?)?)),
        PolicySpec::CsTsBeta { binarize_rewards } => Ok(Box::new(CsTs::new(
            horizon,
            instance.alpha(),
            known_costs()?,
            TsPosterior::beta(*binarize_rewards),
        )?)),
        PolicySpec::CsTsGauss {
            sigma0_sq,
            sigman_sq,
        } => Ok(Box::new(CsTs::new(
            horizon,
            instance.alpha(),
            known_costs()?,
            TsPosterior::gaussian(sigma0_sq.unwrap_or(f64::INFINITY), *sigman_sq)?,
        )?)),
        PolicySpec::CsEtc { tau } => Ok(Box::new(CsEtc::new(
            horizon,
            instance.alpha(),
            known_costs()?,
            *tau,
        )?)),
        PolicySpec::CsEtcUc { tau } => {
            if instance.costs_known() {
                return Err(Error::InvalidConfiguration(format!(
                    "cs-etc-uc expects random costs; instance `{}` has known costs (use cs-etc)",
                    instance.label()
                )));
            }
            Ok(Box::new(CsEtcUnknownCost::new(
                horizon,
                instance.alpha(),
                instance.arm_count(),
                *tau,
            )?))
        }
        PolicySpec::OracleIstar => Ok(Box::new(FixedArm::new(instance.benchmarks().i_star))),
        PolicySpec::OracleMstar => Ok(Box::new(FixedArm::new(instance.benchmarks().m_star))),
        PolicySpec::RoundRobin => Ok(Box::new(RoundRobin::new(instance.arm_count()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn radius_frozen_values() {
        // sqrt(2 ln 10000 / 100) and sqrt(2 ln 5000 / 185).
        assert_abs_diff_eq!(
            confidence_radius(100, 10_000).unwrap(),
            0.429193205258,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            confidence_radius(185, 5_000).unwrap(),
            0.303443181224,
            epsilon = 1e-9
        );
    }

    #[test]
    fn radius_algebra() {
        // radius^2 * pulls == 2 ln T, and radius is 1/2 exactly when
        // pulls = 8 ln T.
        for (pulls, horizon) in [(1u64, 2u64), (17, 5000), (293, 10_000), (4096, 40_000)] {
            let r = confidence_radius(pulls, horizon).unwrap();
            assert_abs_diff_eq!(
                r * r * pulls as f64,
                2.0 * (horizon as f64).ln(),
                epsilon = 1e-12
            );
        }
        let horizon = 10_000u64;
        let pulls_for_half = 8.0 * (horizon as f64).ln();
        assert_abs_diff_eq!(
            (2.0 * (horizon as f64).ln() / pulls_for_half).sqrt(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn radius_preconditions() {
        assert!(confidence_radius(0, 100).is_err());
        assert!(confidence_radius(5, 1).is_err());
    }

    #[test]
    fn tau_frozen_values() {
        assert_eq!(default_tau(5_000, 2).unwrap(), 185);
        assert_eq!(default_tau(10_000, 2).unwrap(), 293);
        assert_eq!(default_tau(2_500, 2).unwrap(), 117);
        assert_eq!(default_tau(40_000, 2).unwrap(), 737);
        assert_eq!(default_tau(20_000, 5).unwrap(), 252);
        // Exact cube: (5000/5)^(2/3) = 100 with no f64 drift allowed.
        assert_eq!(default_tau(5_000, 5).unwrap(), 100);
        // T = K collapses to a single exploration pull per arm.
        assert_eq!(default_tau(7, 7).unwrap(), 1);
    }

    #[test]
    fn tau_rejects_more_arms_than_rounds() {
        assert!(default_tau(3, 5).is_err());
        assert!(default_tau(10, 0).is_err());
    }

    #[test]
    fn feasible_selection_worked_example() {
        // scores (0.9, 0.8, 0.5), alpha 0.2, costs (1.0, 0.4, 0.1):
        // threshold 0.72, feasible {0, 1}, pick arm1.
        let choice = select_cheapest_feasible(&[0.9, 0.8, 0.5], &[1.0, 0.4, 0.1], 0.2);
        assert_eq!(choice.best_score_arm, 0);
        assert_abs_diff_eq!(choice.threshold, 0.72, epsilon = 1e-12);
        assert_eq!(choice.feasible, vec![0, 1]);
        assert_eq!(choice.selected, 1);
        assert!(!choice.fallback);
    }

    #[test]
    fn alpha_zero_reduces_to_cost_tie_broken_argmax() {
        // Only the max-score arm survives; the cheaper of the tied maxima wins.
        let choice = select_cheapest_feasible(&[0.7, 0.9, 0.9], &[0.2, 0.5, 0.3], 0.0);
        assert_eq!(choice.feasible, vec![1, 2]);
        assert_eq!(choice.selected, 2);
    }

    #[test]
    fn equal_scores_pick_global_cheapest() {
        let choice = select_cheapest_feasible(&[0.4, 0.4, 0.4], &[0.9, 0.1, 0.5], 0.1);
        assert_eq!(choice.feasible, vec![0, 1, 2]);
        assert_eq!(choice.selected, 1);
    }

    #[test]
    fn all_negative_scores_fall_back_to_best() {
        // (1 - alpha) * max < max for negative maxima, so the feasible set
        // can be empty; the best-score arm is used instead.
        let choice = select_cheapest_feasible(&[-1.0, -0.5], &[0.0, 1.0], 0.1);
        assert!(choice.feasible.is_empty());
        assert!(choice.fallback);
        assert_eq!(choice.selected, 1);
    }
}
