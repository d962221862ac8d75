//! Property tests for the instance model, the regret ledger, and the
//! shared selection step.

use proptest::prelude::*;

use subsidy_bandits::export::format_float;
use subsidy_bandits::instance::Instance;
use subsidy_bandits::policies::select_cheapest_feasible;
use subsidy_bandits::regret::{PullRecord, RegretLedger};
use subsidy_bandits::verify::regret_oracle;
use subsidy_bandits::ArmSpec;

fn arm_strategy() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=1.0f64, 0.0..=1.0f64)
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (
        prop::collection::vec(arm_strategy(), 1..6),
        0.0..0.999f64,
    )
        .prop_map(|(arms, alpha)| {
            let arms = arms
                .into_iter()
                .map(|(mu, c)| ArmSpec::bernoulli(mu, c).unwrap())
                .collect();
            Instance::new(arms, alpha, "prop").unwrap()
        })
}

proptest! {
    #[test]
    fn benchmarks_are_consistent(instance in instance_strategy()) {
        let b = instance.benchmarks();
        prop_assert!(b.feasible.contains(&b.m_star));
        prop_assert!(b.feasible.contains(&b.i_star));
        prop_assert!(instance.arm(b.i_star).mean_cost() <= instance.arm(b.m_star).mean_cost());
        prop_assert!(instance.arm(b.i_star).mean_reward() >= b.tolerated_reward);
        let expected = (1.0 - instance.alpha()) * instance.arm(b.m_star).mean_reward();
        prop_assert_eq!(b.tolerated_reward.to_bits(), expected.to_bits());
        // i_star is the cheapest feasible arm.
        for &i in &b.feasible {
            prop_assert!(instance.arm(b.i_star).mean_cost() <= instance.arm(i).mean_cost());
        }
    }

    #[test]
    fn benchmark_arms_have_zero_instant_regret(instance in instance_strategy()) {
        let b = instance.benchmarks().clone();
        prop_assert_eq!(instance.instantaneous_regret(b.i_star).unwrap().cost, 0.0);
        prop_assert_eq!(instance.instantaneous_regret(b.i_star).unwrap().quality, 0.0);
        prop_assert_eq!(instance.instantaneous_regret(b.m_star).unwrap().quality, 0.0);
    }

    #[test]
    fn ledger_is_monotone_bounded_and_oracle_exact(
        instance in instance_strategy(),
        pulls in prop::collection::vec(0usize..6, 1..200),
    ) {
        let k = instance.arm_count();
        let mut ledger = RegretLedger::new();
        let mut prev_q = 0.0;
        let mut prev_c = 0.0;
        for (idx, &raw) in pulls.iter().enumerate() {
            let t = idx as u64 + 1;
            ledger.update(&instance, PullRecord {
                t,
                arm: raw % k,
                reward: (raw % 2) as f64,
                observed_cost: 0.0,
            }).unwrap();
            // Nonnegative, nondecreasing, and at most t (unit supports).
            prop_assert!(ledger.cum_quality() >= prev_q);
            prop_assert!(ledger.cum_cost() >= prev_c);
            prop_assert!(ledger.cum_quality() <= t as f64 + 1e-9);
            prop_assert!(ledger.cum_cost() <= t as f64 + 1e-9);
            prev_q = ledger.cum_quality();
            prev_c = ledger.cum_cost();
        }
        let totals = regret_oracle(ledger.records(), &instance).unwrap();
        prop_assert_eq!(totals.quality.to_bits(), ledger.cum_quality().to_bits());
        prop_assert_eq!(totals.cost.to_bits(), ledger.cum_cost().to_bits());
        prop_assert_eq!(
            totals.modified_quality.to_bits(),
            ledger.cum_modified_quality().to_bits()
        );
    }

    #[test]
    fn playing_benchmarks_forever_accrues_nothing(
        instance in instance_strategy(),
        horizon in 1u64..100,
    ) {
        let b = instance.benchmarks().clone();
        let mut star = RegretLedger::new();
        let mut best = RegretLedger::new();
        for t in 1..=horizon {
            star.update(&instance, PullRecord { t, arm: b.i_star, reward: 0.0, observed_cost: 0.0 }).unwrap();
            best.update(&instance, PullRecord { t, arm: b.m_star, reward: 0.0, observed_cost: 0.0 }).unwrap();
        }
        prop_assert_eq!(star.cum_quality(), 0.0);
        prop_assert_eq!(star.cum_cost(), 0.0);
        prop_assert_eq!(best.cum_quality(), 0.0);
    }

    #[test]
    fn selection_picks_a_cheapest_feasible_arm(
        scores in prop::collection::vec(0.0..=1.0f64, 1..6),
        costs_seed in prop::collection::vec(0.0..=1.0f64, 6),
        alpha in 0.0..0.999f64,
    ) {
        let costs = &costs_seed[..scores.len()];
        let choice = select_cheapest_feasible(&scores, costs, alpha);
        // Nonnegative scores: the best arm is always feasible.
        prop_assert!(choice.feasible.contains(&choice.best_score_arm));
        prop_assert!(!choice.fallback);
        prop_assert!(choice.feasible.contains(&choice.selected));
        for &i in &choice.feasible {
            prop_assert!(costs[choice.selected] <= costs[i]);
        }
        // Every feasible arm clears the threshold; the rest do not.
        for (i, &score) in scores.iter().enumerate() {
            prop_assert_eq!(choice.feasible.contains(&i), score >= choice.threshold);
        }
    }

    #[test]
    fn csv_floats_round_trip(x in prop::num::f64::NORMAL) {
        let parsed: f64 = format_float(x).parse().unwrap();
        let tol = 1e-11 * x.abs().max(f64::MIN_POSITIVE);
        prop_assert!((parsed - x).abs() <= tol);
    }
}
