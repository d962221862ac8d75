//! Pull records and the dual regret ledger.
//!
//! Both cumulative regrets are computed against true means, never against
//! sampled realizations: quality regret is the clipped shortfall below the
//! tolerated reward, cost regret the clipped mean-cost excess over the
//! cheapest feasible arm. The modified quality variant measures the shortfall
//! below the best mean reward and counts it only on zero-cost pulls.

use crate::error::{Error, Result};
use crate::instance::{InstantRegret, Instance};

/// One round of play: what was pulled and what came back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullRecord {
    /// Round index, 1-based.
    pub t: u64,
    /// Index of the pulled arm.
    pub arm: usize,
    /// Realized reward in [0, 1].
    pub reward: f64,
    /// Realized (or known) cost in [0, 1].
    pub observed_cost: f64,
}

/// Append-only per-episode regret accounting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    cum_quality: f64,
    cum_cost: f64,
    cum_modified_quality: f64,
    records: Vec<PullRecord>,
    instants: Vec<InstantRegret>,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append one round. `record.t` must extend the ledger by exactly one.
    pub fn update(&mut self, instance: &Instance, record: PullRecord) -> Result<()> {
        let expected = self.records.len() as u64 + 1;
        if record.t != expected {
            return Err(Error::OutOfOrderRound {
                expected,
                got: record.t,
            });
        }
        let instant = instance.instantaneous_regret(record.arm)?;
        self.cum_quality += instant.quality;
        self.cum_cost += instant.cost;
        self.cum_modified_quality += instant.modified_quality;
        self.records.push(record);
        self.instants.push(instant);
        Ok(())
    }

    pub fn rounds(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn cum_quality(&self) -> f64 {
        self.cum_quality
    }

    pub fn cum_cost(&self) -> f64 {
        self.cum_cost
    }

    pub fn cum_modified_quality(&self) -> f64 {
        self.cum_modified_quality
    }

    pub fn records(&self) -> &[PullRecord] {
        &self.records
    }

    pub fn instants(&self) -> &[InstantRegret] {
        &self.instants
    }

    /// Running `(t, cum_quality, cum_cost)` triples in round order.
    ///
    /// Summing the stored per-round values in the same order the totals were
    /// accumulated reproduces them bit-for-bit.
    pub fn cumulative_series(&self) -> impl Iterator<Item = (u64, f64, f64)> + '_ {
        let mut q = 0.0;
        let mut c = 0.0;
        self.records.iter().zip(&self.instants).map(move |(r, i)| {
            q += i.quality;
            c += i.cost;
            (r.t, q, c)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::ArmSpec;

    fn two_arm() -> Instance {
        // mu = (0.5, 0.3), c = (1, 0), alpha = 0.1; i_star = m_star = arm0.
        Instance::new(
            vec![
                ArmSpec::bernoulli(0.5, 1.0).unwrap(),
                ArmSpec::bernoulli(0.3, 0.0).unwrap(),
            ],
            0.1,
            "two-arm",
        )
        .unwrap()
    }

    #[test]
    fn pulling_i_star_accrues_nothing() {
        let inst = two_arm();
        let i_star = inst.benchmarks().i_star;
        let mut ledger = RegretLedger::new();
        ledger
            .update(
                &inst,
                PullRecord {
                    t: 1,
                    arm: i_star,
                    reward: 1.0,
                    observed_cost: 1.0,
                },
            )
            .unwrap();
        assert_eq!(ledger.cum_quality(), 0.0);
        assert_eq!(ledger.cum_cost(), 0.0);
        assert_eq!(ledger.cum_modified_quality(), 0.0);
    }

    #[test]
    fn totals_are_additive() {
        // Cost regret of arm0 on an instance where i_star is the free arm.
        let inst = Instance::new(
            vec![
                ArmSpec::bernoulli(0.46, 0.0).unwrap(),
                ArmSpec::bernoulli(0.5, 1.0).unwrap(),
            ],
            0.1,
            "t",
        )
        .unwrap();
        let mut ledger = RegretLedger::new();
        for t in 1..=2 {
            ledger
                .update(
                    &inst,
                    PullRecord {
                        t,
                        arm: 1,
                        reward: 0.0,
                        observed_cost: 1.0,
                    },
                )
                .unwrap();
        }
        assert_eq!(ledger.cum_cost(), 2.0);
        ledger
            .update(
                &inst,
                PullRecord {
                    t: 3,
                    arm: 1,
                    reward: 1.0,
                    observed_cost: 1.0,
                },
            )
            .unwrap();
        assert_eq!(ledger.cum_cost(), 3.0);
    }

    #[test]
    fn full_episode_of_unit_cost_gap_sums_to_horizon() {
        let inst = Instance::new(
            vec![
                ArmSpec::bernoulli(0.46, 0.0).unwrap(),
                ArmSpec::bernoulli(0.5, 1.0).unwrap(),
            ],
            0.1,
            "t",
        )
        .unwrap();
        let horizon = 500;
        let mut ledger = RegretLedger::new();
        for t in 1..=horizon {
            ledger
                .update(
                    &inst,
                    PullRecord {
                        t,
                        arm: 1,
                        reward: 0.0,
                        observed_cost: 1.0,
                    },
                )
                .unwrap();
        }
        assert_eq!(ledger.cum_cost(), horizon as f64);
        assert_eq!(ledger.cum_quality(), 0.0);
    }

    #[test]
    fn out_of_order_round_rejected() {
        let inst = two_arm();
        let mut ledger = RegretLedger::new();
        let err = ledger
            .update(
                &inst,
                PullRecord {
                    t: 2,
                    arm: 0,
                    reward: 0.0,
                    observed_cost: 1.0,
                },
            )
            .unwrap_err();
        assert!(matches!(err, Error::OutOfOrderRound { expected: 1, got: 2 }));
    }

    #[test]
    fn series_matches_totals_bitwise() {
        let inst = two_arm();
        let mut ledger = RegretLedger::new();
        for t in 1..=50 {
            ledger
                .update(
                    &inst,
                    PullRecord {
                        t,
                        arm: (t % 2) as usize,
                        reward: 0.0,
                        observed_cost: 0.0,
                    },
                )
                .unwrap();
        }
        let last = ledger.cumulative_series().last().unwrap();
        assert_eq!(last.1.to_bits(), ledger.cum_quality().to_bits());
        assert_eq!(last.2.to_bits(), ledger.cum_cost().to_bits());
    }
}
