//! Arm models: per-pull reward and cost distributions with support in [0, 1].

use rand::Rng;

use crate::error::{Error, Result};

/// Reward distribution of a single arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardModel {
    /// Coin flip in {0, 1} with the given mean.
    Bernoulli(f64),
    /// Every pull returns the mean itself.
    Deterministic(f64),
}

impl RewardModel {
    pub fn mean(&self) -> f64 {
        match *self {
            RewardModel::Bernoulli(m) | RewardModel::Deterministic(m) => m,
        }
    }
}

/// Cost model of a single arm. Mean cost lies in [0, 1] so per-round
/// instantaneous regrets never exceed 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostModel {
    /// Fixed cost, known to the agent a priori.
    Known(f64),
    /// Random {0, 1} cost with the given mean; only observed on pull.
    RandomBernoulli(f64),
}

impl CostModel {
    pub fn mean(&self) -> f64 {
        match *self {
            CostModel::Known(c) | CostModel::RandomBernoulli(c) => c,
        }
    }

    /// True when the cost is a fixed value the agent may read directly.
    pub fn is_known(&self) -> bool {
        matches!(self, CostModel::Known(_))
    }
}

/// One arm: a reward distribution paired with a cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSpec {
    reward: RewardModel,
    cost: CostModel,
}

impl ArmSpec {
    pub fn new(reward: RewardModel, cost: CostModel) -> Result<Self> {
        let mu = reward.mean();
        if !(0.0..=1.0).contains(&mu) || !mu.is_finite() {
            return Err(Error::InvalidInstance(format!(
                "mean reward {mu} outside [0, 1]"
            )));
        }
        let c = cost.mean();
        if !(0.0..=1.0).contains(&c) || !c.is_finite() {
            return Err(Error::InvalidInstance(format!(
                "mean cost {c} outside [0, 1]"
            )));
        }
        Ok(Self { reward, cost })
    }

    /// Bernoulli reward with a known fixed cost.
    pub fn bernoulli(mean_reward: f64, known_cost: f64) -> Result<Self> {
        Self::new(
            RewardModel::Bernoulli(mean_reward),
            CostModel::Known(known_cost),
        )
    }

    /// Deterministic reward with a known fixed cost.
    pub fn deterministic(mean_reward: f64, known_cost: f64) -> Result<Self> {
        Self::new(
            RewardModel::Deterministic(mean_reward),
            CostModel::Known(known_cost),
        )
    }

    pub fn reward_model(&self) -> RewardModel {
        self.reward
    }

    pub fn cost_model(&self) -> CostModel {
        self.cost
    }

    pub fn mean_reward(&self) -> f64 {
        self.reward.mean()
    }

    pub fn mean_cost(&self) -> f64 {
        self.cost.mean()
    }

    /// Sample one reward. Deterministic arms consume no randomness.
    pub fn draw_reward<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.reward {
            RewardModel::Bernoulli(m) => {
                if rng.gen_bool(m) {
                    1.0
                } else {
                    0.0
                }
            }
            RewardModel::Deterministic(m) => m,
        }
    }

    /// Sample one cost. Known costs consume no randomness.
    pub fn draw_cost<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.cost {
            CostModel::Known(c) => c,
            CostModel::RandomBernoulli(c) => {
                if rng.gen_bool(c) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
