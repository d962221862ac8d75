//! Problem instances and their derived benchmarks.
//!
//! An instance is an ordered arm list plus a subsidy factor `alpha`. The agent
//! is indifferent between arms whose mean reward reaches `(1 - alpha)` times
//! the best mean reward; the benchmarks single out the best-reward arm
//! (`m_star`), the tolerated-reward floor, the feasible set, and the cheapest
//! feasible arm (`i_star`) that both regret metrics are measured against.

use crate::arm::{ArmSpec, CostModel};
use crate::error::{Error, Result};

/// Derived benchmarks of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmarks {
    /// Arm with the highest mean reward (lowest index on ties).
    pub m_star: usize,
    /// Cheapest arm in the feasible set (ties: lowest cost, then highest
    /// mean reward, then lowest index).
    pub i_star: usize,
    /// Smallest tolerated reward `(1 - alpha) * mu[m_star]`.
    pub tolerated_reward: f64,
    /// Arms whose mean reward is at least the tolerated reward, ascending.
    pub feasible: Vec<usize>,
}

/// Per-pull regret contributions of one arm, computed against true means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantRegret {
    /// Shortfall below the tolerated reward, clipped at zero.
    pub quality: f64,
    /// Mean-cost excess over the cheapest feasible arm, clipped at zero.
    pub cost: f64,
    /// Shortfall below the best mean reward, counted only on zero-cost arms.
    pub modified_quality: f64,
}

/// Compute the benchmarks for an arm list under subsidy factor `alpha`.
pub fn compute_benchmarks(arms: &[ArmSpec], alpha: f64) -> Result<Benchmarks> {
    if arms.is_empty() {
        return Err(Error::InvalidInstance("empty arm list".into()));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidInstance(format!(
            "subsidy factor {alpha} outside [0, 1)"
        )));
    }

    let mut m_star = 0;
    for (i, arm) in arms.iter().enumerate() {
        if arm.mean_reward() > arms[m_star].mean_reward() {
            m_star = i;
        }
    }
    let tolerated_reward = (1.0 - alpha) * arms[m_star].mean_reward();

    let feasible: Vec<usize> = (0..arms.len())
        .filter(|&i| arms[i].mean_reward() >= tolerated_reward)
        .collect();
    debug_assert!(feasible.contains(&m_star));

    let mut i_star = feasible[0];
    for &i in &feasible[1..] {
        let better_cost = arms[i].mean_cost() < arms[i_star].mean_cost();
        let tied_cost = arms[i].mean_cost() == arms[i_star].mean_cost();
        if better_cost || (tied_cost && arms[i].mean_reward() > arms[i_star].mean_reward()) {
            i_star = i;
        }
    }

    Ok(Benchmarks {
        m_star,
        i_star,
        tolerated_reward,
        feasible,
    })
}

/// A full problem: arms, subsidy factor, and the benchmarks derived from them.
///
/// Immutable after construction and safely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    arms: Vec<ArmSpec>,
    alpha: f64,
    label: String,
    benchmarks: Benchmarks,
}

impl Instance {
    pub fn new(arms: Vec<ArmSpec>, alpha: f64, label: impl Into<String>) -> Result<Self> {
        let benchmarks = compute_benchmarks(&arms, alpha)?;
        Ok(Self {
            arms,
            alpha,
            label: label.into(),
            benchmarks,
        })
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn arm(&self, index: usize) -> &ArmSpec {
        &self.arms[index]
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn benchmarks(&self) -> &Benchmarks {
        &self.benchmarks
    }

    /// True when every arm's cost is a known fixed value.
    pub fn costs_known(&self) -> bool {
        self.arms.iter().all(|a| a.cost_model().is_known())
    }

    /// Known cost vector, or `None` if any arm has a random cost.
    pub fn known_costs(&self) -> Option<Vec<f64>> {
        self.costs_known()
            .then(|| self.arms.iter().map(|a| a.mean_cost()).collect())
    }

    /// Mean cost vector (defined for both cost models).
    pub fn mean_costs(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mean_cost()).collect()
    }

    /// Same instance with every known cost re-encoded as a random {0, 1}
    /// cost of equal mean, hiding the values from the agent.
    pub fn with_random_bernoulli_costs(&self) -> Result<Instance> {
        let arms = self
            .arms
            .iter()
            .map(|a| {
                ArmSpec::new(
                    a.reward_model(),
                    CostModel::RandomBernoulli(a.mean_cost()),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(arms, self.alpha, format!("{}+random-costs", self.label))
    }

    /// Per-pull regret contributions of `arm`, against true means.
    pub fn instantaneous_regret(&self, arm: usize) -> Result<InstantRegret> {
        if arm >= self.arms.len() {
            return Err(Error::InvalidParameters(format!(
                "arm index {arm} out of range for {} arms",
                self.arms.len()
            )));
        }
        let b = &self.benchmarks;
        let mu = self.arms[arm].mean_reward();
        let quality = (b.tolerated_reward - mu).max(0.0);
        let cost = (self.arms[arm].mean_cost() - self.arms[b.i_star].mean_cost()).max(0.0);
        let modified_quality = if self.arms[arm].mean_cost() == 0.0 {
            (self.arms[b.m_star].mean_reward() - mu).max(0.0)
        } else {
            0.0
        };
        Ok(InstantRegret {
            quality,
            cost,
            modified_quality,
        })
    }
}
