//! Subsidy-aware UCB.
//!
//! Rounds 1..K pull each arm once. Afterwards each arm gets the optimistic
//! score `min(mean_estimate + radius, 1)`; arms within `(1 - alpha)` of the
//! best score form the feasible set and the cheapest of them is pulled.

use crate::error::{Error, Result};
use crate::EpisodeRng;

use super::{radius_unchecked, select_cheapest_feasible, Policy};

#[derive(Debug, Clone)]
pub struct CsUcb {
    horizon: u64,
    alpha: f64,
    costs: Vec<f64>,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    t: u64,
}

impl CsUcb {
    pub fn new(horizon: u64, alpha: f64, costs: Vec<f64>) -> Result<Self> {
        let k = costs.len();
        if k == 0 {
            return Err(Error::InvalidConfiguration("no arms".into()));
        }
        if horizon < k as u64 || horizon < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "horizon {horizon} too short for {k} arms"
            )));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidConfiguration(format!(
                "subsidy factor {alpha} outside [0, 1)"
            )));
        }
        Ok(Self {
            horizon,
            alpha,
            costs,
            pulls: vec![0; k],
            reward_sums: vec![0.0; k],
            t: 1,
        })
    }

    /// Clipped optimistic scores; defined once every arm has been pulled.
    pub fn scores(&self) -> Vec<f64> {
        (0..self.costs.len())
            .map(|i| {
                let mean = self.reward_sums[i] / self.pulls[i] as f64;
                (mean + radius_unchecked(self.pulls[i], self.horizon)).min(1.0)
            })
            .collect()
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}

impl Policy for CsUcb {
    fn select(&mut self, _rng: &mut EpisodeRng) -> usize {
        let k = self.costs.len() as u64;
        debug_assert_eq!(self.pulls.iter().sum::<u64>(), self.t - 1);
        if self.t <= k {
            return (self.t - 1) as usize;
        }
        select_cheapest_feasible(&self.scores(), &self.costs, self.alpha).selected
    }

    fn update(
        &mut self,
        arm: usize,
        reward: f64,
        _observed_cost: f64,
        _rng: &mut EpisodeRng,
    ) -> Result<()> {
        self.pulls[arm] += 1;
        self.reward_sums[arm] += reward;
        self.t += 1;
        Ok(())
    }
}
