//! Subsidy-aware Thompson sampling.
//!
//! Identical control flow to the UCB variant, but scores are posterior
//! samples. Two conjugate posteriors are supported:
//!
//! * Beta: uniform Beta(1, 1) prior over each mean, requiring {0, 1}
//!   rewards (optionally binarizing rewards in (0, 1) by an auxiliary coin
//!   flip, which preserves the mean).
//! * Gaussian: N(0, sigma0^2) prior with observation noise sigma(n)^2.
//!   `sigma0_sq = inf` selects the flat prior whose posterior is
//!   N(reward_sum / pulls, sigman_sq / pulls). Samples are deliberately not
//!   clipped to [0, 1], so scores can be negative; if the feasible set comes
//!   up empty the best-score arm is pulled.

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal};

use crate::error::{Error, Result};
use crate::EpisodeRng;

use super::{select_cheapest_feasible, Policy};

/// Posterior family used for the per-arm quality scores.
#[derive(Debug, Clone)]
pub enum TsPosterior {
    Beta {
        binarize_rewards: bool,
        successes: Vec<f64>,
        failures: Vec<f64>,
    },
    Gaussian {
        sigma0_sq: f64,
        sigman_sq: f64,
    },
}

impl TsPosterior {
    pub fn beta(binarize_rewards: bool) -> Self {
        TsPosterior::Beta {
            binarize_rewards,
            successes: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn gaussian(sigma0_sq: f64, sigman_sq: f64) -> Result<Self> {
        if sigma0_sq.is_nan() || sigma0_sq <= 0.0 {
            return Err(Error::InvalidConfiguration(
                "sigma0_sq must be positive (may be infinite)".into(),
            ));
        }
        if !sigman_sq.is_finite() || sigman_sq <= 0.0 {
            return Err(Error::InvalidConfiguration(
                "sigman_sq must be a positive finite value".into(),
            ));
        }
        Ok(TsPosterior::Gaussian {
            sigma0_sq,
            sigman_sq,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsTs {
    alpha: f64,
    costs: Vec<f64>,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    posterior: TsPosterior,
    t: u64,
}

impl CsTs {
    pub fn new(horizon: u64, alpha: f64, costs: Vec<f64>, posterior: TsPosterior) -> Result<Self> {
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
        let posterior = match posterior {
            TsPosterior::Beta {
                binarize_rewards, ..
            } => TsPosterior::Beta {
                binarize_rewards,
                successes: vec![0.0; k],
                failures: vec![0.0; k],
            },
            g => g,
        };
        Ok(Self {
            alpha,
            costs,
            pulls: vec![0; k],
            reward_sums: vec![0.0; k],
            posterior,
            t: 1,
        })
    }

    /// Posterior mean and variance of one arm's quality (Gaussian variant).
    pub fn gaussian_posterior(&self, arm: usize) -> Option<(f64, f64)> {
        match &self.posterior {
            TsPosterior::Gaussian {
                sigma0_sq,
                sigman_sq,
            } => {
                let n = self.pulls[arm] as f64;
                let mean = self.reward_sums[arm] / (sigman_sq / sigma0_sq + n);
                let var = 1.0 / (1.0 / sigma0_sq + n / sigman_sq);
                Some((mean, var))
            }
            _ => None,
        }
    }

    /// Beta posterior parameters `(1 + successes, 1 + failures)` of one arm.
    pub fn beta_posterior(&self, arm: usize) -> Option<(f64, f64)> {
        match &self.posterior {
            TsPosterior::Beta {
                successes,
                failures,
                ..
            } => Some((1.0 + successes[arm], 1.0 + failures[arm])),
            _ => None,
        }
    }

    fn sample_scores(&self, rng: &mut EpisodeRng) -> Vec<f64> {
        (0..self.costs.len())
            .map(|i| match &self.posterior {
                TsPosterior::Beta {
                    successes,
                    failures,
                    ..
                } => Beta::new(1.0 + successes[i], 1.0 + failures[i])
                    .expect("valid Beta parameters")
                    .sample(rng),
                TsPosterior::Gaussian { .. } => {
                    let (mean, var) = self.gaussian_posterior(i).expect("gaussian variant");
                    Normal::new(mean, var.sqrt())
                        .expect("valid Normal parameters")
                        .sample(rng)
                }
            })
            .collect()
    }
}

impl Policy for CsTs {
    fn select(&mut self, rng: &mut EpisodeRng) -> usize {
        let k = self.costs.len() as u64;
        debug_assert_eq!(self.pulls.iter().sum::<u64>(), self.t - 1);
        if self.t <= k {
            return (self.t - 1) as usize;
        }
        let scores = self.sample_scores(rng);
        select_cheapest_feasible(&scores, &self.costs, self.alpha).selected
    }

    fn update(
        &mut self,
        arm: usize,
        reward: f64,
        _observed_cost: f64,
        rng: &mut EpisodeRng,
    ) -> Result<()> {
        if let TsPosterior::Beta {
            binarize_rewards,
            successes,
            failures,
        } = &mut self.posterior
        {
            let success = if reward == 0.0 {
                false
            } else if reward == 1.0 {
                true
            } else if *binarize_rewards {
                rng.gen_bool(reward)
            } else {
                return Err(Error::InvalidConfiguration(format!(
                    "Beta posterior observed non-binary reward {reward}; \
                     enable binarize_rewards or use the Gaussian variant"
                )));
            };
            if success {
                successes[arm] += 1.0;
            } else {
                failures[arm] += 1.0;
            }
        }
        self.pulls[arm] += 1;
        self.reward_sums[arm] += reward;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn rng(seed: u64) -> EpisodeRng {
        EpisodeRng::seed_from_u64(seed)
    }

    #[test]
    fn gaussian_posterior_worked_example() {
        // sigma0 = sigman = 1, three pulls summing to 1.5:
        // mean 1.5/4 = 0.375, variance 1/4.
        let mut policy = CsTs::new(
            100,
            0.1,
            vec![0.0],
            TsPosterior::gaussian(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut r = rng(1);
        for reward in [1.0, 0.5, 0.0] {
            let arm = policy.select(&mut r);
            policy.update(arm, reward, 0.0, &mut r).unwrap();
        }
        let (mean, var) = policy.gaussian_posterior(0).unwrap();
        assert_abs_diff_eq!(mean, 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(var, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn flat_prior_posterior_is_sample_mean() {
        let mut policy = CsTs::new(
            100,
            0.1,
            vec![0.0],
            TsPosterior::gaussian(f64::INFINITY, 1.0).unwrap(),
        )
        .unwrap();
        let mut r = rng(2);
        for reward in [1.0, 0.0] {
            let arm = policy.select(&mut r);
            policy.update(arm, reward, 0.0, &mut r).unwrap();
        }
        let (mean, var) = policy.gaussian_posterior(0).unwrap();
        assert_abs_diff_eq!(mean, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(var, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn beta_posterior_after_init_pull() {
        let mut policy = CsTs::new(100, 0.1, vec![0.0, 1.0], TsPosterior::beta(false)).unwrap();
        let mut r = rng(3);
        let arm = policy.select(&mut r);
        assert_eq!(arm, 0);
        policy.update(arm, 1.0, 0.0, &mut r).unwrap();
        assert_eq!(policy.beta_posterior(0).unwrap(), (2.0, 1.0));
        assert_eq!(policy.beta_posterior(1).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn non_binary_reward_without_binarization_errors() {
        let mut policy = CsTs::new(100, 0.1, vec![0.0], TsPosterior::beta(false)).unwrap();
        let mut r = rng(4);
        let arm = policy.select(&mut r);
        assert!(policy.update(arm, 0.46, 0.0, &mut r).is_err());

        let mut policy = CsTs::new(100, 0.1, vec![0.0], TsPosterior::beta(true)).unwrap();
        let arm = policy.select(&mut r);
        policy.update(arm, 0.46, 0.0, &mut r).unwrap();
        let (a, b) = policy.beta_posterior(0).unwrap();
        assert_eq!(a + b, 3.0);
    }

    #[test]
    fn identical_states_and_seeds_select_identically() {
        let build = || CsTs::new(50, 0.1, vec![0.0, 1.0], TsPosterior::beta(false)).unwrap();
        let mut a = build();
        let mut b = build();
        let mut ra = rng(9);
        let mut rb = rng(9);
        for _ in 0..50 {
            let arm_a = a.select(&mut ra);
            let arm_b = b.select(&mut rb);
            assert_eq!(arm_a, arm_b);
            a.update(arm_a, 1.0, 0.0, &mut ra).unwrap();
            b.update(arm_b, 1.0, 0.0, &mut rb).unwrap();
        }
    }

    #[test]
    fn gaussian_config_validation() {
        assert!(TsPosterior::gaussian(0.0, 1.0).is_err());
        assert!(TsPosterior::gaussian(1.0, f64::INFINITY).is_err());
        assert!(TsPosterior::gaussian(f64::INFINITY, 1.0).is_ok());
    }
}
