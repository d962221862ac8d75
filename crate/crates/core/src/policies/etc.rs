//! Subsidy-aware explore-then-commit, with known and unknown costs.
//!
//! Rounds 1..K*tau cycle through the arms so each receives exactly tau
//! pulls. Afterwards the policy keeps upper/lower confidence bounds on every
//! mean reward, takes the best lower bound as the quality anchor, treats
//! arms whose upper bound reaches `(1 - alpha)` times that anchor as
//! feasible, and pulls the cheapest feasible arm. The unknown-cost variant
//! additionally tracks mean-cost estimates and minimizes the lower
//! confidence bound on cost instead of the known cost.

use crate::error::{Error, Result};
use crate::EpisodeRng;

use super::{default_tau, pick_cheapest, radius_unchecked, Policy};

/// Outcome of the committed-phase selection step (known costs).
#[derive(Debug, Clone, PartialEq)]
pub struct EtcChoice {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// Arm with the best lower confidence bound (lowest index on ties).
    pub best_lower_arm: usize,
    pub threshold: f64,
    pub feasible: Vec<usize>,
    pub selected: usize,
}

/// Committed-phase selection from mean estimates, known costs.
pub fn etc_choice(
    mean_estimates: &[f64],
    pulls: &[u64],
    costs: &[f64],
    alpha: f64,
    horizon: u64,
) -> EtcChoice {
    let k = mean_estimates.len();
    assert!(k > 0 && pulls.len() == k && costs.len() == k);
    let mut upper = Vec::with_capacity(k);
    let mut lower = Vec::with_capacity(k);
    for i in 0..k {
        let radius = radius_unchecked(pulls[i], horizon);
        upper.push((mean_estimates[i] + radius).min(1.0));
        lower.push((mean_estimates[i] - radius).max(0.0));
    }
    let mut best = 0;
    for i in 1..k {
        if lower[i] > lower[best] {
            best = i;
        }
    }
    let threshold = (1.0 - alpha) * lower[best];
    let feasible: Vec<usize> = (0..k).filter(|&i| upper[i] >= threshold).collect();
    // upper >= lower >= (1 - alpha) * lower >= 0, so the anchor arm is
    // always feasible.
    assert!(
        feasible.contains(&best),
        "anchor arm left the feasible set"
    );
    let selected = pick_cheapest(&feasible, costs, &upper).expect("feasible set is nonempty");
    EtcChoice {
        upper,
        lower,
        best_lower_arm: best,
        threshold,
        feasible,
        selected,
    }
}

/// Outcome of the committed-phase selection step (unknown costs).
#[derive(Debug, Clone, PartialEq)]
pub struct EtcUcChoice {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub cost_lower: Vec<f64>,
    pub best_lower_arm: usize,
    pub threshold: f64,
    pub feasible: Vec<usize>,
    pub selected: usize,
}

/// Committed-phase selection from mean and cost estimates.
pub fn etc_uc_choice(
    mean_estimates: &[f64],
    cost_estimates: &[f64],
    pulls: &[u64],
    alpha: f64,
    horizon: u64,
) -> EtcUcChoice {
    let k = mean_estimates.len();
    assert!(k > 0 && cost_estimates.len() == k && pulls.len() == k);
    let mut upper = Vec::with_capacity(k);
    let mut lower = Vec::with_capacity(k);
    let mut cost_lower = Vec::with_capacity(k);
    for i in 0..k {
        let radius = radius_unchecked(pulls[i], horizon);
        upper.push((mean_estimates[i] + radius).min(1.0));
        lower.push((mean_estimates[i] - radius).max(0.0));
        cost_lower.push((cost_estimates[i] - radius).max(0.0));
    }
    let mut best = 0;
    for i in 1..k {
        if lower[i] > lower[best] {
            best = i;
        }
    }
    let threshold = (1.0 - alpha) * lower[best];
    let feasible: Vec<usize> = (0..k).filter(|&i| upper[i] >= threshold).collect();
    assert!(
        feasible.contains(&best),
        "anchor arm left the feasible set"
    );
    // Lowest cost lower bound wins; ties go to the lowest index.
    let mut selected = feasible[0];
    for &i in &feasible[1..] {
        if cost_lower[i] < cost_lower[selected] {
            selected = i;
        }
    }
    EtcUcChoice {
        upper,
        lower,
        cost_lower,
        best_lower_arm: best,
        threshold,
        feasible,
        selected,
    }
}

fn validate_phase_budget(horizon: u64, k: usize, tau: Option<u64>) -> Result<u64> {
    let tau = match tau {
        Some(t) => t,
        None => default_tau(horizon, k)?,
    };
    if tau == 0 {
        return Err(Error::InvalidConfiguration(
            "exploration budget tau must be >= 1".into(),
        ));
    }
    if (k as u64).saturating_mul(tau) > horizon {
        return Err(Error::InvalidConfiguration(format!(
            "exploration phase K*tau = {} exceeds horizon {horizon}",
            k as u64 * tau
        )));
    }
    Ok(tau)
}

#[derive(Debug, Clone)]
pub struct CsEtc {
    horizon: u64,
    alpha: f64,
    tau: u64,
    costs: Vec<f64>,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    t: u64,
}

impl CsEtc {
    pub fn new(horizon: u64, alpha: f64, costs: Vec<f64>, tau: Option<u64>) -> Result<Self> {
        let k = costs.len();
        if k == 0 {
            return Err(Error::InvalidConfiguration("no arms".into()));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidConfiguration(format!(
                "subsidy factor {alpha} outside [0, 1)"
            )));
        }
        if horizon < 2 {
            return Err(Error::InvalidConfiguration("horizon must be >= 2".into()));
        }
        let tau = validate_phase_budget(horizon, k, tau)?;
        Ok(Self {
            horizon,
            alpha,
            tau,
            costs,
            pulls: vec![0; k],
            reward_sums: vec![0.0; k],
            t: 1,
        })
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    fn exploring(&self) -> bool {
        self.t <= self.costs.len() as u64 * self.tau
    }
}

impl Policy for CsEtc {
    fn select(&mut self, _rng: &mut EpisodeRng) -> usize {
        let k = self.costs.len() as u64;
        debug_assert_eq!(self.pulls.iter().sum::<u64>(), self.t - 1);
        if self.exploring() {
            return ((self.t - 1) % k) as usize;
        }
        let means: Vec<f64> = (0..self.costs.len())
            .map(|i| self.reward_sums[i] / self.pulls[i] as f64)
            .collect();
        etc_choice(&means, &self.pulls, &self.costs, self.alpha, self.horizon).selected
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

#[derive(Debug, Clone)]
pub struct CsEtcUnknownCost {
    horizon: u64,
    alpha: f64,
    tau: u64,
    arm_count: usize,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    cost_sums: Vec<f64>,
    t: u64,
}

impl CsEtcUnknownCost {
    pub fn new(horizon: u64, alpha: f64, arm_count: usize, tau: Option<u64>) -> Result<Self> {
        if arm_count == 0 {
            return Err(Error::InvalidConfiguration("no arms".into()));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidConfiguration(format!(
                "subsidy factor {alpha} outside [0, 1)"
            )));
        }
        if horizon < 2 {
            return Err(Error::InvalidConfiguration("horizon must be >= 2".into()));
        }
        let tau = validate_phase_budget(horizon, arm_count, tau)?;
        Ok(Self {
            horizon,
            alpha,
            tau,
            arm_count,
            pulls: vec![0; arm_count],
            reward_sums: vec![0.0; arm_count],
            cost_sums: vec![0.0; arm_count],
            t: 1,
        })
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}

impl Policy for CsEtcUnknownCost {
    fn select(&mut self, _rng: &mut EpisodeRng) -> usize {
        let k = self.arm_count as u64;
        debug_assert_eq!(self.pulls.iter().sum::<u64>(), self.t - 1);
        if self.t <= k * self.tau {
            return ((self.t - 1) % k) as usize;
        }
        let means: Vec<f64> = (0..self.arm_count)
            .map(|i| self.reward_sums[i] / self.pulls[i] as f64)
            .collect();
        let cost_means: Vec<f64> = (0..self.arm_count)
            .map(|i| self.cost_sums[i] / self.pulls[i] as f64)
            .collect();
        etc_uc_choice(&means, &cost_means, &self.pulls, self.alpha, self.horizon).selected
    }

    fn update(
        &mut self,
        arm: usize,
        reward: f64,
        observed_cost: f64,
        _rng: &mut EpisodeRng,
    ) -> Result<()> {
        self.pulls[arm] += 1;
        self.reward_sums[arm] += reward;
        self.cost_sums[arm] += observed_cost;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn rng() -> EpisodeRng {
        EpisodeRng::seed_from_u64(5)
    }

    #[test]
    fn exploration_alternates_and_counts_exactly() {
        // T = 5000, K = 2 defaults to tau = 185; rounds 1..370 alternate 0,1.
        let mut policy = CsEtc::new(5000, 0.1, vec![0.0, 1.0], None).unwrap();
        assert_eq!(policy.tau(), 185);
        let mut r = rng();
        for t in 1..=370u64 {
            let arm = policy.select(&mut r);
            assert_eq!(arm as u64, (t - 1) % 2);
            policy.update(arm, 0.0, 0.0, &mut r).unwrap();
        }
        assert_eq!(policy.pulls(), &[185, 185]);
    }

    #[test]
    fn committed_phase_worked_example() {
        // Estimates (0.46, 0.50) after 293 pulls each, T = 10000, alpha 0.1.
        let choice = etc_choice(&[0.46, 0.50], &[293, 293], &[0.0, 1.0], 0.1, 10_000);
        let beta = 0.250737347749;
        assert_abs_diff_eq!(choice.lower[0], 0.46 - beta, epsilon = 1e-9);
        assert_abs_diff_eq!(choice.lower[1], 0.50 - beta, epsilon = 1e-9);
        assert_eq!(choice.best_lower_arm, 1);
        assert_abs_diff_eq!(choice.threshold, 0.9 * (0.50 - beta), epsilon = 1e-9);
        assert_abs_diff_eq!(choice.upper[0], 0.46 + beta, epsilon = 1e-9);
        assert_abs_diff_eq!(choice.upper[1], 0.50 + beta, epsilon = 1e-9);
        assert_eq!(choice.feasible, vec![0, 1]);
        assert_eq!(choice.selected, 0);
    }

    #[test]
    fn tight_radii_leave_only_the_best_arm_feasible() {
        // With huge pull counts the radii vanish; at alpha = 0 only the
        // best-mean arm stays feasible when means are distinct.
        let pulls = [1_000_000_000, 1_000_000_000];
        let choice = etc_choice(&[0.3, 0.7], &pulls, &[0.0, 1.0], 0.0, 100);
        assert_eq!(choice.feasible, vec![1]);
        assert_eq!(choice.selected, 1);
    }

    #[test]
    fn oversized_exploration_rejected() {
        assert!(CsEtc::new(100, 0.1, vec![0.0, 1.0], Some(51)).is_err());
        assert!(CsEtc::new(100, 0.1, vec![0.0, 1.0], Some(50)).is_ok());
    }

    #[test]
    fn unknown_cost_selection_matches_known_after_exploration() {
        // Degenerate {0, 1} costs are learned exactly, and the radius after
        // 293 pulls (~0.2507) is below 0.5, so the cost-LCB order matches the
        // true order and the same arm is selected.
        let means = [0.46, 0.50];
        let pulls = [293, 293];
        let uc = etc_uc_choice(&means, &[0.0, 1.0], &pulls, 0.1, 10_000);
        let known = etc_choice(&means, &pulls, &[0.0, 1.0], 0.1, 10_000);
        assert_eq!(uc.selected, known.selected);
        assert!(uc.cost_lower[1] > 0.0);
    }

    #[test]
    fn identical_cost_estimates_tie_break_to_lowest_index() {
        let choice = etc_uc_choice(&[0.5, 0.5], &[0.4, 0.4], &[10, 10], 0.1, 1000);
        assert_eq!(choice.selected, 0);
    }

    #[test]
    fn single_arm_always_selected() {
        let mut policy = CsEtcUnknownCost::new(10, 0.1, 1, None).unwrap();
        let mut r = rng();
        for _ in 0..10 {
            let arm = policy.select(&mut r);
            assert_eq!(arm, 0);
            policy.update(arm, 1.0, 1.0, &mut r).unwrap();
        }
    }
}
