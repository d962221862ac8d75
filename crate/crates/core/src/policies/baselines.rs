//! Trivial baselines used as oracles in tests and experiments.

use crate::error::Result;
use crate::EpisodeRng;

use super::Policy;

/// Always pulls one fixed arm.
#[derive(Debug, Clone, Copy)]
pub struct FixedArm {
    arm: usize,
}

impl FixedArm {
    pub fn new(arm: usize) -> Self {
        Self { arm }
    }
}

impl Policy for FixedArm {
    fn select(&mut self, _rng: &mut EpisodeRng) -> usize {
        self.arm
    }

    fn update(&mut self, _arm: usize, _r: f64, _c: f64, _rng: &mut EpisodeRng) -> Result<()> {
        Ok(())
    }
}

/// Cycles through the arms in index order: round t pulls `(t - 1) mod K`.
#[derive(Debug, Clone, Copy)]
pub struct RoundRobin {
    arm_count: usize,
    t: u64,
}

impl RoundRobin {
    pub fn new(arm_count: usize) -> Self {
        assert!(arm_count > 0);
        Self { arm_count, t: 1 }
    }
}

impl Policy for RoundRobin {
    fn select(&mut self, _rng: &mut EpisodeRng) -> usize {
        ((self.t - 1) % self.arm_count as u64) as usize
    }

    fn update(&mut self, _arm: usize, _r: f64, _c: f64, _rng: &mut EpisodeRng) -> Result<()> {
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn round_robin_cycles() {
        let mut policy = RoundRobin::new(3);
        let mut rng = EpisodeRng::seed_from_u64(0);
        let mut seen = Vec::new();
        for _ in 0..7 {
            let arm = policy.select(&mut rng);
            seen.push(arm);
            policy.update(arm, 0.0, 0.0, &mut rng).unwrap();
        }
        assert_eq!(seen, vec![0, 1, 2, 0, 1, 2, 0]);
    }
}
