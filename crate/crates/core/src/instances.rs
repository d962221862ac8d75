//! Named instance constructors used by the experiment presets and configs.

use crate::arm::{ArmSpec, CostModel, RewardModel};
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Parameters of the hard-instance family `phi`.
///
/// The family has K+1 Bernoulli arms: arm 0 is free with mean `p`, the K
/// paid arms (unit cost) share mean `p / (1 - theta)` except that arm
/// `distinguished` (when nonzero) is lifted to `(p + epsilon) / (1 - theta)`.
/// `distinguished = 0` selects the base member with no lifted arm. The
/// subsidy factor is bound to `theta` by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiParams {
    pub theta: f64,
    pub p: f64,
    pub epsilon: f64,
    /// Number of paid arms; the instance has `paid_arms + 1` arms.
    pub paid_arms: usize,
    /// Index of the lifted arm in `0..=paid_arms`; 0 means none.
    pub distinguished: usize,
}

impl PhiParams {
    pub fn new(
        theta: f64,
        p: f64,
        epsilon: f64,
        paid_arms: usize,
        distinguished: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameters(format!(
                "theta {theta} outside [0, 1)"
            )));
        }
        if !(p > 0.0 && p <= 0.5) {
            return Err(Error::InvalidParameters(format!(
                "p {p} outside (0, 1/2]"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "epsilon {epsilon} must be positive"
            )));
        }
        if (p + epsilon) / (1.0 - theta) >= 1.0 {
            return Err(Error::InvalidParameters(format!(
                "(p + epsilon) / (1 - theta) = {} must be < 1",
                (p + epsilon) / (1.0 - theta)
            )));
        }
        if paid_arms == 0 {
            return Err(Error::InvalidParameters("need at least one paid arm".into()));
        }
        if distinguished > paid_arms {
            return Err(Error::InvalidParameters(format!(
                "distinguished arm {distinguished} outside 0..={paid_arms}"
            )));
        }
        Ok(Self {
            theta,
            p,
            epsilon,
            paid_arms,
            distinguished,
        })
    }

    /// Extra constraint `epsilon <= p / 2` required by the divergence-bound
    /// checks; not enforced at construction.
    pub fn lower_bound_admissible(&self) -> bool {
        self.epsilon <= self.p / 2.0
    }
}

/// Build one member of the `phi` family.
pub fn make_phi(params: &PhiParams) -> Result<Instance> {
    let PhiParams {
        theta,
        p,
        epsilon,
        paid_arms,
        distinguished,
    } = *params;
    let mut arms = Vec::with_capacity(paid_arms + 1);
    arms.push(ArmSpec::new(RewardModel::Bernoulli(p), CostModel::Known(0.0))?);
    for j in 1..=paid_arms {
        let mean = if j == distinguished {
            (p + epsilon) / (1.0 - theta)
        } else {
            p / (1.0 - theta)
        };
        arms.push(ArmSpec::new(
            RewardModel::Bernoulli(mean),
            CostModel::Known(1.0),
        )?);
    }
    Instance::new(
        arms,
        theta,
        format!("phi(theta={theta};p={p};eps={epsilon};k={paid_arms};a={distinguished})"),
    )
}

/// Deterministic-reward instance on which posterior-sampling policies pay
/// heavily on the cost metric: one free arm barely above the tolerated
/// reward and K-1 paid arms with a slightly lower mean, all means shrinking
/// like `1 / sqrt(T)`.
pub fn make_ts_hard(alpha: f64, arm_count: usize, horizon: u64, d: f64) -> Result<Instance> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameters(format!(
            "alpha {alpha} outside [0, 1)"
        )));
    }
    if arm_count == 0 {
        return Err(Error::InvalidParameters("need at least one arm".into()));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameters("horizon must be >= 1".into()));
    }
    let sqrt_t = (horizon as f64).sqrt();
    if !(d > 0.0 && d < (sqrt_t / 2.0).min((1.0 - alpha) * sqrt_t)) {
        return Err(Error::InvalidParameters(format!(
            "d = {d} outside (0, min(sqrt(T)/2, (1-alpha)*sqrt(T)))"
        )));
    }
    let q = d / ((1.0 - alpha) * sqrt_t);
    let mut arms = Vec::with_capacity(arm_count);
    arms.push(ArmSpec::new(
        RewardModel::Deterministic((1.0 - alpha) * q + d / sqrt_t),
        CostModel::Known(0.0),
    )?);
    for _ in 1..arm_count {
        arms.push(ArmSpec::new(
            RewardModel::Deterministic(q),
            CostModel::Known(1.0),
        )?);
    }
    Instance::new(
        arms,
        alpha,
        format!("ts-hard(alpha={alpha};k={arm_count};T={horizon};d={d})"),
    )
}

/// Two Bernoulli arms with the free arm's mean sitting `1/sqrt(T)` above the
/// tolerated-reward boundary: means `(0.5(1-alpha) + 1/sqrt(T), 0.5)`, costs
/// `(0, 1)`.
pub fn make_fig1(horizon: u64, alpha: f64) -> Result<Instance> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameters(format!(
            "alpha {alpha} outside [0, 1)"
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameters("horizon must be >= 1".into()));
    }
    let mu1 = 0.5 * (1.0 - alpha) + 1.0 / (horizon as f64).sqrt();
    let arms = vec![
        ArmSpec::new(RewardModel::Bernoulli(mu1), CostModel::Known(0.0))?,
        ArmSpec::new(RewardModel::Bernoulli(0.5), CostModel::Known(1.0))?,
    ];
    Instance::new(arms, alpha, format!("fig1(T={horizon};alpha={alpha})"))
}

/// Two Bernoulli arms for the reward sweep: means `(0.5, mu2)` with
/// `mu2 in [0.3, 0.6]`, costs `(1, 0)`, subsidy factor 0.1.
pub fn make_table1(mu2: f64) -> Result<Instance> {
    if !(0.3..=0.6).contains(&mu2) {
        return Err(Error::InvalidParameters(format!(
            "mu2 {mu2} outside [0.3, 0.6]"
        )));
    }
    let arms = vec![
        ArmSpec::new(RewardModel::Bernoulli(0.5), CostModel::Known(1.0))?,
        ArmSpec::new(RewardModel::Bernoulli(mu2), CostModel::Known(0.0))?,
    ];
    Instance::new(arms, 0.1, format!("table1(mu2={mu2})"))
}
