//! Multi-armed bandits with a cost subsidy.
//!
//! The agent repeatedly pulls one of K arms with unknown reward
//! distributions and per-pull costs, and is willing to forgo a fraction
//! `alpha` of the best mean reward in exchange for lower cost. Performance
//! is tracked on two clipped metrics at once: quality regret against the
//! tolerated reward `(1 - alpha) * mu[m_star]`, and cost regret against the
//! cheapest arm whose mean reward reaches that floor.
//!
//! The crate provides:
//!
//! * [`instance`]: arm/instance model with derived benchmarks, and
//!   [`regret`]: the dual regret ledger;
//! * [`policies`]: subsidy-aware UCB, Thompson sampling (Beta and Gaussian
//!   posteriors), explore-then-commit with known or unknown costs, and
//!   baselines;
//! * [`bernoulli_factory`]: an exact linear Bernoulli factory, and
//!   [`reduction`]: the subsidy-removal wrapper built on it;
//! * [`instances`]: the named instance families used by the experiments;
//! * [`runner`] / [`config`] / [`export`]: a seeded, reproducible
//!   experiment runner with CSV output (parallel replications behind the
//!   `parallel` feature, identical results either way);
//! * [`verify`]: independent oracles and numeric property checks.

pub mod arm;
pub mod bernoulli_factory;
pub mod config;
pub mod error;
pub mod export;
pub mod instance;
pub mod instances;
pub mod policies;
pub mod presets;
pub mod reduction;
pub mod regret;
pub mod runner;
pub mod verify;

/// Random stream used by episodes; fixed so seeded runs replay bit-for-bit
/// across platforms and releases.
pub type EpisodeRng = rand_chacha::ChaCha12Rng;

pub use arm::{ArmSpec, CostModel, RewardModel};
pub use error::{Error, Result};
pub use instance::{compute_benchmarks, Benchmarks, InstantRegret, Instance};
pub use regret::{PullRecord, RegretLedger};
