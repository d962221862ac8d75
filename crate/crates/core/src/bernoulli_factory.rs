//! Exact linear Bernoulli factory.
//!
//! Given a coin of unknown mean `r` and a scale `C > 1` with the guarantee
//! `r <= (1 - delta) / C`, [`factory_sample`] returns a bit that is exactly
//! `Bernoulli(C * r)`-distributed and reports how many coin flips it spent.
//! Expected flips stay below `9.5 * C / delta` uniformly over the admissible
//! mean range; the statistical tests in this module and the acceptance suite
//! are the conformance check for both properties.
//!
//! Construction: a token walks on the nonnegative integers starting at 1.
//! Each step samples `Bernoulli(C_j r / (1 + C_j r))` by the two-coin method
//! and moves the token down on success, up otherwise. Absorption at zero
//! emits 1. For a walk with this down probability, the chance of ever
//! reaching zero from height k is `(C_j r)^k`, so the unresolved escape
//! branch carries probability mass `(C_j r)^k` of still emitting 1. Whenever
//! the token reaches the current cap `k_j`, that mass is split exactly:
//! an external coin kills the run (emits 0) with probability
//! `1 - m_j^(-k_j)`, and survivors continue the walk with the boosted scale
//! `C_{j+1} = m_j * C_j` and a doubled cap, which restores the same
//! invariant one level up. The boost schedule `m_j = (1-delta)^(-2^-(j+1))`
//! keeps `C_j r < 1` at every level (the walk never gains downward drift,
//! so the hit-probability identity stays valid), while the cap schedule
//! `k_j = ceil(4.6 * 2^j / -ln(1-delta))` makes each kill fire with
//! probability at least `1 - e^-2.3`, which bounds the expected work of the
//! whole cascade by a constant multiple of the level-0 walk.

use rand::Rng;

use crate::error::{Error, Result};

/// Scale and admissibility margin of a factory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoryConfig {
    scale: f64,
    margin: f64,
}

impl FactoryConfig {
    /// `scale` is the multiplier C > 1; `margin` is delta in (0, 1). Input
    /// coins must satisfy `r <= (1 - margin) / scale`.
    pub fn new(scale: f64, margin: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 1.0 {
            return Err(Error::InvalidParameters(format!(
                "factory scale must be finite and > 1, got {scale}"
            )));
        }
        if !margin.is_finite() || !(0.0..1.0).contains(&margin) || margin == 0.0 {
            return Err(Error::InvalidParameters(format!(
                "factory margin must lie in (0, 1), got {margin}"
            )));
        }
        Ok(Self { scale, margin })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest admissible input mean `(1 - margin) / scale`.
    pub fn max_input_mean(&self) -> f64 {
        (1.0 - self.margin) / self.scale
    }

    /// Contractual bound on the expected flips per sample: `9.5 * C / delta`.
    pub fn expected_flip_bound(&self) -> f64 {
        9.5 * self.scale / self.margin
    }
}

/// One factory output together with its flip count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorySample {
    pub bit: bool,
    pub flips: u64,
}

/// Cap growth constant; per-cap kill probability is at least 1 - e^(-2.3).
const CAP_SCALE: f64 = 4.6;

/// Draw one exactly `Bernoulli(scale * r)` bit from a `Bernoulli(r)` coin.
///
/// `coin` is invoked for every input flip and may fail (finite test tapes
/// signal exhaustion). Every sample consumes at least one flip. All
/// auxiliary randomness comes from `rng`, so a seeded stream replays the
/// whole sample path.
pub fn factory_sample<R, F>(
    config: &FactoryConfig,
    coin: &mut F,
    rng: &mut R,
) -> Result<FactorySample>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<bool>,
{
    let margin_log = -(1.0 - config.margin).ln();
    let mut flips: u64 = 0;
    let mut scale = config.scale;
    let mut level: i32 = 0;
    let mut cap = level_cap(0, margin_log);
    let mut pos: u64 = 1;

    let bit = loop {
        if pos == 0 {
            break true;
        }
        if pos >= cap {
            // Split the escape mass: kill now, or boost the scale and keep
            // walking toward the doubled cap.
            let boost = (1.0 - config.margin).powf(-0.5f64.powi(level + 1));
            let survive = boost.powf(-(pos as f64));
            if !rng.gen_bool(survive.clamp(0.0, 1.0)) {
                break false;
            }
            scale *= boost;
            level += 1;
            cap = level_cap(level, margin_log);
            continue;
        }
        // Two-coin sample of Bernoulli(scale * r / (1 + scale * r)).
        let down = loop {
            if rng.gen_bool(scale / (1.0 + scale)) {
                flips += 1;
                if coin(rng).map_err(|e| attach_flips(e, flips))? {
                    break true;
                }
            } else {
                break false;
            }
        };
        if down {
            pos -= 1;
        } else {
            pos += 1;
        }
    };

    if flips == 0 {
        // Keep the invariant that a sample consumes at least one flip; the
        // discarded flip is independent of the output, so exactness holds.
        flips += 1;
        coin(rng).map_err(|e| attach_flips(e, flips))?;
    }
    Ok(FactorySample { bit, flips })
}

fn level_cap(level: i32, margin_log: f64) -> u64 {
    let cap = (CAP_SCALE * 2f64.powi(level) / margin_log).ceil();
    if cap >= u64::MAX as f64 {
        u64::MAX
    } else {
        (cap as u64).max(1)
    }
}

fn attach_flips(err: Error, flips: u64) -> Error {
    match err {
        Error::CoinExhausted { .. } => Error::CoinExhausted { flips },
        other => other,
    }
}

/// Coin backed by a finite tape of bits; flips past the end fail.
pub fn tape_coin<R: Rng + ?Sized>(
    bits: Vec<bool>,
) -> impl FnMut(&mut R) -> Result<bool> {
    let mut iter = bits.into_iter();
    move |_rng: &mut R| iter.next().ok_or(Error::CoinExhausted { flips: 0 })
}
