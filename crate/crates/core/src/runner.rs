//! Episode execution, seeded replication, sweeps, and aggregation.
//!
//! Replication j always uses seed `base_seed + j` and owns its policy state
//! and random stream, so batches are embarrassingly parallel and their
//! results are a pure function of the config: the parallel and sequential
//! paths produce identical output, and aggregation is a deterministic
//! reduction applied in replication order.

use rand::SeedableRng;

use crate::config::{ExperimentConfig, PolicySpec, RecordGranularity};
use crate::error::{Error, Result};
use crate::export::TrajectoryRow;
use crate::instance::Instance;
use crate::policies::build_policy;
use crate::regret::{PullRecord, RegretLedger};
use crate::EpisodeRng;

/// Run one policy on one instance for `horizon` rounds; fully deterministic
/// given the seed.
pub fn run_episode(
    instance: &Instance,
    policy_spec: &PolicySpec,
    horizon: u64,
    seed: u64,
) -> Result<RegretLedger> {
    let mut policy = build_policy(policy_spec, instance, horizon)?;
    let mut rng = EpisodeRng::seed_from_u64(seed);
    let mut ledger = RegretLedger::new();
    for t in 1..=horizon {
        let arm = policy.select(&mut rng);
        if arm >= instance.arm_count() {
            return Err(Error::Protocol(format!(
                "policy selected arm {arm} of {}",
                instance.arm_count()
            )));
        }
        let reward = instance.arm(arm).draw_reward(&mut rng);
        let observed_cost = instance.arm(arm).draw_cost(&mut rng);
        policy.update(arm, reward, observed_cost, &mut rng)?;
        ledger.update(
            instance,
            PullRecord {
                t,
                arm,
                reward,
                observed_cost,
            },
        )?;
    }
    Ok(ledger)
}

/// Cumulative regrets of one replication sampled at the checkpoint rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSeries {
    pub seed: u64,
    pub quality: Vec<f64>,
    pub cost: Vec<f64>,
    pub final_quality: f64,
    pub final_cost: f64,
    pub final_modified_quality: f64,
}

/// 100 log-spaced rounds plus the horizon, deduplicated and ascending.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut points = std::collections::BTreeSet::new();
    let log_max = (horizon as f64).log10();
    for i in 0..100 {
        let t = 10f64.powf(log_max * i as f64 / 99.0).round() as u64;
        points.insert(t.clamp(1, horizon));
    }
    points.insert(horizon);
    points.into_iter().collect()
}

fn sample_checkpoints(ledger: &RegretLedger, checkpoints: &[u64], seed: u64) -> ReplicationSeries {
    let mut quality = Vec::with_capacity(checkpoints.len());
    let mut cost = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    for (t, q, c) in ledger.cumulative_series() {
        while next < checkpoints.len() && checkpoints[next] == t {
            quality.push(q);
            cost.push(c);
            next += 1;
        }
    }
    debug_assert_eq!(next, checkpoints.len());
    ReplicationSeries {
        seed,
        quality,
        cost,
        final_quality: ledger.cum_quality(),
        final_cost: ledger.cum_cost(),
        final_modified_quality: ledger.cum_modified_quality(),
    }
}

#[cfg(feature = "parallel")]
fn map_replications<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_replications<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential twin of the replication map; the parallel path must
/// match it bit for bit.
fn map_replications_sequential<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n).map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExecMode {
    Auto,
    Sequential,
}

fn run_batch(
    instance: &Instance,
    policy_spec: &PolicySpec,
    horizon: u64,
    replications: u64,
    base_seed: u64,
    checkpoints: &[u64],
    mode: ExecMode,
) -> Result<Vec<ReplicationSeries>> {
    let run_one = |j: u64| -> Result<ReplicationSeries> {
        let seed = base_seed.wrapping_add(j);
        let ledger = run_episode(instance, policy_spec, horizon, seed).map_err(|e| {
            Error::Replication {
                replication: j,
                source: Box::new(e),
            }
        })?;
        Ok(sample_checkpoints(&ledger, checkpoints, seed))
    };
    match mode {
        ExecMode::Auto => map_replications(replications, run_one),
        ExecMode::Sequential => map_replications_sequential(replications, run_one),
    }
}

/// Seeded replications of one (instance, policy) pair, parallel when the
/// `parallel` feature is enabled.
pub fn run_policy_replications(
    instance: &Instance,
    policy_spec: &PolicySpec,
    horizon: u64,
    replications: u64,
    base_seed: u64,
    checkpoints: &[u64],
) -> Result<Vec<ReplicationSeries>> {
    run_batch(
        instance,
        policy_spec,
        horizon,
        replications,
        base_seed,
        checkpoints,
        ExecMode::Auto,
    )
}

/// Sequential twin of [`run_policy_replications`]; used by the determinism
/// tests and the benchmark suite.
pub fn run_policy_replications_sequential(
    instance: &Instance,
    policy_spec: &PolicySpec,
    horizon: u64,
    replications: u64,
    base_seed: u64,
    checkpoints: &[u64],
) -> Result<Vec<ReplicationSeries>> {
    run_batch(
        instance,
        policy_spec,
        horizon,
        replications,
        base_seed,
        checkpoints,
        ExecMode::Sequential,
    )
}

/// A swept instance parameter and its value at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub param: String,
    pub value: f64,
}

/// Aggregated regret statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointStat {
    pub t: u64,
    pub mean_quality: f64,
    pub std_quality: f64,
    pub mean_cost: f64,
    pub std_cost: f64,
}

/// Mean/standard-deviation summary of one (policy, grid point) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub policy: String,
    pub instance: String,
    pub grid: Option<GridPoint>,
    pub n: u64,
    pub stats: Vec<CheckpointStat>,
}

/// Aggregated output of a run or sweep, in deterministic row order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<PolicySummary>,
}

/// Population mean and standard deviation (n divisor, so a single
/// replication reports zero spread).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Reduce replication series into per-checkpoint statistics.
pub fn summarize(
    policy: &str,
    instance_label: &str,
    grid: Option<GridPoint>,
    checkpoints: &[u64],
    series: &[ReplicationSeries],
) -> PolicySummary {
    let stats = checkpoints
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let quality: Vec<f64> = series.iter().map(|s| s.quality[idx]).collect();
            let cost: Vec<f64> = series.iter().map(|s| s.cost[idx]).collect();
            let (mean_quality, std_quality) = mean_std(&quality);
            let (mean_cost, std_cost) = mean_std(&cost);
            CheckpointStat {
                t,
                mean_quality,
                std_quality,
                mean_cost,
                std_cost,
            }
        })
        .collect();
    PolicySummary {
        policy: policy.to_string(),
        instance: instance_label.to_string(),
        grid,
        n: series.len() as u64,
        stats,
    }
}

/// Everything a run produces: the summary plus trajectory rows when the
/// config asked for them.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub summary: Summary,
    pub trajectories: Vec<TrajectoryRow>,
}

fn effective_checkpoints(config: &ExperimentConfig) -> Vec<u64> {
    config
        .checkpoints
        .clone()
        .unwrap_or_else(|| default_checkpoints(config.horizon))
}

fn trajectory_rows(
    ledger: &RegretLedger,
    policy: &str,
    instance_label: &str,
    run_id: u64,
    keep: &[u64],
    granularity: RecordGranularity,
) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    let mut next = 0usize;
    for ((t, cum_q, cum_c), (record, instant)) in ledger
        .cumulative_series()
        .zip(ledger.records().iter().zip(ledger.instants()))
    {
        let wanted = match granularity {
            RecordGranularity::PerRound => true,
            RecordGranularity::Checkpoints => {
                let mut hit = false;
                while next < keep.len() && keep[next] == t {
                    hit = true;
                    next += 1;
                }
                hit
            }
        };
        if wanted {
            rows.push(TrajectoryRow {
                run_id,
                t,
                policy: policy.to_string(),
                instance: instance_label.to_string(),
                arm: record.arm,
                reward: record.reward,
                observed_cost: record.observed_cost,
                inst_quality_regret: instant.quality,
                inst_cost_regret: instant.cost,
                cum_quality_regret: cum_q,
                cum_cost_regret: cum_c,
            });
        }
    }
    rows
}

fn run_cell(
    config: &ExperimentConfig,
    instance: &Instance,
    policy_spec: &PolicySpec,
    grid: Option<GridPoint>,
    checkpoints: &[u64],
    output: &mut RunOutput,
) -> Result<()> {
    let series = run_policy_replications(
        instance,
        policy_spec,
        config.horizon,
        config.replications,
        config.base_seed,
        checkpoints,
    )?;
    output.summary.entries.push(summarize(
        policy_spec.id(),
        instance.label(),
        grid,
        checkpoints,
        &series,
    ));
    if config.output.trajectories.is_some() {
        // Trajectories are re-run sequentially per replication to keep row
        // order deterministic without buffering records inside the batch.
        for j in 0..config.replications {
            let seed = config.base_seed.wrapping_add(j);
            let ledger = run_episode(instance, policy_spec, config.horizon, seed)?;
            output.trajectories.extend(trajectory_rows(
                &ledger,
                policy_spec.id(),
                instance.label(),
                j,
                checkpoints,
                config.record,
            ));
        }
    }
    Ok(())
}

/// Run every policy in the config against its instance.
pub fn run_replications(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let instance = config.instance.build()?;
    let checkpoints = effective_checkpoints(config);
    let mut output = RunOutput::default();
    for policy_spec in &config.policies {
        run_cell(config, &instance, policy_spec, None, &checkpoints, &mut output)?;
    }
    Ok(output)
}

/// Run the config's sweep: every policy crossed with every grid value, grid
/// order preserved within each policy.
pub fn sweep(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let sweep_spec = config.sweep.as_ref().ok_or_else(|| {
        Error::InvalidConfiguration("sweep requested but config has no sweep section".into())
    })?;
    let checkpoints = effective_checkpoints(config);
    let mut output = RunOutput::default();
    for policy_spec in &config.policies {
        for &value in &sweep_spec.grid {
            let instance = config.instance.with_param(&sweep_spec.param, value)?.build()?;
            let grid = Some(GridPoint {
                param: sweep_spec.param.clone(),
                value,
            });
            run_cell(config, &instance, policy_spec, grid, &checkpoints, &mut output)?;
        }
    }
    Ok(output)
}
