//! Seeded Monte Carlo simulation of the token game under a strategy
//! profile. Each run draws from its own ChaCha stream keyed by
//! `(seed, run index)` and runs are aggregated chunk-by-chunk in index
//! order, so results are bit-identical whether runs execute sequentially
//! or on a rayon pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{build_tpm, node_outcome, outcome_report, stationary_distribution, ChainError};
use crate::game::StrategyPair;
use crate::net::{
    choice_distribution, fire, validate_net, ChoiceRule, NetDefinition, NetError, StateTag,
    Violation,
};
use crate::reachability::{build_reachability, ReachabilityError};

/// Runs are summarized in fixed-size blocks; block boundaries depend only
/// on run indices, which pins the floating-point reduction order.
const CHUNK_SIZE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub runs: u64,
    pub seed: u64,
    /// A run that has not reached an outcome after this many firings is
    /// counted as truncated.
    pub max_steps: u32,
    pub strategy: StrategyPair,
    /// Sample an exponential delay per firing from the transition rates
    /// and report the mean time to outcome. Off by default; it does not
    /// change outcome probabilities.
    pub event_clock: bool,
}

impl SimConfig {
    pub fn new(runs: u64, seed: u64, strategy: StrategyPair) -> Self {
        SimConfig {
            runs,
            seed,
            max_steps: 10_000,
            strategy,
            event_clock: false,
        }
    }
}

/// Aggregated simulation outcome. Outcome counts plus truncated runs sum
/// to the configured run count; frequencies are over completed runs only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub runs: u64,
    pub completed_runs: u64,
    pub truncated_runs: u64,
    pub no_attack_count: u64,
    pub attack_success_count: u64,
    pub attack_defended_count: u64,
    pub no_attack_frequency: f64,
    pub attack_success_frequency: f64,
    pub attack_defended_frequency: f64,
    /// Mean accumulated token reward per completed run, one entry per
    /// player.
    pub mean_rewards: Vec<f64>,
    pub mean_steps: f64,
    pub mean_time_to_outcome: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("net fails validation ({} violation(s)); first: {}", .0.len(), .0[0])]
    InvalidNet(Vec<Violation>),
    #[error("net has no outcome-tagged places, so runs cannot terminate")]
    NoOutcomeTags,
    #[error("simulation needs at least one run")]
    NoRuns,
    #[error("token game: {0}")]
    Net(#[from] NetError),
    #[error("analytic reference: {0}")]
    Chain(#[from] ChainError),
    #[error("analytic reference: {0}")]
    Reachability(#[from] ReachabilityError),
}

#[derive(Debug, Clone, Default)]
struct ChunkSummary {
    counts: [u64; 3], // no_attack, success, defended
    truncated: u64,
    reward_sums: Vec<f64>,
    step_sum: u64,
    time_sum: f64,
}

impl ChunkSummary {
    fn new(players: usize) -> Self {
        ChunkSummary {
            reward_sums: vec![0.0; players],
            ..Default::default()
        }
    }

    fn absorb(&mut self, other: &ChunkSummary) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.truncated += other.truncated;
        for (a, b) in self.reward_sums.iter_mut().zip(&other.reward_sums) {
            *a += b;
        }
        self.step_sum += other.step_sum;
        self.time_sum += other.time_sum;
    }
}

enum RunEnd {
    Outcome {
        tag: StateTag,
        steps: u32,
        rewards: Vec<f64>,
        time: f64,
    },
    Truncated,
}

fn run_once(net: &NetDefinition, cfg: &SimConfig, run_index: u64) -> Result<RunEnd, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run_index);

    let rule = ChoiceRule::Strategy(cfg.strategy);
    let mut marking = net.initial_marking().clone();
    let mut time = 0.0;
    for step in 0..=cfg.max_steps {
        if let Some(tag) = node_outcome(net, &marking) {
            return Ok(RunEnd::Outcome {
                tag,
                steps: step,
                rewards: marking.total_rewards(net.players().len()),
                time,
            });
        }
        if step == cfg.max_steps {
            break;
        }
        let choices = choice_distribution(net, &marking, &rule)?;
        if choices.is_empty() {
            // Dead marking without an outcome: the run cannot finish.
            return Ok(RunEnd::Truncated);
        }
        let draw: f64 = rng.random();
        let mut cumulative = 0.0;
        // Fallback for rounding at the top of the cumulative scale: the
        // last transition with positive probability.
        let mut chosen = *choices
            .iter()
            .rev()
            .find(|(_, &p)| p > 0.0)
            .map(|(t, _)| t)
            .expect("choice distributions carry positive weight");
        for (&t, &p) in &choices {
            cumulative += p;
            if p > 0.0 && draw < cumulative {
                chosen = t;
                break;
            }
        }
        if cfg.event_clock {
            let u: f64 = rng.random();
            time += -(1.0 - u).ln() / net.transition(chosen).rate;
        }
        marking = fire(net, &marking, chosen)?;
    }
    Ok(RunEnd::Truncated)
}

fn summarize_chunk(
    net: &NetDefinition,
    cfg: &SimConfig,
    chunk: u64,
) -> Result<ChunkSummary, SimError> {
    let players = net.players().len();
    let mut summary = ChunkSummary::new(players);
    let lo = chunk * CHUNK_SIZE;
    let hi = (lo + CHUNK_SIZE).min(cfg.runs);
    for run_index in lo..hi {
        match run_once(net, cfg, run_index)? {
            RunEnd::Outcome {
                tag,
                steps,
                rewards,
                time,
            } => {
                let slot = match tag {
                    StateTag::NoAttack => 0,
                    StateTag::AttackSuccess => 1,
                    StateTag::AttackDefended => 2,
                    _ => unreachable!("node_outcome only yields outcome tags"),
                };
                summary.counts[slot] += 1;
                for (a, b) in summary.reward_sums.iter_mut().zip(&rewards) {
                    *a += b;
                }
                summary.step_sum += u64::from(steps);
                summary.time_sum += time;
            }
            RunEnd::Truncated => summary.truncated += 1,
        }
    }
    Ok(summary)
}

fn check_preconditions(net: &NetDefinition, cfg: &SimConfig) -> Result<(), SimError> {
    if cfg.runs == 0 {
        return Err(SimError::NoRuns);
    }
    let violations = validate_net(net);
    if !violations.is_empty() {
        return Err(SimError::InvalidNet(violations));
    }
    let has_outcome = net.places().iter().any(|p| p.tag.is_outcome());
    if !has_outcome {
        return Err(SimError::NoOutcomeTags);
    }
    Ok(())
}

fn assemble(cfg: &SimConfig, total: ChunkSummary) -> SimResult {
    let completed: u64 = total.counts.iter().sum();
    let frequency = |count: u64| {
        if completed == 0 {
            0.0
        } else {
            count as f64 / completed as f64
        }
    };
    let mean_rewards = total
        .reward_sums
        .iter()
        .map(|&s| {
            if completed == 0 {
                0.0
            } else {
                s / completed as f64
            }
        })
        .collect();
    SimResult {
        runs: cfg.runs,
        completed_runs: completed,
        truncated_runs: total.truncated,
        no_attack_count: total.counts[0],
        attack_success_count: total.counts[1],
        attack_defended_count: total.counts[2],
        no_attack_frequency: frequency(total.counts[0]),
        attack_success_frequency: frequency(total.counts[1]),
        attack_defended_frequency: frequency(total.counts[2]),
        mean_rewards,
        mean_steps: if completed == 0 {
            0.0
        } else {
            total.step_sum as f64 / completed as f64
        },
        mean_time_to_outcome: if cfg.event_clock && completed > 0 {
            Some(total.time_sum / completed as f64)
        } else {
            None
        },
    }
}

fn chunk_count(runs: u64) -> u64 {
    runs.div_ceil(CHUNK_SIZE)
}

/// Runs the simulation on the current rayon pool when the `parallel`
/// feature is enabled, sequentially otherwise. Either way the result is
/// bit-identical to [`simulate_sequential`].
pub fn simulate(net: &NetDefinition, cfg: &SimConfig) -> Result<SimResult, SimError> {
    check_preconditions(net, cfg)?;
    #[cfg(feature = "parallel")]
    let summaries: Result<Vec<ChunkSummary>, SimError> = (0..chunk_count(cfg.runs))
        .into_par_iter()
        .map(|chunk| summarize_chunk(net, cfg, chunk))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let summaries: Result<Vec<ChunkSummary>, SimError> = (0..chunk_count(cfg.runs))
        .map(|chunk| summarize_chunk(net, cfg, chunk))
        .collect();

    let mut total = ChunkSummary::new(net.players().len());
    for summary in &summaries? {
        total.absorb(summary);
    }
    Ok(assemble(cfg, total))
}

/// Single-threaded reference path; exists so the two execution modes can
/// be compared directly.
pub fn simulate_sequential(net: &NetDefinition, cfg: &SimConfig) -> Result<SimResult, SimError> {
    check_preconditions(net, cfg)?;
    let mut total = ChunkSummary::new(net.players().len());
    for chunk in 0..chunk_count(cfg.runs) {
        total.absorb(&summarize_chunk(net, cfg, chunk)?);
    }
    Ok(assemble(cfg, total))
}

/// One checkpoint of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub runs: u64,
    pub empirical_success: f64,
    pub analytic_success: f64,
    pub abs_error: f64,
}

/// Empirical success frequency at growing run counts against the analytic
/// steady-state value. Checkpoints share the per-run streams, so a larger
/// checkpoint extends a smaller one instead of resampling it.
pub fn convergence_report(
    net: &NetDefinition,
    strategy: &StrategyPair,
    checkpoints: &[u64],
    seed: u64,
) -> Result<Vec<ConvergenceRow>, SimError> {
    let graph = build_reachability(net, strategy, 4096)?;
    let tpm = build_tpm(&graph);
    let stationary = stationary_distribution(&tpm)?;
    let analytic = outcome_report(net, &graph, &stationary)?.attack_success;

    let mut rows = Vec::with_capacity(checkpoints.len());
    for &runs in checkpoints {
        let cfg = SimConfig::new(runs, seed, *strategy);
        let result = simulate(net, &cfg)?;
        rows.push(ConvergenceRow {
            runs,
            empirical_success: result.attack_success_frequency,
            analytic_success: analytic,
            abs_error: (result.attack_success_frequency - analytic).abs(),
        });
    }
    Ok(rows)
}
