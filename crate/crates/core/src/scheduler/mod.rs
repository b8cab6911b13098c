//! Dynamic sampling with recent-sample recovery.
//!
//! Each training step over-samples rollout groups, filters out degenerate
//! ones (all correct or all wrong), and cuts a fixed-size effective batch
//! from the admitted candidates. Legitimate overflow groups are not
//! discarded: they move to a recovery buffer and lead the next step's
//! candidate list, sampling-time log-probabilities intact.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::GroupStats;
use crate::policy::Rollout;
use crate::vocab::Token;

/// One prompt with its scored rollout group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub prompt_id: String,
    pub prompt_tokens: Vec<Token>,
    pub rollouts: Vec<Rollout>,
    pub rewards: Vec<f64>,
    /// Step at which the group was generated; recovered groups keep it.
    pub origin_step: u64,
}

impl RolloutGroup {
    pub fn g(&self) -> usize {
        self.rollouts.len()
    }

    pub fn num_correct(&self) -> usize {
        self.rewards.iter().filter(|&&r| r > 0.0).count()
    }

    pub fn stats(&self) -> Result<GroupStats> {
        GroupStats::from_rewards(&self.rewards)
    }
}

/// Keep iff the group is non-degenerate: 0 < num_correct < G.
pub fn admit_group(group: &RolloutGroup, g: usize) -> bool {
    debug_assert_eq!(group.g(), g, "group must carry exactly G scored outputs");
    debug_assert_eq!(group.rewards.len(), group.rollouts.len());
    let c = group.num_correct();
    c > 0 && c < g
}

/// Ordered store of admitted overflow groups carried across steps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RecoveryBuffer {
    groups: VecDeque<RolloutGroup>,
}

impl RecoveryBuffer {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    fn push(&mut self, group: RolloutGroup) {
        debug_assert!(
            group.num_correct() > 0 && group.num_correct() < group.g(),
            "only admitted groups may enter the recovery buffer"
        );
        self.groups.push_back(group);
    }

    fn drain_all(&mut self) -> Vec<RolloutGroup> {
        self.groups.drain(..).collect()
    }

    /// Drop the oldest entries down to `cap`.
    fn enforce_cap(&mut self, cap: usize) -> usize {
        let mut dropped = 0;
        while self.groups.len() > cap {
            self.groups.pop_front();
            dropped += 1;
        }
        dropped
    }
}

/// Scheduler tunables, surfaced as `scheduler.*` run-config keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Prompts sampled per generation round.
    pub round_size: usize,
    /// Run the sampling loop even when the buffer alone can fill the
    /// batch. Off by default: a full buffer emits a batch with zero new
    /// generation.
    pub always_generate: bool,
    /// Optional buffer capacity (drop-oldest). Unbounded by default.
    pub max_buffer: Option<usize>,
    /// Optional staleness bound: recovered groups older than this many
    /// steps are dropped. Off by default.
    pub max_staleness: Option<u64>,
    /// Recovery on/off. Off reproduces plain dynamic sampling, which
    /// discards legitimate overflow.
    pub rsr: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            round_size: 8,
            always_generate: false,
            max_buffer: None,
            max_staleness: None,
            rsr: true,
        }
    }
}

/// Per-step flow accounting. Groups are conserved: everything generated
/// or recovered is filtered, consumed, buffered, or (only under the
/// optional guards / with recovery off) dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounters {
    pub step: u64,
    pub raw_generated: usize,
    pub filtered_out: usize,
    pub consumed: usize,
    pub buffered: usize,
    pub buffer_in: usize,
    pub dropped: usize,
}

impl StepCounters {
    pub fn oversample_ratio(&self) -> f64 {
        if self.consumed == 0 {
            0.0
        } else {
            self.raw_generated as f64 / self.consumed as f64
        }
    }

    /// The exact conservation identity at a step boundary.
    pub fn check_conservation(&self) -> Result<()> {
        let inflow = self.raw_generated + self.buffer_in;
        let outflow = self.filtered_out + self.consumed + self.buffered + self.dropped;
        if inflow != outflow {
            return Err(Error::invariant(format!(
                "group conservation violated at step {}: in {} != out {}",
                self.step, inflow, outflow
            )));
        }
        Ok(())
    }
}

/// A filled effective batch of exactly N admitted groups.
#[derive(Debug, Clone)]
pub struct BatchAssembly {
    pub effective: Vec<RolloutGroup>,
    pub counters: StepCounters,
}

/// Step outcome: a full batch, or a terminal signal when the prompt
/// stream ran out before N admitted groups existed. Partial candidates
/// are returned rather than trained on.
#[derive(Debug)]
pub enum AssembleOutcome {
    Batch(BatchAssembly),
    Exhausted { partial: Vec<RolloutGroup> },
}

/// Cross-step totals for the run-level conservation check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounters {
    pub raw_generated: u64,
    pub filtered_out: u64,
    pub consumed: u64,
    pub dropped: u64,
}

/// The dynamic-sampling scheduler with its recovery buffer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RsrScheduler {
    cfg: SchedulerConfig,
    buffer: RecoveryBuffer,
    totals: RunCounters,
}

impl RsrScheduler {
    pub fn new(cfg: SchedulerConfig) -> Self {
        RsrScheduler {
            cfg,
            buffer: RecoveryBuffer::default(),
            totals: RunCounters::default(),
        }
    }

    pub fn config(&self) -> &SchedulerConfig {
        &self.cfg
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    pub fn totals(&self) -> RunCounters {
        self.totals
    }

    /// Stage boundaries without recovery semantics start from an empty
    /// buffer.
    pub fn clear_buffer(&mut self) {
        self.buffer = RecoveryBuffer::default();
    }

    /// Assemble one effective batch of `n` groups. `generate_round` is
    /// called with the round's prompt count and returns the scored groups
    /// for that round, or `None` when the prompt stream is exhausted.
    pub fn step<F>(&mut self, step: u64, n: usize, g: usize, mut generate_round: F) -> Result<AssembleOutcome>
    where
        F: FnMut(usize) -> Result<Option<Vec<RolloutGroup>>>,
    {
        if n == 0 {
            return Err(Error::config("batch size must be >= 1"));
        }
        let mut counters = StepCounters {
            step,
            raw_generated: 0,
            filtered_out: 0,
            consumed: 0,
            buffered: 0,
            buffer_in: 0,
            dropped: 0,
        };

        // Recovered groups lead the candidate list; the buffer empties.
        let mut candidates: Vec<RolloutGroup> = Vec::new();
        for group in self.buffer.drain_all() {
            counters.buffer_in += 1;
            let stale = self
                .cfg
                .max_staleness
                .map(|k| step.saturating_sub(group.origin_step) > k)
                .unwrap_or(false);
            if stale {
                counters.dropped += 1;
            } else {
                candidates.push(group);
            }
        }

        let mut rounds = 0;
        loop {
            let filled = candidates.len() >= n;
            // With always_generate, one round runs unconditionally per
            // step (the literal sample-then-check loop); otherwise rounds
            // run only while the batch is short.
            if filled && !(self.cfg.always_generate && rounds == 0) {
                break;
            }
            match generate_round(self.cfg.round_size)? {
                None => {
                    if filled {
                        break; // exhausted, but the batch is already covered
                    }
                    self.totals.raw_generated += counters.raw_generated as u64;
                    self.totals.filtered_out += counters.filtered_out as u64;
                    self.totals.dropped += counters.dropped as u64;
                    // Hand the partial candidates back so nothing is lost.
                    let partial = std::mem::take(&mut candidates);
                    return Ok(AssembleOutcome::Exhausted { partial });
                }
                Some(groups) => {
                    rounds += 1;
                    for group in groups {
                        counters.raw_generated += 1;
                        if admit_group(&group, g) {
                            candidates.push(group);
                        } else {
                            counters.filtered_out += 1;
                        }
                    }
                }
            }
        }

        let overflow: Vec<RolloutGroup> = candidates.split_off(n);
        let effective = candidates;
        counters.consumed = effective.len();
        debug_assert_eq!(counters.consumed, n);

        if self.cfg.rsr {
            for group in overflow {
                self.buffer.push(group);
            }
            if let Some(cap) = self.cfg.max_buffer {
                counters.dropped += self.buffer.enforce_cap(cap);
            }
        } else {
            // Plain dynamic sampling discards legitimate overflow.
            counters.dropped += overflow.len();
        }
        counters.buffered = self.buffer.len();

        counters.check_conservation()?;
        self.totals.raw_generated += counters.raw_generated as u64;
        self.totals.filtered_out += counters.filtered_out as u64;
        self.totals.consumed += counters.consumed as u64;
        self.totals.dropped += counters.dropped as u64;
        self.check_run_conservation()?;

        Ok(AssembleOutcome::Batch(BatchAssembly { effective, counters }))
    }

    /// Run-level conservation: every generated group is accounted for.
    pub fn check_run_conservation(&self) -> Result<()> {
        let lhs = self.totals.raw_generated;
        let rhs = self.totals.filtered_out
            + self.totals.consumed
            + self.totals.dropped
            + self.buffer.len() as u64;
        if lhs != rhs {
            return Err(Error::invariant(format!(
                "run conservation violated: raw {lhs} != filtered + consumed + dropped + buffer {rhs}"
            )));
        }
        Ok(())
    }
}
