//! Group-relative reinforcement learning for sequence policies, at desk scale.
//!
//! The crate implements the full loop needed to study group-relative policy
//! optimization on synthetic token-generation tasks:
//!
//! - **Corpus curation** (`corpus`): exact, fuzzy (Jaccard), and semantic
//!   (k-means over hashed embeddings) deduplication plus question-type
//!   filtering over JSON Lines corpora.
//! - **Policy** (`policy`): an analytic linear-softmax policy over hashed
//!   context features with exact log-probabilities, entropy, and closed-form
//!   gradients, behind a small sampling API.
//! - **Reward** (`reward`): two-stage scoring — format/repetition filters
//!   first, then a pluggable correctness verifier (rule-based or judge).
//! - **Optimizer** (`optim`): the clipped token-level surrogate objective
//!   without length normalization, group statistics, interchangeable
//!   advantage estimators (hardness-weighted and normalized group-relative),
//!   and the targeted entropy penalty.
//! - **Scheduler** (`scheduler`): dynamic sampling with a recovery buffer
//!   that carries legitimate overflow groups into the next step.
//! - **Trainer** (`trainer`): the three-stage pipeline with a growing
//!   response-length schedule, checkpointing, and CSV metrics.
//! - **Evaluation** (`eval`): pass@1 by sampling with temperature/top-p,
//!   plus an A/B driver for the recovery-buffer and entropy-regulation
//!   comparisons.
//! - **Tasks** (`tasks`): a deterministic generator of verifiable arithmetic
//!   problems with a controllable difficulty spectrum.
//!
//! Algorithm variants (advantage estimators, verifiers, embedders) live
//! behind traits and are selected by name from the run config, so new
//! strategies can be registered without touching the training loop.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod optim;
pub mod policy;
pub mod reward;
pub mod scheduler;
pub mod tasks;
pub mod trainer;
pub mod vocab;

pub use error::{Error, Result};
