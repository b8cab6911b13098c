//! The staged training loop.
//!
//! Stage 1 runs normalized group-relative updates with targeted entropy
//! regularization over plain prompt batches; stages 2 and 3 run the
//! decoupled-clip token-level objective with hardness-weighted advantages
//! on top of the dynamic-sampling scheduler and its recovery buffer. The
//! response-length cap grows across stages. Runs are deterministic in
//! (config, seed) down to the metrics bytes, and checkpoints capture the
//! complete state so a resumed run reproduces an uninterrupted one.

mod config;
mod engine;
mod metrics;
mod scoring;

pub use config::{DataSource, EvalData, RunConfig, StageAlgorithm, StageConfig};
pub use engine::{
    load_corpus, run_pipeline, run_stages, Engine, PipelineArtifacts, RunResult, TrainerCheckpoint,
};
pub use metrics::{check_rows, metrics_csv, MetricsRow, METRICS_HEADER};
pub use scoring::score_rollout;
