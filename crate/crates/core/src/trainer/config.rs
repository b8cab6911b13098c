use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::optim::ClipConfig;
use crate::policy::PolicyInit;
use crate::reward::RewardConfig;
use crate::scheduler::SchedulerConfig;
use crate::tasks::{TagStyle, TaskTemplate};

/// Core algorithm of a training stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageAlgorithm {
    /// Normalized group-relative advantages with targeted entropy
    /// regularization; plain per-batch sampling, degenerate groups carry
    /// no learning signal.
    GrpoTer,
    /// Decoupled-clip token-level objective with hardness-weighted
    /// advantages, dynamic sampling, and the recovery buffer.
    DapoRsrPshw,
}

impl StageAlgorithm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "grpo_ter" => Ok(StageAlgorithm::GrpoTer),
            "dapo_rsr_pshw" => Ok(StageAlgorithm::DapoRsrPshw),
            other => Err(Error::config(format!("unknown stage algorithm {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StageAlgorithm::GrpoTer => "grpo_ter",
            StageAlgorithm::DapoRsrPshw => "dapo_rsr_pshw",
        }
    }
}

/// Resolved configuration of one training stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageConfig {
    pub algorithm: StageAlgorithm,
    pub max_response_len: usize,
    pub steps: u64,
    pub group_size: usize,
    pub batch_size: usize,
    pub inner_updates: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub clip: ClipConfig,
}

impl StageConfig {
    pub fn validate(&self, stage_index: usize) -> Result<()> {
        if self.group_size < 2 {
            return Err(Error::config("stage group_size must be >= 2"));
        }
        if self.batch_size == 0 || self.inner_updates == 0 {
            return Err(Error::config("stage batch_size and inner_updates must be >= 1"));
        }
        if self.max_response_len == 0 {
            return Err(Error::config("stage max_response_len must be >= 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("stage learning_rate must be > 0"));
        }
        self.clip.validate()?;
        match self.algorithm {
            StageAlgorithm::GrpoTer => {
                if self.clip.advantage != "grpo" {
                    return Err(Error::config(format!(
                        "stage {stage_index}: grpo_ter runs normalized advantages, not {:?}",
                        self.clip.advantage
                    )));
                }
            }
            StageAlgorithm::DapoRsrPshw => {
                if self.clip.length_normalize {
                    return Err(Error::config(format!(
                        "stage {stage_index}: length normalization must stay off for dapo_rsr_pshw"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Where the training corpus comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Generate tasks in-process.
    Generate {
        templates: Vec<TaskTemplate>,
        count: usize,
        seed: u64,
    },
    /// Load a curated JSON Lines corpus.
    File(std::path::PathBuf),
}

/// Held-out benchmark definition, generated from its own seed range.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalData {
    pub templates: Vec<TaskTemplate>,
    pub count: usize,
    pub seed: u64,
}

/// The full run configuration, parsed from a flat key-value text file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub policy_init: PolicyInit,
    pub reward: RewardConfig,
    pub scheduler: SchedulerConfig,
    pub data: DataSource,
    pub eval: EvalData,
    pub stages: Vec<StageConfig>,
    pub ckpt_every: u64,
    /// The raw resolved key-value view, echoed to run.json.
    resolved: BTreeMap<String, String>,
}

fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::config(format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

struct KeyReader {
    map: BTreeMap<String, String>,
    used: std::collections::HashSet<String>,
}

impl KeyReader {
    fn get(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn parse_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::config(format!("bad value for {key}: {v:?}"))),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "1" | "on" => Ok(true),
                "false" | "0" | "off" => Ok(false),
                other => Err(Error::config(format!("bad boolean for {key}: {other:?}"))),
            },
        }
    }

    fn check_exhausted(&self) -> Result<()> {
        let unknown: Vec<&String> = self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "unknown config keys: {}",
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}

/// Built-in stage schedule: response caps grow 64 -> 128 -> 256 and the
/// algorithms follow the stage table.
fn default_stage(index: usize, seed: u64, base_clip: &ClipConfig) -> StageConfig {
    let (algorithm, cap) = match index {
        1 => (StageAlgorithm::GrpoTer, 64),
        2 => (StageAlgorithm::DapoRsrPshw, 128),
        _ => (StageAlgorithm::DapoRsrPshw, 256),
    };
    let clip = match algorithm {
        StageAlgorithm::GrpoTer => ClipConfig {
            advantage: "grpo".into(),
            length_normalize: true,
            ..base_clip.clone()
        },
        StageAlgorithm::DapoRsrPshw => ClipConfig {
            // The entropy penalty belongs to stage 1; later stages keep it
            // available but default off.
            entropy_coeff: 0.0,
            length_normalize: false,
            ..base_clip.clone()
        },
    };
    StageConfig {
        algorithm,
        max_response_len: cap,
        steps: 120,
        group_size: 8,
        batch_size: 8,
        inner_updates: 1,
        learning_rate: 0.6,
        seed: seed.wrapping_add(index as u64),
        clip,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse the flat key-value format. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_flat(text)?;
        let mut r = KeyReader {
            map,
            used: Default::default(),
        };

        let seed: u64 = r.parse_or("seed", 42)?;
        let policy_init = PolicyInit::parse(&r.get("policy.init").unwrap_or_else(|| "templated".into()))?;

        let reward = RewardConfig {
            ngram_n: r.parse_or("reward.ngram_n", 3)?,
            max_repeats: r.parse_or("reward.max_repeats", 4)?,
            verifier: r.get("reward.verifier").unwrap_or_else(|| "rule".into()),
        };
        reward.validate()?;

        let max_buffer: usize = r.parse_or("scheduler.max_buffer", 0)?;
        let max_staleness: u64 = r.parse_or("scheduler.max_staleness", 0)?;
        let scheduler = SchedulerConfig {
            round_size: r.parse_or("scheduler.round_size", 8)?,
            always_generate: r.bool_or("scheduler.always_generate", false)?,
            max_buffer: (max_buffer > 0).then_some(max_buffer),
            max_staleness: (max_staleness > 0).then_some(max_staleness),
            rsr: r.bool_or("scheduler.rsr", true)?,
        };
        if scheduler.round_size == 0 {
            return Err(Error::config("scheduler.round_size must be >= 1"));
        }

        let data = match r.get("data.file") {
            Some(path) => DataSource::File(path.into()),
            None => DataSource::Generate {
                templates: TaskTemplate::parse_list(
                    &r.get("data.templates").unwrap_or_else(|| "add,sub,mul,chain".into()),
                )?,
                count: r.parse_or("data.count", 4000)?,
                seed: r.parse_or("data.seed", 7)?,
            },
        };
        let eval = EvalData {
            templates: TaskTemplate::parse_list(
                &r.get("eval.templates").unwrap_or_else(|| "add,sub,mul".into()),
            )?,
            count: r.parse_or("eval.count", 200)?,
            seed: r.parse_or("eval.seed", 1007)?,
        };

        let base_clip = ClipConfig {
            eps_low: r.parse_or("opt.eps_low", 0.2)?,
            eps_high: r.parse_or("opt.eps_high", 0.28)?,
            entropy_target: r.parse_or("opt.entropy_target", 0.55)?,
            entropy_coeff: r.parse_or("opt.entropy_coeff", 0.001)?,
            alpha: r.parse_or("opt.alpha", -0.256)?,
            advantage: r.get("opt.advantage").unwrap_or_else(|| "pshw".into()),
            length_normalize: r.bool_or("opt.length_normalize", false)?,
            kl_coeff: r.parse_or("opt.kl_coeff", 0.0)?,
        };
        base_clip.validate()?;

        let num_stages: usize = r.parse_or("stages", 3)?;
        if num_stages == 0 || num_stages > 8 {
            return Err(Error::config("stages must be in 1..=8"));
        }
        let mut stages = Vec::with_capacity(num_stages);
        for index in 1..=num_stages {
            let mut stage = default_stage(index, seed, &base_clip);
            let pre = format!("stage{index}.");
            if let Some(a) = r.get(&format!("{pre}algorithm")) {
                stage.algorithm = StageAlgorithm::parse(&a)?;
                // Re-derive algorithm-dependent defaults.
                stage.clip = match stage.algorithm {
                    StageAlgorithm::GrpoTer => ClipConfig {
                        advantage: "grpo".into(),
                        length_normalize: true,
                        ..base_clip.clone()
                    },
                    StageAlgorithm::DapoRsrPshw => ClipConfig {
                        entropy_coeff: 0.0,
                        length_normalize: false,
                        ..base_clip.clone()
                    },
                };
            }
            stage.max_response_len = r.parse_or(&format!("{pre}max_response_len"), stage.max_response_len)?;
            stage.steps = r.parse_or(&format!("{pre}steps"), stage.steps)?;
            stage.group_size = r.parse_or(&format!("{pre}group_size"), stage.group_size)?;
            stage.batch_size = r.parse_or(&format!("{pre}batch_size"), stage.batch_size)?;
            stage.inner_updates = r.parse_or(&format!("{pre}inner_updates"), stage.inner_updates)?;
            stage.learning_rate = r.parse_or(&format!("{pre}learning_rate"), stage.learning_rate)?;
            stage.seed = r.parse_or(&format!("{pre}seed"), stage.seed)?;
            stage.clip.entropy_coeff = r.parse_or(&format!("{pre}entropy_coeff"), stage.clip.entropy_coeff)?;
            stage.clip.entropy_target = r.parse_or(&format!("{pre}entropy_target"), stage.clip.entropy_target)?;
            stage.clip.length_normalize =
                r.bool_or(&format!("{pre}length_normalize"), stage.clip.length_normalize)?;
            stage.clip.eps_low = r.parse_or(&format!("{pre}eps_low"), stage.clip.eps_low)?;
            stage.clip.eps_high = r.parse_or(&format!("{pre}eps_high"), stage.clip.eps_high)?;
            stage.clip.alpha = r.parse_or(&format!("{pre}alpha"), stage.clip.alpha)?;
            stage.clip.kl_coeff = r.parse_or(&format!("{pre}kl_coeff"), stage.clip.kl_coeff)?;
            if let Some(adv) = r.get(&format!("{pre}advantage")) {
                stage.clip.advantage = adv;
            } else if stage.algorithm == StageAlgorithm::DapoRsrPshw {
                stage.clip.advantage = base_clip.advantage.clone();
            }
            stage.validate(index)?;
            stages.push(stage);
        }

        let ckpt_every: u64 = r.parse_or("trainer.ckpt_every", 0)?;
        r.check_exhausted()?;

        let mut cfg = RunConfig {
            seed,
            policy_init,
            reward,
            scheduler,
            data,
            eval,
            stages,
            ckpt_every,
            resolved: BTreeMap::new(),
        };
        cfg.resolved = cfg.to_flat_map();
        Ok(cfg)
    }

    /// The pipeline contract: exactly three stages following the stage
    /// table, with a non-decreasing response-length schedule.
    pub fn validate_pipeline(&self) -> Result<()> {
        if self.stages.len() != 3 {
            return Err(Error::config(format!(
                "the training pipeline takes exactly 3 stages, got {}",
                self.stages.len()
            )));
        }
        if self.stages[0].algorithm != StageAlgorithm::GrpoTer {
            return Err(Error::config("stage 1 must run grpo_ter"));
        }
        for (i, stage) in self.stages.iter().enumerate().skip(1) {
            if stage.algorithm != StageAlgorithm::DapoRsrPshw {
                return Err(Error::config(format!("stage {} must run dapo_rsr_pshw", i + 1)));
            }
        }
        let caps: Vec<usize> = self.stages.iter().map(|s| s.max_response_len).collect();
        if caps.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config(format!(
                "response-length schedule must be non-decreasing, got {caps:?}"
            )));
        }
        Ok(())
    }

    /// Resolved flat view of every setting, written to run.json.
    pub fn to_flat_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("seed", self.seed.to_string());
        put(
            "policy.init",
            match self.policy_init {
                PolicyInit::Zeros => "zeros".into(),
                PolicyInit::Templated => "templated".into(),
            },
        );
        put("reward.ngram_n", self.reward.ngram_n.to_string());
        put("reward.max_repeats", self.reward.max_repeats.to_string());
        put("reward.verifier", self.reward.verifier.clone());
        put("scheduler.round_size", self.scheduler.round_size.to_string());
        put("scheduler.always_generate", self.scheduler.always_generate.to_string());
        put("scheduler.max_buffer", self.scheduler.max_buffer.unwrap_or(0).to_string());
        put("scheduler.max_staleness", self.scheduler.max_staleness.unwrap_or(0).to_string());
        put("scheduler.rsr", self.scheduler.rsr.to_string());
        match &self.data {
            DataSource::File(path) => put("data.file", path.display().to_string()),
            DataSource::Generate {
                templates,
                count,
                seed,
            } => {
                put("data.templates", render_templates(templates));
                put("data.count", count.to_string());
                put("data.seed", seed.to_string());
            }
        }
        put("eval.templates", render_templates(&self.eval.templates));
        put("eval.count", self.eval.count.to_string());
        put("eval.seed", self.eval.seed.to_string());
        put("trainer.ckpt_every", self.ckpt_every.to_string());
        put("stages", self.stages.len().to_string());
        for (i, s) in self.stages.iter().enumerate() {
            let pre = format!("stage{}.", i + 1);
            let mut put = |k: &str, v: String| {
                m.insert(format!("{pre}{k}"), v);
            };
            put("algorithm", s.algorithm.name().to_string());
            put("max_response_len", s.max_response_len.to_string());
            put("steps", s.steps.to_string());
            put("group_size", s.group_size.to_string());
            put("batch_size", s.batch_size.to_string());
            put("inner_updates", s.inner_updates.to_string());
            put("learning_rate", s.learning_rate.to_string());
            put("seed", s.seed.to_string());
            put("advantage", s.clip.advantage.clone());
            put("eps_low", s.clip.eps_low.to_string());
            put("eps_high", s.clip.eps_high.to_string());
            put("entropy_target", s.clip.entropy_target.to_string());
            put("entropy_coeff", s.clip.entropy_coeff.to_string());
            put("alpha", s.clip.alpha.to_string());
            put("length_normalize", s.clip.length_normalize.to_string());
            put("kl_coeff", s.clip.kl_coeff.to_string());
        }
        m
    }

    /// Render the resolved config back as flat key-value text.
    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_flat_map() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    pub fn tag_style(&self) -> TagStyle {
        TagStyle::SeedIndexed
    }
}

fn render_templates(templates: &[TaskTemplate]) -> String {
    templates
        .iter()
        .map(|t| {
            let name = match t.id {
                crate::tasks::TemplateId::Add => "add",
                crate::tasks::TemplateId::Sub => "sub",
                crate::tasks::TemplateId::Mul => "mul",
                crate::tasks::TemplateId::Chain => "chain",
            };
            if (t.lo, t.hi) == (0, 9) {
                name.to_string()
            } else {
                format!("{name}:{}-{}", t.lo, t.hi)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_form_a_valid_pipeline() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.stages.len(), 3);
        cfg.validate_pipeline().unwrap();
        assert_eq!(cfg.stages[0].algorithm, StageAlgorithm::GrpoTer);
        assert_eq!(cfg.stages[0].clip.advantage, "grpo");
        assert!(cfg.stages[0].clip.length_normalize);
        assert!((cfg.stages[0].clip.entropy_coeff - 0.001).abs() < 1e-12);
        assert_eq!(cfg.stages[1].clip.advantage, "pshw");
        assert_eq!(cfg.stages[1].clip.entropy_coeff, 0.0);
        assert_eq!(
            cfg.stages.iter().map(|s| s.max_response_len).collect::<Vec<_>>(),
            [64, 128, 256]
        );
    }

    #[test]
    fn flat_overrides_apply() {
        let cfg = RunConfig::parse(
            "seed = 9\nstage1.steps = 5 # short run\nopt.eps_high = 0.3\nscheduler.rsr = false\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.stages[0].steps, 5);
        assert!((cfg.stages[2].clip.eps_high - 0.3).abs() < 1e-12);
        assert!(!cfg.scheduler.rsr);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("opt.epsilon = 0.2\n").is_err());
        assert!(RunConfig::parse("stage1.step = 5\n").is_err());
    }

    #[test]
    fn pipeline_contract_enforced() {
        let cfg = RunConfig::parse("stages = 2\n").unwrap();
        assert!(cfg.validate_pipeline().is_err());

        assert!(RunConfig::parse("stage2.algorithm = grpo_ter\n")
            .unwrap()
            .validate_pipeline()
            .is_err());

        // Decreasing caps are rejected.
        let cfg = RunConfig::parse("stage3.max_response_len = 32\n").unwrap();
        assert!(cfg.validate_pipeline().is_err());
    }

    #[test]
    fn dapo_stage_rejects_length_normalization() {
        assert!(RunConfig::parse("stage2.length_normalize = true\n").is_err());
    }

    #[test]
    fn roundtrip_through_flat_text() {
        let cfg = RunConfig::parse("seed = 5\nstage1.learning_rate = 0.25\n").unwrap();
        let text = cfg.to_flat_text();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, again);
    }
}
