use std::path::Path;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PolicyParams;
use crate::error::Result;

/// On-disk policy snapshot: weights, version, and the sampler RNG state.
/// JSON with shortest-roundtrip float formatting, so `load(save(p))`
/// reproduces the parameters bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyCheckpoint {
    pub weights: Vec<f64>,
    pub num_features: usize,
    pub vocab_size: usize,
    pub version: u64,
    pub rng: ChaCha8Rng,
}

impl PolicyCheckpoint {
    pub fn new(params: &PolicyParams, rng: &ChaCha8Rng) -> Self {
        PolicyCheckpoint {
            weights: params.weights().to_vec(),
            num_features: params.num_features(),
            vocab_size: params.vocab_size(),
            version: params.version(),
            rng: rng.clone(),
        }
    }

    pub fn params(&self) -> Result<PolicyParams> {
        PolicyParams::from_parts(
            self.weights.clone(),
            self.num_features,
            self.vocab_size,
            self.version,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let ckpt: PolicyCheckpoint = serde_json::from_reader(std::io::BufReader::new(file))?;
        ckpt.params()?; // validate dimensions and finiteness up front
        Ok(ckpt)
    }
}
