//! Checkpoint directory: `model.bin` (versioned little-endian parameters),
//! `config.json`, `vocab.bpe` and `history.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{ModelConfig, Transformer};
use super::tensor::Float;
use super::train::History;
use crate::error::{Error, Result};
use crate::script::Script;
use crate::subword::SubwordModel;

pub const MAGIC: &[u8; 8] = b"DRVNMT01";
pub const FORMAT_VERSION: u32 = 1;

pub fn params_to_bytes<T: Float>(params: &[T]) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + params.len() * T::BYTES);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(T::TAG);
    out.extend_from_slice(&[0u8; 3]);
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for &p in params {
        p.write_le(&mut out);
    }
    out
}

pub fn params_from_bytes<T: Float>(bytes: &[u8]) -> Result<Vec<T>> {
    let bad = |m: &str| Error::ModelFormat(m.to_string());
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(bad("not a model parameter file"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported format version {version}")));
    }
    if bytes[12] != T::TAG {
        return Err(bad(&format!("stored {}-byte floats, expected {}", bytes[12], T::TAG)));
    }
    let n = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")) as usize;
    let body = &bytes[24..];
    if body.len() != n * T::BYTES {
        return Err(bad("parameter count does not match file length"));
    }
    Ok(body.chunks_exact(T::BYTES).map(T::read_le).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointConfig {
    pub model: ModelConfig,
    pub shared_script: Script,
    pub param_count: usize,
}

/// A trained model with everything needed to translate text.
pub struct Checkpoint<T: Float> {
    pub model: Transformer<T>,
    pub vocab: SubwordModel,
    pub shared_script: Script,
    pub history: Option<History>,
}

impl<T: Float> Checkpoint<T> {
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, bytes: &[u8]| {
            let p = dir.join(name);
            fs::write(&p, bytes).map_err(|e| Error::io(p, e))
        };
        write("model.bin", &params_to_bytes(&self.model.params))?;
        let config = CheckpointConfig {
            model: self.model.config.clone(),
            shared_script: self.shared_script,
            param_count: self.model.param_count(),
        };
        write("config.json", serde_json::to_string_pretty(&config)?.as_bytes())?;
        self.vocab.save(&dir.join("vocab.bpe"))?;
        if let Some(h) = &self.history {
            write("history.json", serde_json::to_string_pretty(h)?.as_bytes())?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read(&p).map_err(|e| Error::io(p, e))
        };
        let config: CheckpointConfig = serde_json::from_slice(&read("config.json")?)?;
        let mut model = Transformer::new(config.model)?;
        let params = params_from_bytes::<T>(&read("model.bin")?)?;
        if params.len() != model.param_count() || params.len() != config.param_count {
            return Err(Error::ModelFormat(format!(
                "{} parameters stored, architecture needs {}",
                params.len(),
                model.param_count()
            )));
        }
        model.params = params;
        let vocab = SubwordModel::load(&dir.join("vocab.bpe"))?;
        let history = match dir.join("history.json").exists() {
            true => Some(serde_json::from_slice(&read("history.json")?)?),
            false => None,
        };
        Ok(Self {
            model,
            vocab,
            shared_script: config.shared_script,
            history,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes_round_trip_and_reject() {
        let p = vec![1.5f32, -0.0, f32::MIN_POSITIVE, 3.25e-7];
        let b = params_to_bytes(&p);
        let back: Vec<f32> = params_from_bytes(&b).unwrap();
        assert_eq!(back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), p.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        assert!(params_from_bytes::<f64>(&b).is_err());
        assert!(params_from_bytes::<f32>(&b[..b.len() - 1]).is_err());
        assert!(params_from_bytes::<f32>(b"garbage-garbage-garbage-").is_err());
    }
}
