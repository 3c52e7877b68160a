use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::coverage::validate_direction_coverage;
use crate::corpus::{enumerate_directions, parse_directions, Direction, LanguageId};
use crate::error::{Error, Result};
use crate::nmt::decode::{DEFAULT_BEAM, DEFAULT_MAX_LEN};
use crate::nmt::{ModelConfig, TrainConfig};
use crate::overlap::VocabMode;
use crate::script::Script;
use crate::volt::{DEFAULT_STEP, DEFAULT_THRESHOLD};

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_VOCAB_SIZE: usize = 32000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFiles {
    pub src: PathBuf,
    pub tgt: PathBuf,
}

/// Multi-way parallel dev and test sets, one file per language.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalFiles {
    pub dev: BTreeMap<LanguageId, PathBuf>,
    pub test: BTreeMap<LanguageId, PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub provenance: String,
    pub languages: Vec<LanguageId>,
    pub train_directions: Vec<Direction>,
    pub translit_target: Script,
    pub vocab: VocabMode,
    /// `vocab_size` is filled in from the trained subword model.
    pub model: ModelConfig,
    pub train: TrainConfig,
    #[serde(default)]
    pub corpora: BTreeMap<Direction, CorpusFiles>,
    #[serde(default)]
    pub eval: EvalFiles,
    pub beam: usize,
    pub max_len: usize,
    /// Use only the first n test sentences of each language.
    #[serde(default)]
    pub test_limit: Option<usize>,
    #[serde(default)]
    pub dev_limit: Option<usize>,
    /// Run even when some language lacks an encoder or decoder role.
    #[serde(default)]
    pub allow_uncovered: bool,
}

impl ExperimentConfig {
    pub fn new(name: &str, train_directions: Vec<Direction>) -> Self {
        Self {
            version: CONFIG_VERSION,
            name: name.to_string(),
            provenance: String::new(),
            languages: LanguageId::ALL.to_vec(),
            train_directions,
            translit_target: Script::Devanagari,
            vocab: VocabMode::Bpe {
                size: DEFAULT_VOCAB_SIZE,
            },
            model: ModelConfig::new(0),
            train: TrainConfig::default(),
            corpora: BTreeMap::new(),
            eval: EvalFiles::default(),
            beam: DEFAULT_BEAM,
            max_len: DEFAULT_MAX_LEN,
            test_limit: None,
            dev_limit: None,
            allow_uncovered: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        if c.version != CONFIG_VERSION {
            return Err(Error::InvalidExperiment(format!("unsupported config version {}", c.version)));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Points the corpora and eval sets at a directory laid out like the
    /// synthetic family writer's output: `train/<src>-<tgt>.<lang>`,
    /// `dev.<lang>`, `test.<lang>`.
    pub fn with_data_dir(mut self, dir: &Path) -> Self {
        for &d in &self.train_directions {
            let f = |l: LanguageId| dir.join("train").join(format!("{d}.{l}"));
            self.corpora.insert(d, CorpusFiles { src: f(d.src), tgt: f(d.tgt) });
        }
        for &l in &self.languages {
            self.eval.dev.insert(l, dir.join(format!("dev.{l}")));
            self.eval.test.insert(l, dir.join(format!("test.{l}")));
        }
        self
    }

    /// Structural checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidExperiment(m));
        if self.train_directions.is_empty() {
            return bad("no training directions".into());
        }
        let possible = enumerate_directions(&self.languages);
        if let Some(d) = self.train_directions.iter().find(|d| !possible.contains(d)) {
            return bad(format!("direction {d} is outside the language set"));
        }
        let report = validate_direction_coverage(&self.train_directions, &self.languages);
        if !report.is_ok() && !self.allow_uncovered {
            return Err(Error::Coverage(report.to_string()));
        }
        if self.beam == 0 || self.max_len == 0 {
            return bad("beam and max_len must be positive".into());
        }
        Ok(())
    }

    /// Every referenced file must exist; returns the missing ones otherwise.
    pub fn check_files(&self) -> Result<()> {
        let mut missing = Vec::new();
        for d in &self.train_directions {
            match self.corpora.get(d) {
                Some(f) => missing.extend([&f.src, &f.tgt].into_iter().filter(|p| !p.exists()).map(|p| p.display().to_string())),
                None => missing.push(format!("corpus for {d}")),
            }
        }
        for &l in &self.languages {
            match self.eval.test.get(&l) {
                Some(p) if !p.exists() => missing.push(p.display().to_string()),
                None => missing.push(format!("test set for {l}")),
                _ => {}
            }
            if let Some(p) = self.eval.dev.get(&l).filter(|p| !p.exists()) {
                missing.push(p.display().to_string());
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidExperiment(format!("missing inputs: {}", missing.join(", "))))
        }
    }
}

pub const PRESET_NAMES: [&str; 7] = ["4lang-1", "4lang-2", "4lang-3", "6lang", "8lang", "4lang-2-kn", "4lang-2-ml"];

fn dirs(s: &str) -> Vec<Direction> {
    parse_directions(s).expect("preset directions parse")
}

/// Shipped experiment grid. Corpora and eval paths are left empty.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cycle = "kn-ml,ml-te,te-ta,ta-kn";
    let six = "ml-te,ml-ta,te-kn,te-ta,ta-kn,kn-ml";
    let (dirs_s, provenance) = match name {
        "4lang-1" => ("kn-ml,ml-kn,te-ta,ta-te", "two language pairs in both directions"),
        "4lang-2" | "4lang-2-kn" | "4lang-2-ml" => (cycle, "four unique pairs forming a cycle"),
        "4lang-3" => (cycle, "four unique pairs forming a cycle, VOLT vocabulary"),
        "6lang" => (six, "bold cells of the 6-pair results table"),
        "8lang" => (
            "ml-te,ml-ta,te-kn,te-ta,ta-kn,kn-ml,kn-te,kn-ta",
            "bold cells of the 8-pair results table",
        ),
        _ => return None,
    };
    let mut c = ExperimentConfig::new(name, dirs(dirs_s));
    c.provenance = provenance.to_string();
    match name {
        "4lang-3" => {
            c.vocab = VocabMode::Volt {
                size: DEFAULT_VOCAB_SIZE,
                threshold: DEFAULT_THRESHOLD,
                step: DEFAULT_STEP,
            }
        }
        "4lang-2-kn" => c.translit_target = Script::Kannada,
        "4lang-2-ml" => c.translit_target = Script::Malayalam,
        _ => {}
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            p.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&p.to_json().unwrap()).unwrap(), p);
        }
        assert_eq!(preset("6lang").unwrap().train_directions.len(), 6);
        assert_eq!(preset("8lang").unwrap().train_directions.len(), 8);
        assert!(preset("nope").is_none());
    }

    #[test]
    fn rejects_uncovered_and_missing_files() {
        let mut c = ExperimentConfig::new("x", dirs("kn-ml,kn-te,kn-ta"));
        assert!(matches!(c.validate(), Err(Error::Coverage(_))));
        c.allow_uncovered = true;
        c.validate().unwrap();
        let c = preset("4lang-2").unwrap().with_data_dir(Path::new("/nonexistent"));
        assert!(matches!(c.check_files(), Err(Error::InvalidExperiment(m)) if m.contains("missing")));
    }
}
