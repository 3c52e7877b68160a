use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::table::ResultTable;
use crate::bleu::{corpus_bleu_with, off_target_rate, LanguageClassifier};
use crate::corpus::{clean_pairs, enumerate_directions, normalize_sentence, read_lines, write_lines, Direction, LanguageId, TaggedLine};
use crate::error::{Error, Result};
use crate::nmt::{train, Checkpoint, Example, History, Transformer, Translator};
use crate::overlap::VocabMode;
use crate::par::Exec;
use crate::subword::{train_bpe, SubwordModel, TrainConfig as BpeConfig, WordCounts, DEFAULT_COVERAGE};
use crate::synth::Family;
use crate::volt::{retrain, volt_search, VoltConfig};

/// Raw native-script text for one experiment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentData {
    pub train: BTreeMap<Direction, (Vec<String>, Vec<String>)>,
    /// Multi-way parallel, line i is the same sentence in every language.
    pub dev: BTreeMap<LanguageId, Vec<String>>,
    pub test: BTreeMap<LanguageId, Vec<String>>,
}

impl ExperimentData {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        config.check_files()?;
        let mut data = Self::default();
        for d in &config.train_directions {
            let f = &config.corpora[d];
            let (src, tgt) = (read_lines(&f.src)?, read_lines(&f.tgt)?);
            if src.len() != tgt.len() {
                return Err(Error::LineCountMismatch {
                    src_lines: src.len(),
                    tgt_lines: tgt.len(),
                });
            }
            data.train.insert(*d, (src, tgt));
        }
        for (l, p) in &config.eval.dev {
            data.dev.insert(*l, read_lines(p)?);
        }
        for (l, p) in &config.eval.test {
            data.test.insert(*l, read_lines(p)?);
        }
        Ok(data)
    }

    pub fn from_family(family: &Family, config: &ExperimentConfig) -> Self {
        Self {
            train: config
                .train_directions
                .iter()
                .filter_map(|d| family.parallel.get(d).map(|p| (*d, p.clone())))
                .collect(),
            dev: family.dev.lines.clone(),
            test: family.test.lines.clone(),
        }
    }

    fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let mut feed = |tag: &str, lines: &[String]| {
            h.update(tag.as_bytes());
            h.update((lines.len() as u64).to_le_bytes());
            for l in lines {
                h.update(l.as_bytes());
                h.update([0u8]);
            }
        };
        for (d, (s, t)) in &self.train {
            feed(&format!("train:{d}:src"), s);
            feed(&format!("train:{d}:tgt"), t);
        }
        for (l, lines) in &self.dev {
            feed(&format!("dev:{l}"), lines);
        }
        for (l, lines) in &self.test {
            feed(&format!("test:{l}"), lines);
        }
        format!("{:x}", h.finalize())
    }
}

fn hash_of(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    format!("{:x}", h.finalize())
}

/// Stage name to input hash for every completed stage of a run directory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stages: BTreeMap<String, String>,
}

impl Manifest {
    fn load(dir: &Path) -> Self {
        fs::read(dir.join("manifest.json"))
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .unwrap_or_default()
    }

    fn save(&self, dir: &Path) -> Result<()> {
        let p = dir.join("manifest.json");
        fs::write(&p, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(p, e))
    }

    fn done(&self, stage: &str, hash: &str) -> bool {
        self.stages.get(stage).is_some_and(|h| h == hash)
    }
}

pub struct RunOptions<'a> {
    pub exec: Exec,
    /// Artifacts and the resumable manifest go here when set.
    pub out_dir: Option<PathBuf>,
    pub classifier: Option<&'a (dyn LanguageClassifier + Sync)>,
    pub log: &'a (dyn Fn(&str) + Sync),
}

impl Default for RunOptions<'_> {
    fn default() -> Self {
        Self {
            exec: Exec::default(),
            out_dir: None,
            classifier: None,
            log: &|_| {},
        }
    }
}

pub struct ExperimentOutcome {
    pub table: ResultTable,
    pub checkpoint: Checkpoint<f32>,
    pub hypotheses: BTreeMap<Direction, Vec<String>>,
    /// Stages taken from a previous run instead of recomputed.
    pub reused: Vec<String>,
}

impl ExperimentOutcome {
    pub fn history(&self) -> Option<&History> {
        self.checkpoint.history.as_ref()
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name.to_string(),
        source: Box::new(e),
    })
}

type TokenPairs = Vec<(Vec<String>, Vec<String>)>;

fn prepare(config: &ExperimentConfig, data: &ExperimentData, exec: Exec) -> Result<BTreeMap<Direction, TokenPairs>> {
    let mut out = BTreeMap::new();
    for d in &config.train_directions {
        let (src, tgt) = data
            .train
            .get(d)
            .ok_or_else(|| Error::InvalidExperiment(format!("no training data for {d}")))?;
        let (pairs, _) = clean_pairs(src, tgt, *d, exec);
        let toks = exec.map(&pairs, |p| {
            Ok((
                normalize_sentence(&p.src, d.src, config.translit_target)?,
                normalize_sentence(&p.tgt, d.tgt, config.translit_target)?,
            ))
        });
        out.insert(*d, toks.into_iter().collect::<Result<Vec<_>>>()?);
    }
    Ok(out)
}

fn build_vocab(config: &ExperimentConfig, prepared: &BTreeMap<Direction, TokenPairs>, exec: Exec) -> Result<SubwordModel> {
    let mut counts = WordCounts::new();
    for pairs in prepared.values() {
        for (s, t) in pairs {
            counts.add_tokens(s, 1);
            counts.add_tokens(t, 1);
        }
    }
    match config.vocab {
        VocabMode::Bpe { size } => train_bpe(&counts, &BpeConfig::new(size)),
        VocabMode::Volt { size, threshold, step } => {
            let full = train_bpe(&counts, &BpeConfig::new(size))?;
            let vc = VoltConfig {
                threshold,
                step,
                exec,
                ..VoltConfig::default()
            };
            let (rec, _) = volt_search(&counts, &full, &vc)?;
            retrain(&counts, &rec, DEFAULT_COVERAGE, exec)
        }
    }
}

fn encode_pair(vocab: &SubwordModel, d: Direction, src: &[String], tgt: &[String]) -> Result<Example> {
    Ok(Example {
        src: vocab.encode_ids(&TaggedLine::source(d, src.to_vec()).tokens())?,
        tgt: vocab.encode_ids(&TaggedLine::target(tgt.to_vec()).tokens())?,
    })
}

fn dev_examples(config: &ExperimentConfig, data: &ExperimentData, vocab: &SubwordModel) -> Result<Vec<Example>> {
    let mut out = Vec::new();
    for d in &config.train_directions {
        let (Some(src), Some(tgt)) = (data.dev.get(&d.src), data.dev.get(&d.tgt)) else {
            continue;
        };
        let n = src.len().min(tgt.len()).min(config.dev_limit.unwrap_or(usize::MAX));
        for i in 0..n {
            let s = normalize_sentence(&src[i], d.src, config.translit_target);
            let t = normalize_sentence(&tgt[i], d.tgt, config.translit_target);
            if let (Ok(s), Ok(t)) = (s, t) {
                out.push(encode_pair(vocab, *d, &s, &t)?);
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct EvalRecord {
    bleu: f64,
    off_target: Option<f64>,
    hypotheses: Vec<String>,
}

struct Trained {
    checkpoint: Checkpoint<f32>,
    train_hash: String,
    manifest: Manifest,
    reused: Vec<String>,
}

fn train_stages(config: &ExperimentConfig, data: &ExperimentData, opts: &RunOptions) -> Result<Trained> {
    config.validate()?;
    let log = opts.log;
    let exec = opts.exec;
    let out = opts.out_dir.as_deref();
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        fs::write(dir.join("config.json"), config.to_json()?).map_err(|e| Error::io(dir, e))?;
    }
    let mut manifest = out.map(Manifest::load).unwrap_or_default();
    let mut reused = Vec::new();
    let save = |m: &Manifest| out.map_or(Ok(()), |d| m.save(d));

    let data_hash = data.fingerprint();
    let vocab_hash = hash_of(&[
        "vocab",
        &data_hash,
        &serde_json::to_string(&config.vocab)?,
        &config.translit_target.to_string(),
        &serde_json::to_string(&config.train_directions)?,
    ]);
    let prepared = stage("prep", prepare(config, data, exec))?;
    log(&format!("prep: {} directions", prepared.len()));

    let vocab_path = out.map(|d| d.join("vocab.bpe"));
    let vocab = match &vocab_path {
        Some(p) if manifest.done("vocab", &vocab_hash) && p.exists() => {
            reused.push("vocab".to_string());
            stage("vocab", SubwordModel::load(p))?
        }
        _ => {
            let v = stage("vocab", build_vocab(config, &prepared, exec))?;
            if let Some(p) = &vocab_path {
                stage("vocab", v.save(p))?;
                manifest.stages.insert("vocab".into(), vocab_hash.clone());
                save(&manifest)?;
            }
            v
        }
    };
    log(&format!("vocab: {} symbols", vocab.vocab_size()));

    let mut model_config = config.model.clone();
    model_config.vocab_size = vocab.vocab_size();
    let train_hash = hash_of(&[
        "train",
        &vocab_hash,
        &serde_json::to_string(&model_config)?,
        &serde_json::to_string(&config.train)?,
        &format!("{:?}", config.dev_limit),
    ]);
    let model_dir = out.map(|d| d.join("model"));
    let checkpoint = match &model_dir {
        Some(p) if manifest.done("train", &train_hash) && p.join("model.bin").exists() => {
            reused.push("train".to_string());
            stage("train", Checkpoint::<f32>::load(p))?
        }
        _ => {
            let mut examples = Vec::new();
            for (d, pairs) in &prepared {
                for (s, t) in pairs {
                    examples.push(stage("train", encode_pair(&vocab, *d, s, t))?);
                }
            }
            let dev = stage("train", dev_examples(config, data, &vocab))?;
            let mut model = stage("train", Transformer::<f32>::new(model_config))?;
            log(&format!(
                "train: {} pairs, {} dev pairs, {} parameters",
                examples.len(),
                dev.len(),
                model.param_count()
            ));
            let history = stage(
                "train",
                train(&mut model, &examples, &dev, &config.train, exec, |r| {
                    log(&format!(
                        "epoch {}: train {:.4} dev {}",
                        r.epoch,
                        r.train_loss,
                        r.dev_loss.map_or("-".to_string(), |l| format!("{l:.4}"))
                    ))
                }),
            )?;
            let ck = Checkpoint {
                model,
                vocab: vocab.clone(),
                shared_script: config.translit_target,
                history: Some(history),
            };
            if let Some(p) = &model_dir {
                stage("train", ck.save(p))?;
                manifest.stages.insert("train".into(), train_hash.clone());
                save(&manifest)?;
            }
            ck
        }
    };

    Ok(Trained {
        checkpoint,
        train_hash,
        manifest,
        reused,
    })
}

/// prep → vocabulary → train, without evaluation.
pub fn train_experiment_model(config: &ExperimentConfig, data: &ExperimentData, opts: &RunOptions) -> Result<Checkpoint<f32>> {
    Ok(train_stages(config, data, opts)?.checkpoint)
}

/// prep → vocabulary → train → translate and score every direction of the
/// language set. With an output directory, each stage's result is stored
/// under a hash of its inputs and reused by later runs.
pub fn run_experiment(config: &ExperimentConfig, data: &ExperimentData, opts: &RunOptions) -> Result<ExperimentOutcome> {
    config.validate()?;
    for &l in &config.languages {
        if data.test.get(&l).is_none_or(|t| t.is_empty()) {
            return Err(Error::InvalidExperiment(format!("no test sentences for {l}")));
        }
    }
    let Trained {
        checkpoint,
        train_hash,
        mut manifest,
        mut reused,
    } = train_stages(config, data, opts)?;
    let (log, exec, out) = (opts.log, opts.exec, opts.out_dir.as_deref());
    let save = |m: &Manifest| out.map_or(Ok(()), |d| m.save(d));
    let mut translator = Translator::new(&checkpoint.model, &checkpoint.vocab, config.translit_target)?;
    translator.beam = config.beam;
    translator.max_len = config.max_len;
    let limit = config.test_limit.unwrap_or(usize::MAX);
    let directions = enumerate_directions(&config.languages);
    let eval_hash = |d: &Direction| {
        hash_of(&[
            "eval",
            &train_hash,
            &d.to_string(),
            &format!("{} {} {:?} {}", config.beam, config.max_len, config.test_limit, opts.classifier.is_some()),
        ])
    };
    let mut records: BTreeMap<Direction, EvalRecord> = BTreeMap::new();
    let mut todo = Vec::new();
    for d in &directions {
        let cached = out.filter(|_| manifest.done(&format!("eval:{d}"), &eval_hash(d))).and_then(|dir| {
            fs::read(dir.join("eval").join(format!("{d}.json")))
                .ok()
                .and_then(|b| serde_json::from_slice::<EvalRecord>(&b).ok())
        });
        match cached {
            Some(r) => {
                reused.push(format!("eval:{d}"));
                records.insert(*d, r);
            }
            None => todo.push(*d),
        }
    }
    let classifier = opts.classifier;
    let fresh = exec.map(&todo, |d| -> Result<EvalRecord> {
        let src = &data.test[&d.src];
        let refs = &data.test[&d.tgt];
        let n = src.len().min(refs.len()).min(limit);
        let hyps = translator.translate_all(&src[..n], *d, Exec::Sequential)?;
        let bleu = corpus_bleu_with(&hyps, &refs[..n], Exec::Sequential)?.score;
        let off_target = match classifier {
            Some(c) => Some(off_target_rate(&hyps, d.tgt, c)?.rate),
            None => None,
        };
        Ok(EvalRecord {
            bleu,
            off_target,
            hypotheses: hyps,
        })
    });
    for (d, r) in todo.iter().zip(fresh) {
        let r = stage(&format!("eval:{d}"), r)?;
        log(&format!("eval {d}: bleu {:.2}", r.bleu));
        if let Some(dir) = out {
            let ed = dir.join("eval");
            fs::create_dir_all(&ed).map_err(|e| Error::io(&ed, e))?;
            let p = ed.join(format!("{d}.json"));
            fs::write(&p, serde_json::to_string(&r)?).map_err(|e| Error::io(&p, e))?;
            write_lines(&ed.join(format!("{d}.hyp")), &r.hypotheses)?;
            manifest.stages.insert(format!("eval:{d}"), eval_hash(d));
            save(&manifest)?;
        }
        records.insert(*d, r);
    }

    let mut table = ResultTable::new(config.name.clone(), config.languages.clone());
    let mut hypotheses = BTreeMap::new();
    for (d, r) in records {
        table.set(d, r.bleu, config.train_directions.contains(&d), r.off_target);
        hypotheses.insert(d, r.hypotheses);
    }
    if let Some(dir) = out {
        let p = dir.join("results.tsv");
        fs::write(&p, table.to_tsv()).map_err(|e| Error::io(&p, e))?;
        let p = dir.join("results.json");
        fs::write(&p, serde_json::to_string_pretty(&table)?).map_err(|e| Error::io(&p, e))?;
    }
    Ok(ExperimentOutcome {
        table,
        checkpoint,
        hypotheses,
        reused,
    })
}
