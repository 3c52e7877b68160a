//! Greedy and beam-search decoding, and the sentence-level translator.

use std::cmp::Ordering;

use super::model::Transformer;
use super::tensor::Float;
use crate::corpus::{normalize_sentence, Direction, TaggedLine};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::script::{transliterate, Script};
use crate::subword::{SubwordModel, END_ID, EOS_ID};

pub const DEFAULT_BEAM: usize = 5;
pub const DEFAULT_MAX_LEN: usize = 48;

pub fn is_stop(id: u32) -> bool {
    id == END_ID || id == EOS_ID
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    /// Generated ids, ending with the stop token when finished.
    pub tokens: Vec<u32>,
    pub log_prob: f64,
    pub finished: bool,
}

impl Hypothesis {
    /// Log-probability per generated token.
    pub fn normalized(&self) -> f64 {
        self.log_prob / self.tokens.len().max(1) as f64
    }

    /// Tokens before the first stop.
    pub fn content(&self) -> &[u32] {
        let end = self.tokens.iter().position(|&t| is_stop(t)).unwrap_or(self.tokens.len());
        &self.tokens[..end]
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

pub fn greedy<T: Float>(model: &Transformer<T>, src: &[u32], max_len: usize) -> Hypothesis {
    let memory = model.encode(src);
    let mut prefix = vec![model.start_id(src)];
    let mut h = Hypothesis {
        tokens: Vec::new(),
        log_prob: 0.0,
        finished: false,
    };
    for _ in 0..max_len {
        let lp = model.next_log_probs(&memory, src.len(), std::slice::from_ref(&prefix)).remove(0);
        let j = argmax(&lp);
        h.tokens.push(j as u32);
        h.log_prob += lp[j];
        if is_stop(j as u32) {
            h.finished = true;
            break;
        }
        prefix.push(j as u32);
    }
    h
}

/// Beam search over cumulative log-probability. Each step keeps the best
/// `beam` live continuations; a stop token ranked within the top `beam`
/// finishes its hypothesis. Search ends when `beam` hypotheses have finished
/// or at `max_len`, and the winner is picked by length-normalised score.
/// The greedy path is scored too and returned if it normalises better, so
/// the result never trails greedy decoding.
pub fn beam_search<T: Float>(model: &Transformer<T>, src: &[u32], beam: usize, max_len: usize) -> Hypothesis {
    let beam = beam.max(1);
    let memory = model.encode(src);
    let start = model.start_id(src);
    let mut alive: Vec<Hypothesis> = vec![Hypothesis {
        tokens: Vec::new(),
        log_prob: 0.0,
        finished: false,
    }];
    let mut finished: Vec<Hypothesis> = Vec::new();
    for _ in 0..max_len {
        let prefixes: Vec<Vec<u32>> = alive
            .iter()
            .map(|h| std::iter::once(start).chain(h.tokens.iter().copied()).collect())
            .collect();
        let lps = model.next_log_probs(&memory, src.len(), &prefixes);
        let mut cands: Vec<(f64, usize, usize)> = Vec::with_capacity(alive.len() * lps[0].len());
        for (i, lp) in lps.iter().enumerate() {
            cands.extend(lp.iter().enumerate().map(|(j, &l)| (alive[i].log_prob + l, i, j)));
        }
        cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut next = Vec::with_capacity(beam);
        for (rank, &(score, i, j)) in cands.iter().enumerate() {
            if next.len() >= beam {
                break;
            }
            let mut tokens = alive[i].tokens.clone();
            tokens.push(j as u32);
            let h = Hypothesis {
                tokens,
                log_prob: score,
                finished: is_stop(j as u32),
            };
            if h.finished {
                if rank < beam {
                    finished.push(h);
                }
            } else {
                next.push(h);
            }
        }
        if finished.len() >= beam || next.is_empty() {
            alive.clear();
            break;
        }
        alive = next;
    }
    finished.extend(alive.into_iter().filter(|h| !h.tokens.is_empty()));
    finished.push(greedy(model, src, max_len));
    let mut best = finished.swap_remove(finished.len() - 1);
    for h in finished {
        if h.normalized() > best.normalized() {
            best = h;
        }
    }
    best
}

/// Text-to-text translation with a trained model and its subword vocabulary.
pub struct Translator<'a, T: Float> {
    pub model: &'a Transformer<T>,
    pub vocab: &'a SubwordModel,
    /// Script the training data was transliterated into.
    pub shared_script: Script,
    pub beam: usize,
    pub max_len: usize,
}

impl<'a, T: Float> Translator<'a, T> {
    pub fn new(model: &'a Transformer<T>, vocab: &'a SubwordModel, shared_script: Script) -> Result<Self> {
        if !vocab.is_trained() {
            return Err(Error::UntrainedModel);
        }
        if vocab.vocab_size() != model.config.vocab_size {
            return Err(Error::InvalidConfig(format!(
                "model expects {} ids, vocabulary has {}",
                model.config.vocab_size,
                vocab.vocab_size()
            )));
        }
        Ok(Self {
            model,
            vocab,
            shared_script,
            beam: DEFAULT_BEAM,
            max_len: DEFAULT_MAX_LEN,
        })
    }

    /// Tagged source ids, truncated to the model's positions with `[END]`
    /// kept last.
    pub fn source_ids(&self, sentence: &str, direction: Direction) -> Result<Vec<u32>> {
        let words = normalize_sentence(sentence, direction.src, self.shared_script)?;
        let mut ids = self.vocab.encode_ids(&TaggedLine::source(direction, words).tokens())?;
        let max = self.model.config.max_seq_len;
        if ids.len() > max {
            ids.truncate(max);
            ids[max - 1] = END_ID;
        }
        Ok(ids)
    }

    /// Drops everything from the first stop token on and any reserved ids,
    /// then detokenises and maps back to the target's native script.
    pub fn render(&self, hyp: &Hypothesis, direction: Direction) -> Result<String> {
        let ids: Vec<u32> = hyp.content().iter().copied().filter(|&i| !self.vocab.is_reserved_id(i)).collect();
        let shared = self.vocab.decode_ids(&ids)?;
        Ok(transliterate(&shared, self.shared_script, direction.tgt.native_script()))
    }

    pub fn hypothesis(&self, sentence: &str, direction: Direction) -> Result<Hypothesis> {
        let src = self.source_ids(sentence, direction)?;
        Ok(if self.beam <= 1 {
            greedy(self.model, &src, self.max_len)
        } else {
            beam_search(self.model, &src, self.beam, self.max_len)
        })
    }

    pub fn translate(&self, sentence: &str, direction: Direction) -> Result<String> {
        let h = self.hypothesis(sentence, direction)?;
        self.render(&h, direction)
    }

    pub fn translate_all<S: AsRef<str> + Sync>(&self, sentences: &[S], direction: Direction, exec: Exec) -> Result<Vec<String>> {
        exec.map(sentences, |s| self.translate(s.as_ref(), direction)).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmt::model::{DecoderStart, ModelConfig};

    fn model(seed: u64) -> Transformer<f64> {
        let mut c = ModelConfig::new(30);
        c.model_dim = 16;
        c.heads = 2;
        c.ffn_dim = 32;
        c.layers_enc = 1;
        c.layers_dec = 1;
        c.seed = seed;
        c.decoder_start = DecoderStart::Bos;
        Transformer::new(c).unwrap()
    }

    fn src(i: u32) -> Vec<u32> {
        vec![5, 10, 13 + i % 10, 20 + i % 7, 14, END_ID]
    }

    #[test]
    fn beam_one_is_greedy() {
        for seed in 0..5 {
            let m = model(seed);
            for i in 0..6 {
                let s = src(i);
                let g = greedy(&m, &s, 12);
                let mut b = beam_search(&m, &s, 1, 12);
                b.finished = g.finished;
                assert_eq!(b.tokens, g.tokens);
            }
        }
    }

    #[test]
    fn beam_never_trails_greedy() {
        for seed in 0..5 {
            let m = model(seed);
            for i in 0..6 {
                let s = src(i);
                let g = greedy(&m, &s, 12);
                let b = beam_search(&m, &s, 5, 12);
                assert!(b.normalized() >= g.normalized() - 1e-12);
            }
        }
    }

    #[test]
    fn content_stops_at_first_stop() {
        let h = Hypothesis {
            tokens: vec![20, 21, END_ID, 22],
            log_prob: -1.0,
            finished: true,
        };
        assert_eq!(h.content(), &[20, 21]);
        assert!((h.normalized() + 0.25).abs() < 1e-12);
    }
}
