//! Vocabulary size selection by marginal utility of vocabularization (MUV).
//!
//! A BPE model trained with a large target supplies the merge sequence.
//! Candidate vocabularies are its prefixes taken every `step` merges. Each
//! candidate segments the corpus by greedy longest match; a transport plan
//! from characters to tokens (solved with Sinkhorn) yields the token
//! distribution whose length-normalised entropy H_v is scored. The
//! recommendation is the vocabulary reached at the end of the step with the
//! largest entropy drop per added token.

mod sinkhorn;

pub use sinkhorn::{sinkhorn, SinkhornParams, SinkhornReport, TransportPlan, TransportProblem};

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::subword::{split_reserved, train_bpe, Span, SubwordModel, TrainConfig, WordCounts, MARKER};

pub const DEFAULT_THRESHOLD: usize = 10_000;
pub const DEFAULT_STEP: usize = 1_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateVocabulary {
    pub timestep: usize,
    /// Non-reserved tokens, in merge order after the base characters.
    pub tokens: Vec<String>,
    /// Vocabulary size including reserved symbols.
    pub size: usize,
    pub mean_token_length: f64,
    /// Length-normalised entropy H_v; zero until scored.
    pub entropy: f64,
    /// Unnormalised token entropy; zero until scored.
    pub raw_entropy: f64,
    pub muv: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltConfig {
    pub threshold: usize,
    pub step: usize,
    pub sinkhorn: SinkhornParams,
    pub exec: Exec,
}

impl Default for VoltConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            step: DEFAULT_STEP,
            sinkhorn: SinkhornParams::default(),
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimestepReport {
    pub timestep: usize,
    pub size: usize,
    pub entropy: f64,
    pub raw_entropy: f64,
    pub muv: Option<f64>,
    pub sinkhorn: SinkhornReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltReport {
    pub threshold: usize,
    pub step: usize,
    pub candidates: Vec<TimestepReport>,
    pub recommended_timestep: usize,
    pub recommended_size: usize,
    /// Timesteps whose raw entropy rose above the previous candidate's.
    pub monotonicity_violations: Vec<usize>,
    pub warnings: Vec<String>,
}

fn token_len(token: &str) -> usize {
    token.chars().filter(|&c| c != MARKER).count()
}

/// Prefixes of the merge sequence every `step` merges, starting from the
/// base vocabulary, up to the largest one whose size fits `threshold`.
pub fn enumerate_candidates(model: &SubwordModel, step: usize, threshold: usize) -> Result<Vec<CandidateVocabulary>> {
    if model.merges().is_empty() {
        return Err(Error::EmptyMergeList);
    }
    if step == 0 {
        return Err(Error::InvalidConfig("step must be at least 1".into()));
    }
    let reserved = model.reserved_count();
    let base: Vec<String> = model.subword_tokens()[..model.base_size() - reserved].to_vec();
    let mut seen: HashSet<String> = base.iter().cloned().collect();
    let mut tokens = base;
    let mut out = Vec::new();
    let push = |t: usize, tokens: &Vec<String>, out: &mut Vec<CandidateVocabulary>| {
        let size = reserved + tokens.len();
        if size > threshold || out.last().is_some_and(|c: &CandidateVocabulary| c.size >= size) {
            return size <= threshold;
        }
        let total: usize = tokens.iter().map(|t| token_len(t)).sum();
        out.push(CandidateVocabulary {
            timestep: t,
            tokens: tokens.clone(),
            size,
            mean_token_length: total as f64 / tokens.len().max(1) as f64,
            entropy: 0.0,
            raw_entropy: 0.0,
            muv: None,
        });
        true
    };
    push(0, &tokens, &mut out);
    for (t, chunk) in model.merges().chunks(step).enumerate() {
        if chunk.len() < step {
            break;
        }
        for (l, r) in chunk {
            let merged = format!("{l}{r}");
            if seen.insert(merged.clone()) {
                tokens.push(merged);
            }
        }
        if !push(t + 1, &tokens, &mut out) {
            break;
        }
    }
    Ok(out)
}

/// Greedy longest-match segmentation over a fixed token set.
struct Segmenter<'a> {
    index: HashMap<&'a str, usize>,
    max_len: usize,
}

impl<'a> Segmenter<'a> {
    fn new(tokens: &'a [String]) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        let max_len = tokens.iter().map(|t| t.chars().count()).max().unwrap_or(1);
        Self { index, max_len }
    }

    /// Token indices for one text span. Characters no token covers are
    /// skipped.
    fn segment(&self, text: &str, initial: bool, out: &mut Vec<usize>) {
        let bounds: Vec<usize> = text.char_indices().map(|(b, _)| b).chain([text.len()]).collect();
        let n = bounds.len() - 1;
        let mut buf = String::new();
        let mut i = 0;
        while i < n {
            let marked = initial && i == 0;
            let longest = (n - i).min(self.max_len - usize::from(marked));
            let hit = (1..=longest).rev().find_map(|k| {
                let piece = &text[bounds[i]..bounds[i + k]];
                let key = if marked {
                    buf.clear();
                    buf.push(MARKER);
                    buf.push_str(piece);
                    buf.as_str()
                } else {
                    piece
                };
                self.index.get(key).map(|&id| (id, k))
            });
            match hit {
                Some((id, k)) => {
                    out.push(id);
                    i += k;
                }
                None => i += 1,
            }
        }
    }
}

/// Token frequencies of `tokens` over the corpus under greedy longest match.
fn token_counts(tokens: &[String], corpus: &[(&str, u64)], reserved: &[String]) -> Vec<u64> {
    let seg = Segmenter::new(tokens);
    let mut counts = vec![0u64; tokens.len()];
    let mut ids = Vec::new();
    for &(word, weight) in corpus {
        for span in split_reserved(word, reserved) {
            if let Span::Text { text, initial } = span {
                ids.clear();
                seg.segment(text, initial, &mut ids);
                for &id in &ids {
                    counts[id] += weight;
                }
            }
        }
    }
    counts
}

fn entropy(probs: impl Iterator<Item = f64>) -> f64 {
    -probs.filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Builds the character-to-token transport problem for one candidate from
/// its segmentation counts. Returns the problem and the used token indices
/// (columns).
fn transport_problem(tokens: &[String], counts: &[u64]) -> Result<(TransportProblem, Vec<usize>)> {
    let used: Vec<usize> = (0..tokens.len()).filter(|&j| counts[j] > 0).collect();
    let n_tokens: u64 = used.iter().map(|&j| counts[j]).sum();
    let mut char_mass: BTreeMap<char, u64> = BTreeMap::new();
    let mut per_token: Vec<BTreeMap<char, u64>> = Vec::with_capacity(used.len());
    for &j in &used {
        let mut m = BTreeMap::new();
        for c in tokens[j].chars().filter(|&c| c != MARKER) {
            *m.entry(c).or_insert(0) += 1;
            *char_mass.entry(c).or_insert(0) += counts[j];
        }
        per_token.push(m);
    }
    let total: u64 = char_mass.values().sum();
    let row_of: HashMap<char, usize> = char_mass.keys().enumerate().map(|(i, &c)| (c, i)).collect();
    let rows: Vec<f64> = char_mass.values().map(|&m| m as f64 / total as f64).collect();
    let mut cols = Vec::with_capacity(used.len());
    let mut cells = Vec::new();
    for (col, &j) in used.iter().enumerate() {
        cols.push(counts[j] as f64 * token_len(&tokens[j]) as f64 / total as f64);
        let cost = -(counts[j] as f64 / n_tokens as f64).ln();
        cells.extend(per_token[col].keys().map(|c| (row_of[c], col, cost)));
    }
    Ok((TransportProblem::sparse(rows, cols, cells)?, used))
}

/// Fills in `entropy` and `raw_entropy` for one candidate.
pub fn score_candidate(
    cand: &mut CandidateVocabulary,
    corpus: &[(&str, u64)],
    reserved: &[String],
    params: &SinkhornParams,
) -> Result<SinkhornReport> {
    let counts = token_counts(&cand.tokens, corpus, reserved);
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::EmptyCorpus);
    }
    let (problem, used) = transport_problem(&cand.tokens, &counts)?;
    let (plan, report) = sinkhorn(&problem, params)?;
    // Token mass recovered from the plan: character mass over token length.
    let mass: Vec<f64> = plan
        .col_sums()
        .iter()
        .zip(&used)
        .map(|(s, &j)| s / token_len(&cand.tokens[j]) as f64)
        .collect();
    let z: f64 = mass.iter().sum();
    cand.raw_entropy = entropy(mass.iter().map(|m| m / z));
    cand.entropy = cand.raw_entropy / cand.mean_token_length;
    Ok(report)
}

/// Scores every candidate up to `config.threshold` and picks the one at the
/// end of the step with the highest MUV.
pub fn volt_search(
    corpus: &WordCounts,
    model: &SubwordModel,
    config: &VoltConfig,
) -> Result<(CandidateVocabulary, VoltReport)> {
    if config.threshold <= model.base_size() {
        return Err(Error::ThresholdTooSmall {
            threshold: config.threshold,
            base: model.base_size(),
        });
    }
    let mut cands = enumerate_candidates(model, config.step, config.threshold)?;
    let words = corpus.sorted();
    let reserved = model.reserved_tokens();
    let scored = config.exec.map(&cands, |c| {
        let mut c = c.clone();
        score_candidate(&mut c, &words, reserved, &config.sinkhorn).map(|r| (c, r))
    });
    let mut reports = Vec::with_capacity(cands.len());
    cands.clear();
    for s in scored {
        let (c, r) = s?;
        cands.push(c);
        reports.push(r);
    }
    for t in 0..cands.len().saturating_sub(1) {
        let (a, b) = (&cands[t], &cands[t + 1]);
        cands[t].muv = Some(-(b.entropy - a.entropy) / (b.size - a.size) as f64);
    }
    let best = cands
        .iter()
        .enumerate()
        .filter_map(|(t, c)| c.muv.map(|m| (t, m)))
        .fold(None, |acc: Option<(usize, f64)>, (t, m)| match acc {
            Some((_, bm)) if bm >= m => acc,
            _ => Some((t, m)),
        });
    let pick = best.map_or(0, |(t, _)| t + 1);

    let mut warnings = Vec::new();
    for (c, r) in cands.iter().zip(&reports) {
        if !r.converged {
            warnings.push(format!(
                "sinkhorn did not converge at timestep {} (violation {:.3e} after {} iterations)",
                c.timestep, r.max_violation, r.iterations
            ));
        }
    }
    let monotonicity_violations: Vec<usize> = cands
        .windows(2)
        .filter(|w| w[1].raw_entropy > w[0].raw_entropy + 1e-9)
        .map(|w| w[1].timestep)
        .collect();
    if !monotonicity_violations.is_empty() {
        warnings.push(format!("raw entropy increased at timesteps {monotonicity_violations:?}"));
    }
    let report = VoltReport {
        threshold: config.threshold,
        step: config.step,
        candidates: cands
            .iter()
            .zip(&reports)
            .map(|(c, r)| TimestepReport {
                timestep: c.timestep,
                size: c.size,
                entropy: c.entropy,
                raw_entropy: c.raw_entropy,
                muv: c.muv,
                sinkhorn: *r,
            })
            .collect(),
        recommended_timestep: cands[pick].timestep,
        recommended_size: cands[pick].size,
        monotonicity_violations,
        warnings,
    };
    Ok((cands.swap_remove(pick), report))
}

/// Trains a fresh subword model whose target size is the recommendation.
pub fn retrain(corpus: &WordCounts, recommended: &CandidateVocabulary, coverage: f64, exec: Exec) -> Result<SubwordModel> {
    let config = TrainConfig {
        target_size: recommended.size,
        character_coverage: coverage,
        exec,
    };
    train_bpe(corpus, &config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_for(words: &[(&str, u64)], target: usize) -> (WordCounts, SubwordModel) {
        let mut wc = WordCounts::new();
        for &(w, c) in words {
            wc.add_word(w, c);
        }
        let m = train_bpe(&wc, &TrainConfig::new(target).with_coverage(1.0)).unwrap();
        (wc, m)
    }

    #[test]
    fn repeated_word_peaks_when_word_is_whole() {
        let (wc, m) = model_for(&[("abcd", 50)], 200);
        assert_eq!(m.merges().len(), 3);
        let config = VoltConfig {
            step: 1,
            threshold: 200,
            exec: Exec::Sequential,
            ..VoltConfig::default()
        };
        let (rec, report) = volt_search(&wc, &m, &config).unwrap();
        assert_eq!(rec.timestep, 3);
        assert!(rec.tokens.iter().any(|t| t == "▁abcd"));
        // base of 8 tokens (4 chars, bare and marked), one token per merge
        let h: Vec<f64> = report.candidates.iter().map(|c| c.entropy).collect();
        let expect = [4f64.ln(), 3f64.ln() / (10.0 / 9.0), 2f64.ln() / 1.3, 0.0];
        for (a, b) in h.iter().zip(expect) {
            assert!((a - b).abs() < 1e-6, "{h:?}");
        }
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn candidate_sizes_follow_step() {
        let words: Vec<(String, u64)> = (0..40).map(|i| (format!("w{}x{}y", i % 7, i), 3 + i as u64)).collect();
        let refs: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
        let (_, m) = model_for(&refs, 400);
        let base = m.base_size();
        let cands = enumerate_candidates(&m, 10, 10_000).unwrap();
        assert_eq!(cands[0].size, base);
        for w in cands.windows(2) {
            assert!(w[1].size > w[0].size);
            assert!(w[1].size <= w[0].size + 10);
        }
        assert_eq!(cands.len(), m.merges().len() / 10 + 1);
        let big = enumerate_candidates(&m, m.merges().len() + 1, 10_000).unwrap();
        assert_eq!(big.len(), 1);
        let capped = enumerate_candidates(&m, 10, base + 25).unwrap();
        assert!(capped.iter().all(|c| c.size <= base + 25));
    }

    #[test]
    fn errors() {
        let (wc, m) = model_for(&[("abab", 5), ("ba", 2)], 100);
        let config = VoltConfig {
            threshold: m.base_size(),
            ..VoltConfig::default()
        };
        assert!(matches!(volt_search(&wc, &m, &config), Err(Error::ThresholdTooSmall { .. })));
        let (_, single) = model_for(&[("a", 5)], 100);
        assert!(matches!(enumerate_candidates(&single, 1, 100), Err(Error::EmptyMergeList)));
    }

    #[test]
    fn retrain_hits_recommended_size() {
        let words: Vec<(String, u64)> = (0..30).map(|i| (format!("ka{}ta{}", i % 5, i % 3), 10)).collect();
        let refs: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
        let (wc, m) = model_for(&refs, 300);
        let config = VoltConfig {
            step: 3,
            threshold: 300,
            ..VoltConfig::default()
        };
        let (rec, report) = volt_search(&wc, &m, &config).unwrap();
        assert_eq!(report.recommended_size, rec.size);
        // Whole-word tokens over equally weighted types push raw entropy up.
        assert!(!report.monotonicity_violations.is_empty());
        assert!(report.warnings.iter().any(|w| w.contains("raw entropy")));
        let fresh = retrain(&wc, &rec, 1.0, Exec::Sequential).unwrap();
        assert!(fresh.vocab_size() <= rec.size);
    }
}
