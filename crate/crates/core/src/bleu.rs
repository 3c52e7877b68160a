//! Case-insensitive corpus BLEU and off-target rate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::LanguageId;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::script::{detect_script, Detected};

pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    /// 0..=100
    pub score: f64,
    /// Smoothed n-gram precisions as fractions, n = 1..=4.
    pub precisions: [f64; MAX_ORDER],
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
    pub smoothing: String,
}

#[derive(Clone, Copy, Default)]
struct Stats {
    matches: [u64; MAX_ORDER],
    totals: [u64; MAX_ORDER],
    hyp_len: u64,
    ref_len: u64,
}

fn ngrams<'a>(tokens: &'a [String], n: usize) -> HashMap<&'a [String], u64> {
    let mut m = HashMap::new();
    for w in tokens.windows(n) {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

fn sentence_stats(hyp: &str, reference: &str) -> Stats {
    let h: Vec<String> = hyp.to_lowercase().split_whitespace().map(str::to_string).collect();
    let r: Vec<String> = reference.to_lowercase().split_whitespace().map(str::to_string).collect();
    let mut s = Stats {
        hyp_len: h.len() as u64,
        ref_len: r.len() as u64,
        ..Stats::default()
    };
    for n in 1..=MAX_ORDER {
        let rc = ngrams(&r, n);
        let hc = ngrams(&h, n);
        s.totals[n - 1] = h.len().saturating_sub(n - 1) as u64;
        s.matches[n - 1] = hc.iter().map(|(g, &c)| c.min(rc.get(g).copied().unwrap_or(0))).sum();
    }
    s
}

pub fn corpus_bleu<H: AsRef<str> + Sync, R: AsRef<str> + Sync>(hyps: &[H], refs: &[R]) -> Result<BleuReport> {
    corpus_bleu_with(hyps, refs, Exec::default())
}

/// Clipped n-gram matches are pooled over the corpus before precisions are
/// taken. A zero match count at order n gets precision 1/(2^k·total_n),
/// where k counts the zero orders seen so far. A corpus with no matches at
/// all scores 0.
pub fn corpus_bleu_with<H: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hyps: &[H],
    refs: &[R],
    exec: Exec,
) -> Result<BleuReport> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let per = exec.map_indexed(hyps.len(), |i| sentence_stats(hyps[i].as_ref(), refs[i].as_ref()));
    let mut t = Stats::default();
    for s in per {
        for n in 0..MAX_ORDER {
            t.matches[n] += s.matches[n];
            t.totals[n] += s.totals[n];
        }
        t.hyp_len += s.hyp_len;
        t.ref_len += s.ref_len;
    }

    // Orders the hypotheses are too short to have are left out of the mean.
    let order = t.totals.iter().take_while(|&&n| n > 0).count();
    let mut precisions = [0.0; MAX_ORDER];
    let mut decay = 1.0;
    for n in 0..order {
        precisions[n] = if t.matches[n] > 0 {
            t.matches[n] as f64 / t.totals[n] as f64
        } else {
            decay *= 2.0;
            1.0 / (decay * t.totals[n] as f64)
        };
    }
    let brevity_penalty = if t.hyp_len == 0 {
        0.0
    } else {
        (1.0 - t.ref_len as f64 / t.hyp_len as f64).exp().min(1.0)
    };
    let score = if t.matches.iter().all(|&m| m == 0) {
        0.0
    } else {
        let log_mean = precisions[..order].iter().map(|p| p.ln()).sum::<f64>() / order as f64;
        100.0 * brevity_penalty * log_mean.exp()
    };
    Ok(BleuReport {
        score,
        precisions,
        matches: t.matches,
        totals: t.totals,
        brevity_penalty,
        hyp_len: t.hyp_len,
        ref_len: t.ref_len,
        smoothing: "exp".into(),
    })
}

/// Assigns a hypothesis to a language, or `None` when it cannot tell.
pub trait LanguageClassifier {
    fn classify(&self, sentence: &str) -> Option<LanguageId>;
}

/// Language by native script. Only meaningful for output that has not been
/// transliterated into a shared script.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScriptClassifier;

impl LanguageClassifier for ScriptClassifier {
    fn classify(&self, sentence: &str) -> Option<LanguageId> {
        match detect_script(sentence) {
            Ok(Detected::Script(s)) => LanguageId::from_native_script(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffTargetReport {
    pub total: usize,
    pub off_target: usize,
    pub unclassifiable: usize,
    /// off_target / (total − unclassifiable); 0 when nothing was classified.
    pub rate: f64,
}

pub fn off_target_rate<S: AsRef<str>>(
    hyps: &[S],
    expected: LanguageId,
    classifier: &dyn LanguageClassifier,
) -> Result<OffTargetReport> {
    if hyps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (mut off, mut unknown) = (0, 0);
    for h in hyps {
        match classifier.classify(h.as_ref()) {
            None => unknown += 1,
            Some(l) if l != expected => off += 1,
            Some(_) => {}
        }
    }
    let classified = hyps.len() - unknown;
    Ok(OffTargetReport {
        total: hyps.len(),
        off_target: off,
        unclassifiable: unknown,
        rate: if classified == 0 { 0.0 } else { off as f64 / classified as f64 },
    })
}
