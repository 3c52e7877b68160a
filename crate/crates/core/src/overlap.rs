//! Subword vocabulary overlap between languages, raw or after transliteration
//! into a shared script.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::LanguageId;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::script::{transliterate, Script};
use crate::subword::{train_bpe, TrainConfig, WordCounts, DEFAULT_COVERAGE};
use crate::volt::{retrain, volt_search, VoltConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Raw,
    Translit(Script),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Raw => f.write_str("raw"),
            Condition::Translit(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Condition {
    type Err = Error;

    /// `raw`, or anything [`Script`] parses (`deva`, `kn`, `malayalam`, ...).
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("raw") {
            Ok(Condition::Raw)
        } else {
            s.parse().map(Condition::Translit)
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum VocabMode {
    Bpe { size: usize },
    /// BPE at `size`, then shrunk to the VOLT recommendation under `threshold`.
    Volt { size: usize, threshold: usize, step: usize },
}

/// Trains a BPE model on one language's corpus under `condition` and returns
/// its vocabulary without reserved symbols.
pub fn per_language_vocab<S: AsRef<str>>(
    lines: &[S],
    lang: LanguageId,
    mode: VocabMode,
    condition: Condition,
) -> Result<BTreeSet<String>> {
    let script = lang.native_script();
    let counts = WordCounts::from_lines(lines.iter().map(|l| match condition {
        Condition::Raw => l.as_ref().to_string(),
        Condition::Translit(t) => transliterate(l.as_ref(), script, t),
    }));
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let model = match mode {
        VocabMode::Bpe { size } => train_bpe(&counts, &TrainConfig::new(size))?,
        VocabMode::Volt { size, threshold, step } => {
            let full = train_bpe(&counts, &TrainConfig::new(size))?;
            let config = VoltConfig {
                threshold,
                step,
                exec: Exec::Sequential,
                ..VoltConfig::default()
            };
            let (rec, _) = volt_search(&counts, &full, &config)?;
            retrain(&counts, &rec, DEFAULT_COVERAGE, Exec::Sequential)?
        }
    };
    Ok(model.subword_tokens().iter().cloned().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub languages: Vec<LanguageId>,
    /// Full symmetric matrix of percentages, rounded to two decimals.
    pub values: Vec<Vec<f64>>,
    pub condition: Option<Condition>,
    pub vocab_sizes: Vec<usize>,
    pub denominator: String,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// 100·|A∩B| / min(|A|, |B|) for every pair.
pub fn overlap_percent(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let denom = a.len().min(b.len());
    if denom == 0 {
        return 0.0;
    }
    round2(100.0 * a.intersection(b).count() as f64 / denom as f64)
}

pub fn overlap_matrix(vocabs: &[(LanguageId, BTreeSet<String>)], condition: Option<Condition>) -> OverlapMatrix {
    let n = vocabs.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 100.0;
        for j in i + 1..n {
            let v = overlap_percent(&vocabs[i].1, &vocabs[j].1);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    OverlapMatrix {
        languages: vocabs.iter().map(|v| v.0).collect(),
        values,
        condition,
        vocab_sizes: vocabs.iter().map(|v| v.1.len()).collect(),
        denominator: "min".into(),
    }
}

/// Per-language vocabularies (trained in parallel) and their overlap.
pub fn overlap_study<S: AsRef<str> + Sync>(
    corpora: &[(LanguageId, Vec<S>)],
    mode: VocabMode,
    condition: Condition,
    exec: Exec,
) -> Result<OverlapMatrix> {
    let vocabs = exec
        .map(corpora, |(lang, lines)| per_language_vocab(lines, *lang, mode, condition).map(|v| (*lang, v)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(overlap_matrix(&vocabs, Some(condition)))
}

impl OverlapMatrix {
    pub fn get(&self, a: LanguageId, b: LanguageId) -> Option<f64> {
        let i = self.languages.iter().position(|&l| l == a)?;
        let j = self.languages.iter().position(|&l| l == b)?;
        Some(self.values[i][j])
    }

    /// Upper triangle with dashes below the diagonal, preceded by a metadata
    /// comment line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let cond = self.condition.map_or("-".to_string(), |c| c.to_string());
        let sizes: Vec<String> = self.vocab_sizes.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "# condition={cond}\tdenominator={}\tvocab_sizes={}",
            self.denominator,
            sizes.join(",")
        );
        for l in &self.languages {
            out.push('\t');
            out.push_str(l.code());
        }
        out.push('\n');
        for (i, l) in self.languages.iter().enumerate() {
            out.push_str(l.code());
            for j in 0..self.languages.len() {
                if j < i {
                    out.push_str("\t-");
                } else {
                    let _ = write!(out, "\t{:.2}", self.values[i][j]);
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn percent_examples() {
        assert_eq!(overlap_percent(&set(&["a", "b"]), &set(&["a", "b"])), 100.0);
        assert_eq!(overlap_percent(&set(&["a", "b"]), &set(&["c"])), 0.0);
        assert_eq!(overlap_percent(&set(&["a", "b", "c", "d"]), &set(&["c", "d", "e"])), 66.67);
    }

    #[test]
    fn tsv_layout() {
        let m = overlap_matrix(
            &[
                (LanguageId::Kn, set(&["a", "b", "c", "d"])),
                (LanguageId::Te, set(&["c", "d", "e"])),
            ],
            Some(Condition::Translit(Script::Devanagari)),
        );
        let tsv = m.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "# condition=deva\tdenominator=min\tvocab_sizes=4,3");
        assert_eq!(lines[1], "\tkn\tte");
        assert_eq!(lines[2], "kn\t100.00\t66.67");
        assert_eq!(lines[3], "te\t-\t100.00");
        assert_eq!(m.get(LanguageId::Te, LanguageId::Kn), Some(66.67));
    }

    #[test]
    fn identical_corpora_identical_vocab() {
        let lines = ["ಕನ್ನಡ ಭಾಷೆ", "ಕನ್ನಡ ನಾಡು"];
        let a = per_language_vocab(&lines, LanguageId::Kn, VocabMode::Bpe { size: 60 }, Condition::Raw).unwrap();
        let b = per_language_vocab(&lines, LanguageId::Kn, VocabMode::Bpe { size: 60 }, Condition::Raw).unwrap();
        assert_eq!(a, b);
        let empty: [&str; 0] = [];
        assert!(per_language_vocab(&empty, LanguageId::Kn, VocabMode::Bpe { size: 60 }, Condition::Raw).is_err());
    }

    #[test]
    fn transliteration_commutes_with_bpe_on_total_charset() {
        let lines = ["ಕಮಲ ನಗರ ವನ", "ಕಮಲ ಮರ ಕರ", "ನಗರ ಮನ ವರ ಕಮಲ"];
        let mode = VocabMode::Bpe { size: 80 };
        let raw = per_language_vocab(&lines, LanguageId::Kn, mode, Condition::Raw).unwrap();
        let deva = per_language_vocab(&lines, LanguageId::Kn, mode, Condition::Translit(Script::Devanagari)).unwrap();
        let mapped: BTreeSet<String> = raw.iter().map(|t| transliterate(t, Script::Kannada, Script::Devanagari)).collect();
        assert_eq!(mapped, deva);
    }

    #[test]
    fn conditions_parse() {
        assert_eq!("raw".parse::<Condition>().unwrap(), Condition::Raw);
        assert_eq!("kn".parse::<Condition>().unwrap(), Condition::Translit(Script::Kannada));
        assert_eq!("deva".parse::<Condition>().unwrap(), Condition::Translit(Script::Devanagari));
        assert!("xx".parse::<Condition>().is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_monotone(a in prop::collection::btree_set("[a-f]{1,2}", 1..12),
                                  b in prop::collection::btree_set("[a-f]{1,2}", 1..12)) {
            let ab = overlap_percent(&a, &b);
            prop_assert_eq!(ab, overlap_percent(&b, &a));
            prop_assert!((0.0..=100.0).contains(&ab));
            let (mut a2, mut b2) = (a.clone(), b.clone());
            a2.insert("zz".into());
            b2.insert("zz".into());
            prop_assert!(overlap_percent(&a2, &b2) >= ab);
        }
    }
}
