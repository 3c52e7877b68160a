//! Shared BPE subword model: training, encoding, decoding, and a plain-text
//! model file.
//!
//! Words are split on whitespace and each word starts with the boundary
//! marker `▁` fused to its first character, so the base alphabet holds both
//! `c` and `▁c` for every retained character. Training greedily merges the
//! most frequent adjacent pair; equal counts are broken by the merged string
//! in lexicographic order, then by the pair itself.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::{LanguageId, END_TOKEN};
use crate::error::{Error, Result};
use crate::par::Exec;

pub const MARKER: char = '\u{2581}';
pub const PAD: &str = "<pad>";
pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const DEFAULT_COVERAGE: f64 = 0.9995;

const FORMAT_HEADER: &str = "#dravida-bpe v1";

/// Reserved symbols in id order: specials, `[END]`, source tags, target tags.
pub fn reserved_symbols() -> Vec<String> {
    let mut out: Vec<String> = [PAD, UNK, BOS, EOS, END_TOKEN].iter().map(|s| s.to_string()).collect();
    out.extend(LanguageId::ALL.iter().map(|l| l.src_tag()));
    out.extend(LanguageId::ALL.iter().map(|l| l.tgt_tag()));
    out
}

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const BOS_ID: u32 = 2;
pub const EOS_ID: u32 = 3;
pub const END_ID: u32 = 4;

/// Weighted word-type counts fed to [`train_bpe`].
#[derive(Clone, Debug, Default)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
}

impl WordCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_word(&mut self, word: &str, weight: u64) {
        if weight == 0 || word.is_empty() {
            return;
        }
        *self.counts.entry(word.to_string()).or_default() += weight;
    }

    /// Adds every whitespace-separated word of `line`.
    pub fn add_line(&mut self, line: &str, weight: u64) {
        for w in line.split_whitespace() {
            self.add_word(w, weight);
        }
    }

    pub fn add_tokens<S: AsRef<str>>(&mut self, tokens: &[S], weight: u64) {
        for t in tokens {
            self.add_word(t.as_ref(), weight);
        }
    }

    pub fn extend(&mut self, other: &WordCounts) {
        for (w, c) in &other.counts {
            *self.counts.entry(w.clone()).or_default() += c;
        }
    }

    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut wc = Self::new();
        for l in lines {
            wc.add_line(l.as_ref(), 1);
        }
        wc
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    /// Word types in a deterministic order.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub target_size: usize,
    pub character_coverage: f64,
    pub exec: Exec,
}

impl TrainConfig {
    pub fn new(target_size: usize) -> Self {
        Self {
            target_size,
            character_coverage: DEFAULT_COVERAGE,
            exec: Exec::default(),
        }
    }

    pub fn with_coverage(mut self, coverage: f64) -> Self {
        self.character_coverage = coverage;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubwordModel {
    reserved: usize,
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    ranks: HashMap<(u32, u32), (u32, u32)>,
    coverage: String,
}

/// One piece of a pre-tokenised word: either a reserved symbol kept whole
/// or text to be segmented.
pub(crate) enum Span<'a> {
    Reserved(&'a str),
    Text { text: &'a str, initial: bool },
}

pub(crate) fn split_reserved<'a>(word: &'a str, reserved: &[String]) -> Vec<Span<'a>> {
    if reserved.iter().any(|r| r == word) {
        return vec![Span::Reserved(word)];
    }
    let mut out = Vec::new();
    let mut rest = word;
    let mut initial = true;
    while !rest.is_empty() {
        let hit = reserved
            .iter()
            .filter_map(|r| rest.find(r.as_str()).map(|i| (i, r.len())))
            .min_by_key(|&(i, len)| (i, Reverse(len)));
        match hit {
            Some((i, len)) => {
                if i > 0 {
                    out.push(Span::Text {
                        text: &rest[..i],
                        initial,
                    });
                }
                out.push(Span::Reserved(&rest[i..i + len]));
                rest = &rest[i + len..];
                initial = false;
            }
            None => {
                out.push(Span::Text { text: rest, initial });
                break;
            }
        }
    }
    out
}

fn marked(c: char) -> String {
    let mut s = String::with_capacity(MARKER.len_utf8() + c.len_utf8());
    s.push(MARKER);
    s.push(c);
    s
}

/// Characters kept by the coverage rule: most frequent first until the
/// cumulative share reaches `coverage`.
fn covered_chars(words: &[(&str, u64)], coverage: f64) -> Vec<char> {
    let mut freq: BTreeMap<char, u64> = BTreeMap::new();
    for (w, c) in words {
        for ch in w.chars() {
            *freq.entry(ch).or_default() += c;
        }
    }
    let total: u64 = freq.values().sum();
    let mut by_freq: Vec<(char, u64)> = freq.into_iter().collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut kept = Vec::new();
    let mut acc = 0u64;
    for (ch, n) in by_freq {
        if !kept.is_empty() && acc as f64 >= coverage * total as f64 {
            break;
        }
        kept.push(ch);
        acc += n;
    }
    kept.sort_unstable();
    kept
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    merged: String,
    pair: (u32, u32),
    left: String,
    right: String,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.merged.cmp(&self.merged))
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Word {
    symbols: Vec<u32>,
    count: u64,
}

fn pairs_of(symbols: &[u32]) -> impl Iterator<Item = (u32, u32)> + '_ {
    symbols
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| a != UNK_ID && b != UNK_ID)
}

fn merge_in_place(symbols: &mut Vec<u32>, pair: (u32, u32), merged: u32) -> bool {
    let mut changed = false;
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == pair.0 && symbols[i + 1] == pair.1 {
            out.push(merged);
            i += 2;
            changed = true;
        } else {
            out.push(symbols[i]);
            i += 1;
        }
    }
    *symbols = out;
    changed
}

/// Trains a BPE model on `words`.
pub fn train_bpe(words: &WordCounts, config: &TrainConfig) -> Result<SubwordModel> {
    let coverage = config.character_coverage;
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidCoverage(coverage));
    }
    let reserved = reserved_symbols();
    let mut texts: BTreeMap<(&str, bool), u64> = BTreeMap::new();
    for (w, c) in words.sorted() {
        for span in split_reserved(w, &reserved) {
            if let Span::Text { text, initial } = span {
                *texts.entry((text, initial)).or_default() += c;
            }
        }
    }
    if texts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let flat: Vec<(&str, u64)> = texts.iter().map(|(&(t, _), &c)| (t, c)).collect();
    let chars = covered_chars(&flat, coverage);

    let mut vocab: Vec<String> = reserved.clone();
    vocab.extend(chars.iter().map(|c| c.to_string()));
    vocab.extend(chars.iter().map(|&c| marked(c)));
    let base = vocab.len();
    if config.target_size < base {
        return Err(Error::TargetTooSmall {
            target: config.target_size,
            base,
        });
    }
    let mut index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

    let mut corpus: Vec<Word> = texts
        .iter()
        .map(|(&(text, initial), &count)| Word {
            symbols: text
                .chars()
                .enumerate()
                .map(|(i, ch)| {
                    let key = if i == 0 && initial { marked(ch) } else { ch.to_string() };
                    index.get(&key).copied().unwrap_or(UNK_ID)
                })
                .collect(),
            count,
        })
        .collect();

    // Initial pair statistics, sharded over word chunks and summed in order.
    let chunks: Vec<&[Word]> = corpus.chunks(4096).collect();
    let partial = config.exec.map(&chunks, |chunk| {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for w in chunk.iter() {
            for p in pairs_of(&w.symbols) {
                *counts.entry(p).or_default() += w.count;
            }
        }
        counts
    });
    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    for counts in partial {
        for (p, c) in counts {
            *pair_counts.entry(p).or_default() += c;
        }
    }
    let mut locations: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
    for (i, w) in corpus.iter().enumerate() {
        for p in pairs_of(&w.symbols) {
            locations.entry(p).or_default().insert(i);
        }
    }

    let candidate = |pair: (u32, u32), count: u64, vocab: &[String]| {
        let (left, right) = (vocab[pair.0 as usize].clone(), vocab[pair.1 as usize].clone());
        Candidate {
            count,
            merged: format!("{left}{right}"),
            pair,
            left,
            right,
        }
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&p, &c)| candidate(p, c, &vocab))
        .collect();

    let mut merges = Vec::new();
    while vocab.len() < config.target_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            continue;
        }
        if top.count < 2 {
            break;
        }
        let merged_id = match index.get(&top.merged) {
            Some(&id) => id,
            None => {
                let id = vocab.len() as u32;
                vocab.push(top.merged.clone());
                index.insert(top.merged.clone(), id);
                id
            }
        };
        merges.push((top.left.clone(), top.right.clone()));

        let mut touched: HashSet<(u32, u32)> = HashSet::new();
        let mut affected: Vec<usize> = locations.remove(&top.pair).unwrap_or_default().into_iter().collect();
        affected.sort_unstable();
        for wi in affected {
            let word = &mut corpus[wi];
            if !word.symbols.windows(2).any(|w| (w[0], w[1]) == top.pair) {
                continue;
            }
            for p in pairs_of(&word.symbols) {
                if let Some(c) = pair_counts.get_mut(&p) {
                    *c -= word.count;
                }
                touched.insert(p);
            }
            merge_in_place(&mut word.symbols, top.pair, merged_id);
            for p in pairs_of(&word.symbols) {
                *pair_counts.entry(p).or_default() += word.count;
                locations.entry(p).or_default().insert(wi);
                touched.insert(p);
            }
        }
        let mut touched: Vec<(u32, u32)> = touched.into_iter().collect();
        touched.sort_unstable();
        for p in touched {
            let c = pair_counts.get(&p).copied().unwrap_or(0);
            if c == 0 {
                pair_counts.remove(&p);
            } else {
                heap.push(candidate(p, c, &vocab));
            }
        }
    }

    let mut model = SubwordModel {
        reserved: reserved.len(),
        vocab,
        index,
        merges,
        ranks: HashMap::new(),
        coverage: format!("{coverage}"),
    };
    model.rebuild_ranks()?;
    Ok(model)
}

impl SubwordModel {
    /// A model with no vocabulary; every operation on it fails with
    /// [`Error::UntrainedModel`].
    pub fn untrained() -> Self {
        Self::default()
    }

    pub fn is_trained(&self) -> bool {
        !self.vocab.is_empty()
    }

    fn ensure_trained(&self) -> Result<()> {
        if self.is_trained() {
            Ok(())
        } else {
            Err(Error::UntrainedModel)
        }
    }

    fn rebuild_ranks(&mut self) -> Result<()> {
        let mut ranks = HashMap::with_capacity(self.merges.len());
        for (rank, (l, r)) in self.merges.iter().enumerate() {
            let lookup = |t: &str| {
                self.index
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::ModelFormat(format!("merge references unknown token `{t}`")))
            };
            let (li, ri) = (lookup(l)?, lookup(r)?);
            let mi = lookup(&format!("{l}{r}"))?;
            ranks.entry((li, ri)).or_insert((rank as u32, mi));
        }
        self.ranks = ranks;
        Ok(())
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn reserved_count(&self) -> usize {
        self.reserved
    }

    pub fn tokens(&self) -> &[String] {
        &self.vocab
    }

    /// Vocabulary minus the reserved symbols.
    pub fn subword_tokens(&self) -> &[String] {
        &self.vocab[self.reserved.min(self.vocab.len())..]
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn base_size(&self) -> usize {
        self.reserved + 2 * self.covered_chars().count()
    }

    pub(crate) fn reserved_tokens(&self) -> &[String] {
        &self.vocab[..self.reserved.min(self.vocab.len())]
    }

    pub fn covered_chars(&self) -> impl Iterator<Item = char> + '_ {
        self.subword_tokens().iter().filter_map(|t| {
            let mut it = t.chars();
            match (it.next(), it.next()) {
                (Some(c), None) if c != MARKER => Some(c),
                _ => None,
            }
        })
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    pub fn is_reserved_id(&self, id: u32) -> bool {
        (id as usize) < self.reserved
    }

    pub fn is_reserved(&self, token: &str) -> bool {
        self.id(token).is_some_and(|id| self.is_reserved_id(id))
    }

    fn segment_text(&self, text: &str, initial: bool, out: &mut Vec<u32>) {
        let mut symbols: Vec<u32> = text
            .chars()
            .enumerate()
            .map(|(i, ch)| {
                let id = if i == 0 && initial {
                    self.index.get(&marked(ch))
                } else {
                    self.index.get(ch.encode_utf8(&mut [0u8; 4]) as &str)
                };
                id.copied().unwrap_or(UNK_ID)
            })
            .collect();
        loop {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0], w[1])).map(|&(rank, merged)| (rank, (w[0], w[1]), merged)))
                .min_by_key(|&(rank, _, _)| rank);
            match best {
                Some((_, pair, merged)) => {
                    merge_in_place(&mut symbols, pair, merged);
                }
                None => break,
            }
        }
        out.extend(symbols);
    }

    /// Segments a token sequence into subword ids. Reserved symbols pass
    /// through whole.
    pub fn encode_ids<S: AsRef<str>>(&self, words: &[S]) -> Result<Vec<u32>> {
        self.ensure_trained()?;
        let reserved = &self.vocab[..self.reserved];
        let mut out = Vec::with_capacity(words.len() * 2);
        for w in words {
            for span in split_reserved(w.as_ref(), reserved) {
                match span {
                    Span::Reserved(r) => out.push(self.index[r]),
                    Span::Text { text, initial } => self.segment_text(text, initial, &mut out),
                }
            }
        }
        Ok(out)
    }

    pub fn encode<S: AsRef<str>>(&self, words: &[S]) -> Result<Vec<String>> {
        Ok(self
            .encode_ids(words)?
            .into_iter()
            .map(|id| self.vocab[id as usize].clone())
            .collect())
    }

    /// Joins pieces back into a sentence, starting a new word at each
    /// marker and around reserved symbols.
    pub fn decode<S: AsRef<str>>(&self, pieces: &[S]) -> Result<String> {
        self.ensure_trained()?;
        let mut out = String::new();
        let mut after_reserved = false;
        for p in pieces {
            let p = p.as_ref();
            let reserved = p != UNK && self.is_reserved(p);
            if reserved {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix(MARKER) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(rest);
            } else {
                if after_reserved {
                    out.push(' ');
                }
                out.push_str(p);
            }
            after_reserved = reserved;
        }
        Ok(out)
    }

    pub fn decode_ids(&self, ids: &[u32]) -> Result<String> {
        self.ensure_trained()?;
        let pieces: Vec<&str> = ids.iter().map(|&i| self.token(i).unwrap_or(UNK)).collect();
        self.decode(&pieces)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "marker\t{MARKER}");
        let _ = writeln!(s, "coverage\t{}", self.coverage);
        let _ = writeln!(s, "reserved\t{}", self.reserved);
        for t in &self.vocab[..self.reserved] {
            let _ = writeln!(s, "{t}");
        }
        let _ = writeln!(s, "vocab\t{}", self.vocab.len());
        for (i, t) in self.vocab.iter().enumerate() {
            let _ = writeln!(s, "{t}\t{i}");
        }
        let _ = writeln!(s, "merges\t{}", self.merges.len());
        for (l, r) in &self.merges {
            let _ = writeln!(s, "{l}\t{r}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        fn bad(m: impl Into<String>) -> Error {
            Error::ModelFormat(m.into())
        }
        fn field<'a>(lines: &mut std::str::Lines<'a>, name: &str) -> Result<&'a str> {
            let line = lines.next().ok_or_else(|| bad("truncated"))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix('\t'))
                .ok_or_else(|| bad(format!("expected `{name}` line, got `{line}`")))
        }
        fn count(lines: &mut std::str::Lines<'_>, name: &str) -> Result<usize> {
            field(lines, name)?.parse().map_err(|_| bad(format!("bad `{name}` count")))
        }

        let mut lines = text.lines();
        if lines.next() != Some(FORMAT_HEADER) {
            return Err(bad("missing header"));
        }
        if field(&mut lines, "marker")? != MARKER.to_string() {
            return Err(bad("unsupported marker"));
        }
        let coverage = field(&mut lines, "coverage")?.to_string();
        let n_reserved = count(&mut lines, "reserved")?;
        let mut reserved = Vec::with_capacity(n_reserved);
        for _ in 0..n_reserved {
            reserved.push(lines.next().ok_or_else(|| bad("truncated reserved list"))?.to_string());
        }
        if reserved != reserved_symbols() {
            return Err(bad("reserved symbols differ from this build"));
        }
        let n_vocab = count(&mut lines, "vocab")?;
        let mut vocab = Vec::with_capacity(n_vocab);
        for i in 0..n_vocab {
            let line = lines.next().ok_or_else(|| bad("truncated vocab"))?;
            let (tok, id) = line.rsplit_once('\t').ok_or_else(|| bad("vocab line"))?;
            if id.parse::<usize>().ok() != Some(i) {
                return Err(bad("vocab ids must be dense and ordered"));
            }
            vocab.push(tok.to_string());
        }
        if vocab.get(..n_reserved) != Some(&reserved[..]) {
            return Err(bad("reserved symbols must occupy the lowest ids"));
        }
        let n_merges = count(&mut lines, "merges")?;
        let mut merges = Vec::with_capacity(n_merges);
        for _ in 0..n_merges {
            let line = lines.next().ok_or_else(|| bad("truncated merges"))?;
            let (l, r) = line.split_once('\t').ok_or_else(|| bad("merge line"))?;
            merges.push((l.to_string(), r.to_string()));
        }
        let index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        if index.len() != vocab.len() {
            return Err(bad("duplicate vocab entry"));
        }
        let mut model = SubwordModel {
            reserved: n_reserved,
            vocab,
            index,
            merges,
            ranks: HashMap::new(),
            coverage,
        };
        model.rebuild_ranks()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}
