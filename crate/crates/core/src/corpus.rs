//! Parallel corpus ingestion, sentence cleaning, tokenisation, and rendering
//! of direction-tagged training lines.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::script::{transliterate, Script};
use crate::subword::SubwordModel;

pub const END_TOKEN: &str = "[END]";

/// Fraction of removed tokens above which a sentence is rejected.
pub const MAX_FOREIGN_FRACTION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageId {
    Kn,
    Ml,
    Te,
    Ta,
}

impl LanguageId {
    pub const ALL: [LanguageId; 4] = [LanguageId::Kn, LanguageId::Ml, LanguageId::Te, LanguageId::Ta];

    pub const fn code(self) -> &'static str {
        match self {
            LanguageId::Kn => "kn",
            LanguageId::Ml => "ml",
            LanguageId::Te => "te",
            LanguageId::Ta => "ta",
        }
    }

    pub const fn native_script(self) -> Script {
        match self {
            LanguageId::Kn => Script::Kannada,
            LanguageId::Ml => Script::Malayalam,
            LanguageId::Te => Script::Telugu,
            LanguageId::Ta => Script::Tamil,
        }
    }

    pub fn from_native_script(script: Script) -> Option<LanguageId> {
        LanguageId::ALL.into_iter().find(|l| l.native_script() == script)
    }

    pub fn src_tag(self) -> String {
        format!("__src__{}__", self.code())
    }

    pub fn tgt_tag(self) -> String {
        format!("__tgt__{}__", self.code())
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LanguageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LanguageId::ALL
            .into_iter()
            .find(|l| l.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownLanguage(s.to_string()))
    }
}

/// Parses a comma-separated language list such as `kn,ml,te,ta`.
pub fn parse_languages(s: &str) -> Result<Vec<LanguageId>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub src: LanguageId,
    pub tgt: LanguageId,
}

impl Direction {
    pub fn new(src: LanguageId, tgt: LanguageId) -> Result<Self> {
        if src == tgt {
            return Err(Error::InvalidDirection(format!("{src}-{tgt}")));
        }
        Ok(Self { src, tgt })
    }

    pub fn reversed(self) -> Self {
        Self {
            src: self.tgt,
            tgt: self.src,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['-', '>'])
            .ok_or_else(|| Error::InvalidDirection(s.to_string()))?;
        let b = b.trim_start_matches('>');
        Direction::new(a.parse()?, b.parse()?)
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `kn-ml,ml-te,...`.
pub fn parse_directions(s: &str) -> Result<Vec<Direction>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse()).collect()
}

/// All ordered pairs of distinct languages, source-major in input order.
pub fn enumerate_directions(langs: &[LanguageId]) -> Vec<Direction> {
    let mut out = Vec::with_capacity(langs.len() * langs.len().saturating_sub(1));
    for &src in langs {
        for &tgt in langs {
            if src != tgt && !out.contains(&Direction { src, tgt }) {
                out.push(Direction { src, tgt });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cleaned {
    Kept(String),
    Rejected,
}

impl Cleaned {
    pub fn kept(self) -> Option<String> {
        match self {
            Cleaned::Kept(s) => Some(s),
            Cleaned::Rejected => None,
        }
    }
}

fn is_danda(c: char) -> bool {
    matches!(c, '\u{0964}' | '\u{0965}')
}

/// A character outside the expected script that carries letters: an Indic
/// letter or sign from another block, or any alphabetic codepoint outside the
/// Indic blocks (Latin words are foreign). Digits, punctuation and dandas are
/// neutral.
fn is_foreign_char(c: char, expected: Script) -> bool {
    if expected.contains(c) || is_danda(c) || c.is_ascii_digit() {
        return false;
    }
    match Script::of(c) {
        Some(other) => {
            let offset = other.offset_of(c).unwrap_or(0);
            !(0x66..=0x6F).contains(&offset)
        }
        None => c.is_alphabetic(),
    }
}

/// Drops tokens containing letters from a script other than `expected`'s
/// native script. Rejects the sentence when nothing is left or more than half
/// of the tokens went.
pub fn clean_sentence(raw: &str, expected: LanguageId) -> Cleaned {
    let script = expected.native_script();
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    if tokens.is_empty() {
        return Cleaned::Rejected;
    }
    let kept: Vec<&str> = tokens
        .iter()
        .copied()
        .filter(|t| !t.chars().any(|c| is_foreign_char(c, script)))
        .collect();
    let removed = tokens.len() - kept.len();
    if kept.is_empty() || removed as f64 > MAX_FOREIGN_FRACTION * tokens.len() as f64 {
        return Cleaned::Rejected;
    }
    Cleaned::Kept(kept.join(" "))
}

fn is_terminal_punct(c: char) -> bool {
    matches!(c, '.' | '?' | '!') || is_danda(c)
}

fn is_combining_sign(c: char) -> bool {
    match Script::of(c) {
        Some(s) => {
            let label = s.character_label(s.offset_of(c).unwrap_or(0)).unwrap_or("");
            label.starts_with("VOWEL SIGN") || label.starts_with("SIGN") || label.starts_with("AU LENGTH")
        }
        None => matches!(c, '\u{200C}' | '\u{200D}'),
    }
}

/// One letter followed by a period, e.g. an initial: `ಎ.` or `A.`.
fn is_nonbreaking_prefix(token: &str) -> bool {
    let Some(stem) = token.strip_suffix('.') else {
        return false;
    };
    let mut chars = stem.chars();
    match chars.next() {
        Some(first) if first.is_alphabetic() && !is_combining_sign(first) => chars.all(is_combining_sign),
        _ => false,
    }
}

/// Whitespace tokenisation that splits trailing sentence punctuation into
/// separate tokens, except after single-letter abbreviations.
pub fn tokenize(sentence: &str) -> Result<Vec<String>> {
    if sentence.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::new();
    for word in sentence.split_whitespace() {
        if is_nonbreaking_prefix(word) {
            out.push(word.to_string());
            continue;
        }
        let stem = word.trim_end_matches(is_terminal_punct);
        if !stem.is_empty() {
            out.push(stem.to_string());
        }
        out.extend(word[stem.len()..].chars().map(String::from));
    }
    Ok(out)
}

/// A rendered training line: `__src__x1__ __tgt__x2__ <body> [END]` on the
/// source side, `<body> [END]` on the target side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedLine {
    pub tags: Option<Direction>,
    pub body: Vec<String>,
}

impl TaggedLine {
    pub fn source(direction: Direction, body: Vec<String>) -> Self {
        Self {
            tags: Some(direction),
            body,
        }
    }

    pub fn target(body: Vec<String>) -> Self {
        Self { tags: None, body }
    }

    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.body.len() + 3);
        if let Some(d) = self.tags {
            out.push(d.src.src_tag());
            out.push(d.tgt.tgt_tag());
        }
        out.extend(self.body.iter().cloned());
        out.push(END_TOKEN.to_string());
        out
    }

    pub fn render(&self) -> String {
        self.tokens().join(" ")
    }
}

impl fmt::Display for TaggedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Transliterates a sentence from `lang`'s native script and tokenises it.
pub fn normalize_sentence(sentence: &str, lang: LanguageId, target: Script) -> Result<Vec<String>> {
    tokenize(&transliterate(sentence, lang.native_script(), target))
}

/// Produces the rendered source and target training lines for one pair.
pub fn prepare_pair(
    pair: (&str, &str),
    direction: Direction,
    translit_target: Script,
    subword: &SubwordModel,
) -> Result<(String, String)> {
    let src = subword.encode(&normalize_sentence(pair.0, direction.src, translit_target)?)?;
    let tgt = subword.encode(&normalize_sentence(pair.1, direction.tgt, translit_target)?)?;
    Ok((
        TaggedLine::source(direction, src).render(),
        TaggedLine::target(tgt).render(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    /// 1-based line number in both input files.
    pub line: usize,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub src_path: PathBuf,
    pub tgt_path: PathBuf,
    pub lines: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    pub direction: Direction,
    pub pairs: Vec<SentencePair>,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub read: usize,
    pub kept: usize,
    pub rejected_src: usize,
    pub rejected_tgt: usize,
    pub empty: bool,
}

/// Reads a UTF-8 file as lines, rejecting invalid encodings with the
/// offending line number.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut lines = Vec::new();
    let mut chunks: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    if chunks.last().is_some_and(|c| c.is_empty()) {
        chunks.pop();
    }
    for (i, chunk) in chunks.into_iter().enumerate() {
        let chunk = chunk.strip_suffix(b"\r").unwrap_or(chunk);
        let line = std::str::from_utf8(chunk).map_err(|_| Error::Encoding {
            path: path.to_path_buf(),
            line: i + 1,
        })?;
        lines.push(line.to_string());
    }
    Ok(lines)
}

pub fn write_lines<S: AsRef<str>>(path: &Path, lines: &[S]) -> Result<()> {
    let mut buf = String::with_capacity(lines.iter().map(|l| l.as_ref().len() + 1).sum());
    for l in lines {
        buf.push_str(l.as_ref());
        buf.push('\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Line-aligned ingestion with per-pair cleaning. Cleaning runs through
/// `exec`; output order always equals input order.
pub fn ingest_parallel(
    src_file: &Path,
    tgt_file: &Path,
    direction: Direction,
    exec: Exec,
) -> Result<(ParallelCorpus, IngestReport)> {
    let src = read_lines(src_file)?;
    let tgt = read_lines(tgt_file)?;
    if src.len() != tgt.len() {
        return Err(Error::LineCountMismatch {
            src_lines: src.len(),
            tgt_lines: tgt.len(),
        });
    }
    let (corpus, report) = clean_pairs(&src, &tgt, direction, exec);
    Ok((
        ParallelCorpus {
            direction,
            pairs: corpus,
            provenance: Provenance {
                src_path: src_file.to_path_buf(),
                tgt_path: tgt_file.to_path_buf(),
                lines: src.len(),
            },
        },
        report,
    ))
}

/// Cleans aligned sentence lists; shared by file ingestion and in-memory
/// pipelines.
pub fn clean_pairs(
    src: &[String],
    tgt: &[String],
    direction: Direction,
    exec: Exec,
) -> (Vec<SentencePair>, IngestReport) {
    let cleaned = exec.map_indexed(src.len(), |i| {
        (
            clean_sentence(&src[i], direction.src),
            clean_sentence(&tgt[i], direction.tgt),
        )
    });
    let mut report = IngestReport {
        read: src.len(),
        ..Default::default()
    };
    let mut pairs = Vec::with_capacity(src.len());
    for (i, (s, t)) in cleaned.into_iter().enumerate() {
        report.rejected_src += usize::from(s == Cleaned::Rejected);
        report.rejected_tgt += usize::from(t == Cleaned::Rejected);
        if let (Cleaned::Kept(src), Cleaned::Kept(tgt)) = (s, t) {
            pairs.push(SentencePair { line: i + 1, src, tgt });
        }
    }
    report.kept = pairs.len();
    report.empty = pairs.is_empty();
    (pairs, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_arithmetic() {
        let all = enumerate_directions(&LanguageId::ALL);
        assert_eq!(all.len(), 12);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 12);
        assert_eq!(enumerate_directions(&LanguageId::ALL[..3]).len(), 6);
        assert!(Direction::new(LanguageId::Kn, LanguageId::Kn).is_err());
        assert_eq!("kn-ml".parse::<Direction>().unwrap().to_string(), "kn-ml");
        assert_eq!("te->ta".parse::<Direction>().unwrap().to_string(), "te-ta");
        assert!("kn-kn".parse::<Direction>().is_err());
        assert!("kn-hi".parse::<Direction>().is_err());
    }

    #[test]
    fn cleaning_examples() {
        assert_eq!(
            clean_sentence("ಕನ್ನಡ hello ಪದ", LanguageId::Kn),
            Cleaned::Kept("ಕನ್ನಡ ಪದ".into())
        );
        assert_eq!(clean_sentence("", LanguageId::Kn), Cleaned::Rejected);
        assert_eq!(
            clean_sentence("ಕನ್ನಡ 2021.", LanguageId::Kn),
            Cleaned::Kept("ಕನ್ನಡ 2021.".into())
        );
        // two of three tokens foreign
        assert_eq!(clean_sentence("ಕನ್ನಡ hello world", LanguageId::Kn), Cleaned::Rejected);
        // exactly half removed is still kept
        assert_eq!(
            clean_sentence("ಕನ್ನಡ ಪದ hello world", LanguageId::Kn),
            Cleaned::Kept("ಕನ್ನಡ ಪದ".into())
        );
        // a Devanagari word in a Tamil sentence
        assert_eq!(
            clean_sentence("தமிழ் हिंदी மொழி", LanguageId::Ta),
            Cleaned::Kept("தமிழ் மொழி".into())
        );
        // dandas are neutral punctuation
        assert_eq!(clean_sentence("ಪದ ।", LanguageId::Kn), Cleaned::Kept("ಪದ ।".into()));
        assert_eq!(clean_sentence("   \t ", LanguageId::Kn), Cleaned::Rejected);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("ನಮಸ್ಕಾರ.").unwrap(), vec!["ನಮಸ್ಕಾರ", "."]);
        assert_eq!(tokenize("क। ख").unwrap(), vec!["क", "।", "ख"]);
        assert_eq!(tokenize("ಎ. ಪದ").unwrap(), vec!["ಎ.", "ಪದ"]);
        assert_eq!(tokenize("ಕೆ. ಪದ").unwrap(), vec!["ಕೆ.", "ಪದ"]);
        assert_eq!(tokenize("A. Kumar went home.").unwrap(), vec!["A.", "Kumar", "went", "home", "."]);
        assert_eq!(tokenize("ಏನು?!").unwrap(), vec!["ಏನು", "?", "!"]);
        assert_eq!(tokenize("3.14 ಮತ್ತು 2021.").unwrap(), vec!["3.14", "ಮತ್ತು", "2021", "."]);
        assert_eq!(tokenize("ಪದ ॥").unwrap(), vec!["ಪದ", "॥"]);
        assert!(matches!(tokenize("  "), Err(Error::EmptyInput)));
    }

    #[test]
    fn tagged_line_rendering() {
        let d: Direction = "kn-ml".parse().unwrap();
        let line = TaggedLine::source(d, vec!["▁ಪದ".into()]).render();
        assert_eq!(line, "__src__kn__ __tgt__ml__ ▁ಪದ [END]");
        assert_eq!(TaggedLine::target(vec!["▁x".into()]).render(), "▁x [END]");
    }

    #[test]
    fn ingest_reports_rejections_and_alignment() {
        let dir = tempfile::tempdir().unwrap();
        let (sp, tp) = (dir.path().join("a.kn"), dir.path().join("a.ml"));
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        for i in 0..100 {
            src.push(if [5, 40, 77].contains(&i) { "english only".to_string() } else { format!("ಪದ {i}") });
            tgt.push(format!("പദം {i}"));
        }
        write_lines(&sp, &src).unwrap();
        write_lines(&tp, &tgt).unwrap();
        let d = "kn-ml".parse().unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let (corpus, report) = ingest_parallel(&sp, &tp, d, exec).unwrap();
            assert_eq!(report.read, 100);
            assert_eq!(report.kept, 97);
            assert_eq!(report.rejected_src, 3);
            assert_eq!(report.rejected_tgt, 0);
            assert_eq!(corpus.pairs.len(), 97);
            for p in &corpus.pairs {
                assert_eq!(p.src, format!("ಪದ {}", p.line - 1));
                assert_eq!(p.tgt, format!("പദം {}", p.line - 1));
            }
        }
    }

    #[test]
    fn ingest_errors_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        write_lines(&a, &vec!["ಪದ"; 10]).unwrap();
        write_lines(&b, &vec!["പദം"; 11]).unwrap();
        let d = "kn-ml".parse().unwrap();
        assert!(matches!(
            ingest_parallel(&a, &b, d, Exec::Sequential),
            Err(Error::LineCountMismatch { src_lines: 10, tgt_lines: 11 })
        ));
        std::fs::write(&a, "").unwrap();
        std::fs::write(&b, "").unwrap();
        let (c, r) = ingest_parallel(&a, &b, d, Exec::Sequential).unwrap();
        assert!(c.pairs.is_empty());
        assert!(r.empty);
        std::fs::write(&a, b"ok\n\xff\xfe\n").unwrap();
        std::fs::write(&b, "x\ny\n").unwrap();
        assert!(matches!(
            ingest_parallel(&a, &b, d, Exec::Sequential),
            Err(Error::Encoding { line: 2, .. })
        ));
        assert!(matches!(
            ingest_parallel(&dir.path().join("missing"), &b, d, Exec::Sequential),
            Err(Error::Io { .. })
        ));
    }
}
