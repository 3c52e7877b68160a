//! A seeded family of four artificial languages written in the four
//! Dravidian scripts, with an exact cross-language lexicon.
//!
//! Every concept has a root made of consonant-vowel syllables. A fraction of
//! concepts share one root across the family; the rest get a distinct root
//! per language. Each language may append its own suffix syllable to every
//! word. Sentences are concept sequences in a shared word order, so a
//! word-by-word lexicon lookup is the exact translation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bleu::LanguageClassifier;
use crate::corpus::{enumerate_directions, write_lines, Direction, LanguageId};
use crate::error::{Error, Result};
use crate::script::{transliterate, Script, TransliterationMap};

/// Abstract syllable: consonant offset plus an optional vowel-sign offset
/// (none means the inherent vowel).
type Syllable = (u32, Option<u32>);
type Root = Vec<Syllable>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuffixMode {
    Identity,
    /// Each language appends its own fixed syllable to every word.
    Distinct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub seed: u64,
    pub lexicon_size: usize,
    pub shared_root_fraction: f64,
    pub suffix_mode: SuffixMode,
    pub sentence_len: (usize, usize),
    pub sentences_per_direction: usize,
    pub dev_size: usize,
    pub test_size: usize,
    pub mono_size: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        Self {
            seed: 7,
            lexicon_size: 200,
            shared_root_fraction: 0.8,
            suffix_mode: SuffixMode::Distinct,
            sentence_len: (3, 8),
            sentences_per_direction: 20_000,
            dev_size: 500,
            test_size: 500,
            mono_size: 20_000,
        }
    }
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.lexicon_size < 20 {
            return bad("lexicon_size must be at least 20");
        }
        if !(0.0..=1.0).contains(&self.shared_root_fraction) {
            return bad("shared_root_fraction must be in [0, 1]");
        }
        let (lo, hi) = self.sentence_len;
        if lo == 0 || lo > hi {
            return bad("sentence_len must satisfy 1 <= min <= max");
        }
        Ok(())
    }
}

/// Offsets mapped between every pair of the five scripts.
fn universal_offsets() -> Vec<u32> {
    (0..128)
        .filter(|&o| {
            Script::ALL
                .iter()
                .all(|&a| Script::ALL.iter().all(|&b| TransliterationMap::new(a, b).is_mapped(o)))
        })
        .collect()
}

fn alphabet() -> (Vec<u32>, Vec<u32>) {
    let all = universal_offsets();
    let consonants = all.iter().copied().filter(|o| (0x15..=0x39).contains(o)).collect();
    let signs = all.iter().copied().filter(|o| (0x3E..=0x4C).contains(o)).collect();
    (consonants, signs)
}

fn render(syllables: &[Syllable], script: Script) -> String {
    let ch = |o: u32| char::from_u32(script.base() + o).expect("block offsets are valid");
    let mut s = String::new();
    for &(c, v) in syllables {
        s.push(ch(c));
        if let Some(v) = v {
            s.push(ch(v));
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub id: usize,
    pub shared: bool,
    /// Surface form (root plus suffix) in each language's native script.
    pub forms: BTreeMap<LanguageId, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub concepts: Vec<Concept>,
    #[serde(skip)]
    index: HashMap<(LanguageId, String), usize>,
}

impl Lexicon {
    fn new(concepts: Vec<Concept>) -> Self {
        let mut lex = Self {
            concepts,
            index: HashMap::new(),
        };
        lex.reindex();
        lex
    }

    fn reindex(&mut self) {
        self.index = self
            .concepts
            .iter()
            .flat_map(|c| c.forms.iter().map(move |(&l, f)| ((l, f.clone()), c.id)))
            .collect();
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut lex: Lexicon = serde_json::from_str(text)?;
        lex.reindex();
        Ok(lex)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn concept_of(&self, lang: LanguageId, word: &str) -> Option<usize> {
        self.index.get(&(lang, word.to_string())).copied()
    }

    pub fn form(&self, concept: usize, lang: LanguageId) -> &str {
        &self.concepts[concept].forms[&lang]
    }

    pub fn render_sentence(&self, concepts: &[usize], lang: LanguageId) -> String {
        concepts.iter().map(|&c| self.form(c, lang)).collect::<Vec<_>>().join(" ")
    }
}

/// Word-by-word lexicon translation.
pub fn reference_translation(sentence: &str, direction: Direction, lexicon: &Lexicon) -> Result<String> {
    let words = sentence
        .split_whitespace()
        .map(|w| {
            lexicon
                .concept_of(direction.src, w)
                .map(|c| lexicon.form(c, direction.tgt))
                .ok_or_else(|| Error::UnknownRoot(w.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(words.join(" "))
}

/// Lines in every language for the same concept sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct NWaySet {
    pub lines: BTreeMap<LanguageId, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub spec: FamilySpec,
    pub lexicon: Lexicon,
    /// Monolingual text per language (its own concept sequences, rendered
    /// in that language).
    pub mono: BTreeMap<LanguageId, Vec<String>>,
    /// Training pairs for each of the 12 directions, drawn independently.
    pub parallel: BTreeMap<Direction, (Vec<String>, Vec<String>)>,
    pub dev: NWaySet,
    pub test: NWaySet,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn sample_sentences(rng: &mut ChaCha8Rng, n: usize, spec: &FamilySpec) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let len = rng.gen_range(spec.sentence_len.0..=spec.sentence_len.1);
            (0..len).map(|_| rng.gen_range(0..spec.lexicon_size)).collect()
        })
        .collect()
}

pub fn generate_family(spec: &FamilySpec) -> Result<Family> {
    spec.validate()?;
    let (consonants, signs) = alphabet();
    let mut rng = stream(spec.seed, 0);
    let mut used: HashSet<Root> = HashSet::new();
    let mut fresh_root = |rng: &mut ChaCha8Rng| loop {
        let n = rng.gen_range(2..=3);
        let root: Root = (0..n)
            .map(|_| {
                let c = *consonants.choose(rng).expect("non-empty alphabet");
                let v = if rng.gen_bool(0.3) { None } else { signs.choose(rng).copied() };
                (c, v)
            })
            .collect();
        if used.insert(root.clone()) {
            return root;
        }
    };

    // Suffix syllables: fixed and distinct per language.
    let suffixes: BTreeMap<LanguageId, Root> = LanguageId::ALL
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let suffix = match spec.suffix_mode {
                SuffixMode::Identity => Vec::new(),
                SuffixMode::Distinct => vec![(consonants[(3 * i + 1) % consonants.len()], Some(signs[i % signs.len()]))],
            };
            (l, suffix)
        })
        .collect();

    let n_shared = (spec.shared_root_fraction * spec.lexicon_size as f64).round() as usize;
    let mut shared_flags: Vec<bool> = (0..spec.lexicon_size).map(|i| i < n_shared).collect();
    shared_flags.shuffle(&mut rng);
    let concepts: Vec<Concept> = shared_flags
        .iter()
        .enumerate()
        .map(|(id, &shared)| {
            let common = shared.then(|| fresh_root(&mut rng));
            let forms = LanguageId::ALL
                .iter()
                .map(|&l| {
                    let mut root = common.clone().unwrap_or_else(|| fresh_root(&mut rng));
                    root.extend(&suffixes[&l]);
                    (l, render(&root, l.native_script()))
                })
                .collect();
            Concept { id, shared, forms }
        })
        .collect();
    let lexicon = Lexicon::new(concepts);

    let mut mono = BTreeMap::new();
    for (i, &l) in LanguageId::ALL.iter().enumerate() {
        let sents = sample_sentences(&mut stream(spec.seed, 100 + i as u64), spec.mono_size, spec);
        mono.insert(l, sents.iter().map(|s| lexicon.render_sentence(s, l)).collect());
    }
    let mut parallel = BTreeMap::new();
    for (i, d) in enumerate_directions(&LanguageId::ALL).into_iter().enumerate() {
        let sents = sample_sentences(&mut stream(spec.seed, 200 + i as u64), spec.sentences_per_direction, spec);
        let src = sents.iter().map(|s| lexicon.render_sentence(s, d.src)).collect();
        let tgt = sents.iter().map(|s| lexicon.render_sentence(s, d.tgt)).collect();
        parallel.insert(d, (src, tgt));
    }
    let nway = |id: u64, n: usize| {
        let sents = sample_sentences(&mut stream(spec.seed, id), n, spec);
        NWaySet {
            lines: LanguageId::ALL
                .iter()
                .map(|&l| (l, sents.iter().map(|s| lexicon.render_sentence(s, l)).collect()))
                .collect(),
        }
    };
    let (dev, test) = (nway(1, spec.dev_size), nway(2, spec.test_size));
    Ok(Family {
        spec: spec.clone(),
        lexicon,
        mono,
        parallel,
        dev,
        test,
    })
}

impl Family {
    /// Writes `mono/<l>.txt`, `train/<src>-<tgt>.<l>`, `dev.<l>`, `test.<l>`,
    /// `lexicon.json` and `spec.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mk = |p: &Path| std::fs::create_dir_all(p).map_err(|e| Error::io(p, e));
        mk(&dir.join("mono"))?;
        mk(&dir.join("train"))?;
        for (l, lines) in &self.mono {
            write_lines(&dir.join("mono").join(format!("{l}.txt")), lines)?;
        }
        for (d, (src, tgt)) in &self.parallel {
            write_lines(&dir.join("train").join(format!("{d}.{}", d.src)), src)?;
            write_lines(&dir.join("train").join(format!("{d}.{}", d.tgt)), tgt)?;
        }
        for (name, set) in [("dev", &self.dev), ("test", &self.test)] {
            for (l, lines) in &set.lines {
                write_lines(&dir.join(format!("{name}.{l}")), lines)?;
            }
        }
        let write = |name: &str, text: String| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        write("lexicon.json", self.lexicon.to_json()?)?;
        write("spec.json", serde_json::to_string_pretty(&self.spec)?)?;
        Ok(())
    }
}

/// Identifies a sentence's language by lexicon membership of its words,
/// regardless of the script they are written in. Words are compared after
/// transliteration into Devanagari; the language matching the most words
/// wins, and ties or no matches are unclassifiable.
#[derive(Clone, Debug)]
pub struct LexiconClassifier {
    words: HashMap<String, Vec<LanguageId>>,
}

fn to_pivot(word: &str) -> String {
    word.chars()
        .map(|c| match Script::of(c) {
            Some(s) => TransliterationMap::new(s, Script::Devanagari).map_char(c),
            None => c,
        })
        .collect()
}

impl LexiconClassifier {
    pub fn new(lexicon: &Lexicon) -> Self {
        let mut words: HashMap<String, Vec<LanguageId>> = HashMap::new();
        for c in &lexicon.concepts {
            for (&l, f) in &c.forms {
                let e = words.entry(to_pivot(f)).or_default();
                if !e.contains(&l) {
                    e.push(l);
                }
            }
        }
        Self { words }
    }
}

impl LanguageClassifier for LexiconClassifier {
    fn classify(&self, sentence: &str) -> Option<LanguageId> {
        let mut votes: BTreeMap<LanguageId, usize> = BTreeMap::new();
        for w in sentence.split_whitespace() {
            for &l in self.words.get(&to_pivot(w)).into_iter().flatten() {
                *votes.entry(l).or_default() += 1;
            }
        }
        let best = *votes.values().max()?;
        let mut winners = votes.iter().filter(|(_, &v)| v == best);
        match (winners.next(), winners.next()) {
            (Some((&l, _)), None) => Some(l),
            _ => None,
        }
    }
}

/// Transliterates every language's text of an n-way set into `script`.
pub fn to_shared_script(lines: &[String], lang: LanguageId, script: Script) -> Vec<String> {
    lines.iter().map(|l| transliterate(l, lang.native_script(), script)).collect()
}
