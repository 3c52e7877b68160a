//! The five Indic scripts as 128-codepoint Unicode blocks, and offset-based
//! transliteration between them.
//!
//! The main blocks of Devanagari, Tamil, Telugu, Kannada and Malayalam are laid
//! out in parallel: the same offset from each block start holds the same
//! letter wherever the script has one. Transliteration is therefore a shift by
//! the difference of block starts, restricted to offsets where both scripts
//! assign the same character (see [`TransliterationMap`]).

mod table;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BLOCK_LEN: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Devanagari,
    Tamil,
    Telugu,
    Kannada,
    Malayalam,
}

impl Script {
    pub const ALL: [Script; 5] = [
        Script::Devanagari,
        Script::Tamil,
        Script::Telugu,
        Script::Kannada,
        Script::Malayalam,
    ];

    /// First codepoint of the script's main block.
    pub const fn base(self) -> u32 {
        match self {
            Script::Devanagari => 0x0900,
            Script::Tamil => 0x0B80,
            Script::Telugu => 0x0C00,
            Script::Kannada => 0x0C80,
            Script::Malayalam => 0x0D00,
        }
    }

    /// ISO 15924 code.
    pub const fn code(self) -> &'static str {
        match self {
            Script::Devanagari => "deva",
            Script::Tamil => "taml",
            Script::Telugu => "telu",
            Script::Kannada => "knda",
            Script::Malayalam => "mlym",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn labels(self) -> &'static [&'static str; 128] {
        match self {
            Script::Devanagari => &table::DEVANAGARI,
            Script::Tamil => &table::TAMIL,
            Script::Telugu => &table::TELUGU,
            Script::Kannada => &table::KANNADA,
            Script::Malayalam => &table::MALAYALAM,
        }
    }

    pub fn contains(self, c: char) -> bool {
        self.offset_of(c).is_some()
    }

    /// Offset of `c` inside this script's block, if it falls there.
    pub fn offset_of(self, c: char) -> Option<u32> {
        let cp = c as u32;
        cp.checked_sub(self.base()).filter(|&o| o < BLOCK_LEN)
    }

    /// Whether the Unicode snapshot assigns a character at `offset`.
    pub fn is_assigned(self, offset: u32) -> bool {
        offset < BLOCK_LEN && !self.labels()[offset as usize].is_empty()
    }

    /// Script-neutral identity of the character at `offset`, or `None` when
    /// the codepoint is unassigned.
    pub fn character_label(self, offset: u32) -> Option<&'static str> {
        let label = *self.labels().get(offset as usize)?;
        (!label.is_empty()).then_some(label)
    }

    /// The script whose main block contains `c`.
    pub fn of(c: char) -> Option<Script> {
        let cp = c as u32;
        if !(0x0900..0x0D80).contains(&cp) {
            return None;
        }
        Script::ALL.into_iter().find(|s| s.contains(c))
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Script {
    type Err = Error;

    /// Accepts ISO 15924 codes, English names, and the language codes whose
    /// native script it is (`hi`, `ta`, `te`, `kn`, `ml`).
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deva" | "devanagari" | "hi" => Ok(Script::Devanagari),
            "taml" | "tamil" | "ta" => Ok(Script::Tamil),
            "telu" | "telugu" | "te" => Ok(Script::Telugu),
            "knda" | "kannada" | "kn" => Ok(Script::Kannada),
            "mlym" | "malayalam" | "ml" => Ok(Script::Malayalam),
            _ => Err(Error::UnknownScript(s.to_string())),
        }
    }
}

/// Outcome of [`detect_script`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Detected {
    Script(Script),
    Mixed,
    NonIndic,
}

/// Identifies which of the five scripts a text is written in. Codepoints
/// outside the five blocks (Latin, digits, punctuation) do not vote.
pub fn detect_script(text: &str) -> Result<Detected> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut found: Option<Script> = None;
    for script in text.chars().filter_map(Script::of) {
        match found {
            None => found = Some(script),
            Some(s) if s != script => return Ok(Detected::Mixed),
            Some(_) => {}
        }
    }
    Ok(found.map_or(Detected::NonIndic, Detected::Script))
}

fn mapped_mask(src: Script, tgt: Script) -> u128 {
    static MASKS: OnceLock<[[u128; 5]; 5]> = OnceLock::new();
    let masks = MASKS.get_or_init(|| {
        let mut masks = [[0u128; 5]; 5];
        for a in Script::ALL {
            for b in Script::ALL {
                let (la, lb) = (a.labels(), b.labels());
                masks[a.index()][b.index()] = (0..BLOCK_LEN as usize)
                    .filter(|&o| !la[o].is_empty() && la[o] == lb[o])
                    .fold(0u128, |m, o| m | (1u128 << o));
            }
        }
        masks
    });
    masks[src.index()][tgt.index()]
}

/// Offset correspondence between two script blocks.
///
/// An offset is mapped when both scripts assign a character there and the
/// two characters have the same identity. Everything else, including
/// offsets the target leaves unassigned (e.g. Tamil's missing voiced
/// consonants), passes through untouched. The mapping is symmetric, so
/// `map(a, b)` followed by `map(b, a)` is the identity on mapped offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransliterationMap {
    src: Script,
    tgt: Script,
    mask: u128,
}

impl TransliterationMap {
    pub fn new(src: Script, tgt: Script) -> Self {
        Self {
            src,
            tgt,
            mask: mapped_mask(src, tgt),
        }
    }

    pub fn src(&self) -> Script {
        self.src
    }

    pub fn tgt(&self) -> Script {
        self.tgt
    }

    pub fn is_mapped(&self, offset: u32) -> bool {
        offset < BLOCK_LEN && self.mask & (1u128 << offset) != 0
    }

    pub fn mapped_offsets(&self) -> impl Iterator<Item = u32> + '_ {
        (0..BLOCK_LEN).filter(|&o| self.is_mapped(o))
    }

    pub fn map_char(&self, c: char) -> char {
        if self.src == self.tgt {
            return c;
        }
        match self.src.offset_of(c) {
            Some(o) if self.is_mapped(o) => {
                char::from_u32(self.tgt.base() + o).expect("block codepoints are scalar values")
            }
            _ => c,
        }
    }

    pub fn apply(&self, text: &str) -> String {
        if self.src == self.tgt {
            return text.to_string();
        }
        text.chars().map(|c| self.map_char(c)).collect()
    }
}

pub fn transliterate(text: &str, src: Script, tgt: Script) -> String {
    TransliterationMap::new(src, tgt).apply(text)
}
