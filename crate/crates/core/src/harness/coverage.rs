use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Direction, LanguageId};

/// Languages that never appear on the source or target side of a direction
/// set, in the order they were listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub missing_source: Vec<LanguageId>,
    pub missing_target: Vec<LanguageId>,
}

impl CoverageReport {
    pub fn is_ok(&self) -> bool {
        self.missing_source.is_empty() && self.missing_target.is_empty()
    }
}

fn join(langs: &[LanguageId]) -> String {
    langs.iter().map(|l| l.code()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let mut parts = Vec::new();
        if !self.missing_source.is_empty() {
            parts.push(format!("{} never sources", join(&self.missing_source)));
        }
        if !self.missing_target.is_empty() {
            parts.push(format!("{} never target", join(&self.missing_target)));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Every language must be seen at least once by the encoder and once by
/// the decoder.
pub fn validate_direction_coverage(directions: &[Direction], languages: &[LanguageId]) -> CoverageReport {
    CoverageReport {
        missing_source: languages
            .iter()
            .copied()
            .filter(|&l| !directions.iter().any(|d| d.src == l))
            .collect(),
        missing_target: languages
            .iter()
            .copied()
            .filter(|&l| !directions.iter().any(|d| d.tgt == l))
            .collect(),
    }
}
