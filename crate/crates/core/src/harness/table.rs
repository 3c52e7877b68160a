use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Direction, LanguageId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub bleu: f64,
    pub trained: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub off_target: Option<f64>,
}

/// BLEU by (source row, target column). The diagonal is always empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: String,
    pub languages: Vec<LanguageId>,
    pub cells: BTreeMap<Direction, Cell>,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, languages: Vec<LanguageId>) -> Self {
        Self {
            name: name.into(),
            languages,
            cells: BTreeMap::new(),
        }
    }

    /// Builds a table from row-major values; `None` leaves a cell empty and
    /// `trained` lists the directions to mark.
    pub fn from_rows(
        name: &str,
        languages: Vec<LanguageId>,
        rows: &[Vec<Option<f64>>],
        trained: &[Direction],
    ) -> Result<Self> {
        let mut t = Self::new(name, languages.clone());
        for (i, &src) in languages.iter().enumerate() {
            for (j, &tgt) in languages.iter().enumerate() {
                if let Some(bleu) = rows.get(i).and_then(|r| r.get(j)).copied().flatten() {
                    let d = Direction::new(src, tgt)?;
                    t.set(d, bleu, trained.contains(&d), None);
                }
            }
        }
        Ok(t)
    }

    pub fn set(&mut self, d: Direction, bleu: f64, trained: bool, off_target: Option<f64>) {
        self.cells.insert(d, Cell { bleu, trained, off_target });
    }

    pub fn get(&self, d: Direction) -> Option<&Cell> {
        self.cells.get(&d)
    }

    /// Mean over the sources translated into `target`.
    pub fn column_average(&self, target: LanguageId) -> Option<f64> {
        mean(self.cells.iter().filter(|(d, _)| d.tgt == target).map(|(_, c)| c.bleu))
    }

    pub fn trained_average(&self) -> Option<f64> {
        mean(self.cells.values().filter(|c| c.trained).map(|c| c.bleu))
    }

    pub fn zero_shot_average(&self) -> Option<f64> {
        mean(self.cells.values().filter(|c| !c.trained).map(|c| c.bleu))
    }

    pub fn zero_shot_off_target(&self) -> Option<f64> {
        mean(self.cells.values().filter(|c| !c.trained).filter_map(|c| c.off_target))
    }

    /// Trained cells carry a trailing `*`; the last row holds the column
    /// averages.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let trained: Vec<String> = self
            .cells
            .iter()
            .filter(|(_, c)| c.trained)
            .map(|(d, _)| d.to_string())
            .collect();
        let _ = writeln!(out, "# model={}\ttrained={}", self.name, trained.join(","));
        out.push_str("src\\tgt");
        for l in &self.languages {
            let _ = write!(out, "\t{l}");
        }
        out.push('\n');
        for &src in &self.languages {
            out.push_str(src.code());
            for &tgt in &self.languages {
                let cell = Direction::new(src, tgt).ok().and_then(|d| self.get(d));
                match cell {
                    Some(c) => {
                        let _ = write!(out, "\t{:.2}{}", c.bleu, if c.trained { "*" } else { "" });
                    }
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out.push_str("avg");
        for &l in &self.languages {
            match self.column_average(l) {
                Some(a) => {
                    let _ = write!(out, "\t{a:.2}");
                }
                None => out.push_str("\t-"),
            }
        }
        out.push('\n');
        out
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for x in xs {
        s += x;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

/// Per-target column averages of several models, one column per model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub languages: Vec<LanguageId>,
    pub models: Vec<String>,
    /// `averages[model][language]`
    pub averages: Vec<Vec<Option<f64>>>,
}

impl Summary {
    pub fn get(&self, model: &str, lang: LanguageId) -> Option<f64> {
        let m = self.models.iter().position(|n| n == model)?;
        let l = self.languages.iter().position(|&x| x == lang)?;
        self.averages[m][l]
    }

    /// Adds a column of externally reported averages.
    pub fn with_reference(mut self, name: &str, values: &BTreeMap<LanguageId, f64>) -> Self {
        self.models.push(name.to_string());
        self.averages.push(self.languages.iter().map(|l| values.get(l).copied()).collect());
        self
    }

    /// Languages as rows, models as columns, two decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("language");
        for m in &self.models {
            let _ = write!(out, "\t{m}");
        }
        out.push('\n');
        for (i, l) in self.languages.iter().enumerate() {
            out.push_str(l.code());
            for col in &self.averages {
                match col[i] {
                    Some(v) => {
                        let _ = write!(out, "\t{v:.2}");
                    }
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn summarize(tables: &[ResultTable]) -> Result<Summary> {
    let first = tables.first().ok_or(Error::EmptyInput)?;
    let mut langs = first.languages.clone();
    langs.sort();
    for t in &tables[1..] {
        let mut l = t.languages.clone();
        l.sort();
        if l != langs {
            return Err(Error::LanguageSetMismatch);
        }
    }
    let languages = first.languages.clone();
    Ok(Summary {
        models: tables.iter().map(|t| t.name.clone()).collect(),
        averages: tables
            .iter()
            .map(|t| languages.iter().map(|&l| t.column_average(l)).collect())
            .collect(),
        languages,
    })
}

/// The two external baselines reported alongside the models: the vanilla
/// zero-shot system and the English-pivot system.
pub fn reference_baselines() -> Vec<(&'static str, BTreeMap<LanguageId, f64>)> {
    use LanguageId::*;
    vec![
        ("baseline-vanilla", BTreeMap::from([(Kn, 0.50), (Ml, 0.60), (Te, 0.40), (Ta, 0.40)])),
        ("samanantar-pivot", BTreeMap::from([(Kn, 13.10), (Ml, 10.63), (Te, 10.00), (Ta, 10.30)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_directions;
    use LanguageId::*;

    fn table(name: &str) -> ResultTable {
        let rows = vec![
            vec![None, Some(7.2), Some(5.7), Some(5.4)],
            vec![Some(9.4), None, Some(7.0), Some(7.4)],
            vec![Some(10.6), Some(6.3), None, Some(7.7)],
            vec![Some(9.2), Some(5.4), Some(6.3), None],
        ];
        let trained = parse_directions("ml-te,ml-ta,te-kn,te-ta,ta-kn,kn-ml").unwrap();
        ResultTable::from_rows(name, LanguageId::ALL.to_vec(), &rows, &trained).unwrap()
    }

    #[test]
    fn averages_and_layout() {
        let t = table("6lang");
        assert!((t.column_average(Kn).unwrap() - 9.7333).abs() < 1e-4);
        assert_eq!(t.cells.len(), 12);
        assert_eq!(t.cells.values().filter(|c| c.trained).count(), 6);
        let tsv = t.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[1], "src\\tgt\tkn\tml\tte\tta");
        assert_eq!(lines[2], "kn\t-\t7.20*\t5.70\t5.40");
        assert!(lines[6].starts_with("avg\t9.73\t"));
    }

    #[test]
    fn summary_checks() {
        let s = summarize(&[table("a"), table("b")]).unwrap();
        assert_eq!(s.averages[0], s.averages[1]);
        assert_eq!(format!("{:.2}", s.get("a", Kn).unwrap()), "9.73");
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput)));
        let small = ResultTable::new("x", vec![Kn, Ml]);
        assert!(matches!(summarize(&[table("a"), small]), Err(Error::LanguageSetMismatch)));
        let with = s.with_reference("pivot", &reference_baselines()[1].1);
        assert!(with.to_tsv().lines().nth(1).unwrap().ends_with("\t13.10"));
    }
}
