use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::{LexiconError, PhonemeInventory};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexEntry {
    pub word: String,
    pub pronunciation: Vec<String>,
}

/// Pronunciation dictionary, one entry per pronunciation, in file order.
///
/// Parsing is permissive; [`validate_lexicon`] reports what is wrong.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexEntry>) -> Self {
        Self { entries }
    }

    /// `word<TAB>phoneme phoneme ...` per line.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let Some((word, pron)) = raw.split_once('\t') else {
                return Err(LexiconError::Malformed {
                    line: i + 1,
                    msg: "expected word<TAB>pronunciation".into(),
                });
            };
            let word = word.trim();
            if word.is_empty() {
                return Err(LexiconError::Malformed {
                    line: i + 1,
                    msg: "empty word".into(),
                });
            }
            entries.push(LexEntry {
                word: word.to_string(),
                pronunciation: pron.split_whitespace().map(str::to_string).collect(),
            });
        }
        Ok(Self { entries })
    }

    pub fn serialize(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\n", e.word, e.pronunciation.join(" ")))
            .collect()
    }

    pub fn push(&mut self, word: impl Into<String>, pronunciation: Vec<String>) {
        self.entries.push(LexEntry {
            word: word.into(),
            pronunciation,
        });
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct words in first-appearance order.
    pub fn words(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .map(|e| e.word.as_str())
            .filter(|w| seen.insert(*w))
            .collect()
    }

    pub fn pronunciations(&self, word: &str) -> Vec<&[String]> {
        self.entries
            .iter()
            .filter(|e| e.word == word)
            .map(|e| e.pronunciation.as_slice())
            .collect()
    }

    /// Word → pronunciations map, sorted by word.
    pub fn to_map(&self) -> BTreeMap<&str, Vec<&[String]>> {
        let mut map: BTreeMap<&str, Vec<&[String]>> = BTreeMap::new();
        for e in &self.entries {
            map.entry(&e.word).or_default().push(&e.pronunciation);
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconViolation {
    UnknownSymbol { word: String, symbol: String },
    EmptyPronunciation { word: String },
    Duplicate { word: String, pronunciation: Vec<String> },
}

impl fmt::Display for LexiconViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconViolation::UnknownSymbol { word, symbol } => {
                write!(f, "unknown-symbol\t{word}\t{symbol}")
            }
            LexiconViolation::EmptyPronunciation { word } => write!(f, "empty-pronunciation\t{word}"),
            LexiconViolation::Duplicate { word, pronunciation } => {
                write!(f, "duplicate\t{word}\t{}", pronunciation.join(" "))
            }
        }
    }
}

/// Out-of-inventory symbols (one violation per distinct symbol per entry),
/// empty pronunciations and repeated (word, pronunciation) pairs.
pub fn validate_lexicon(lex: &Lexicon, inv: &PhonemeInventory) -> Vec<LexiconViolation> {
    let mut report = Vec::new();
    let mut seen = HashSet::new();
    for e in &lex.entries {
        if e.pronunciation.is_empty() {
            report.push(LexiconViolation::EmptyPronunciation { word: e.word.clone() });
        }
        let mut reported = HashSet::new();
        for p in &e.pronunciation {
            if !inv.contains(p) && reported.insert(p) {
                report.push(LexiconViolation::UnknownSymbol {
                    word: e.word.clone(),
                    symbol: p.clone(),
                });
            }
        }
        if !seen.insert((&e.word, &e.pronunciation)) {
            report.push(LexiconViolation::Duplicate {
                word: e.word.clone(),
                pronunciation: e.pronunciation.clone(),
            });
        }
    }
    report
}
