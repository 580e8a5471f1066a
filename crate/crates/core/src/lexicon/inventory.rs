use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::LexiconError;

/// Comment line that marks a serialized inventory as already expanded.
const EXPANDED_MARKER: &str = "# tone-expanded";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhoneClass {
    Vowel,
    Semivowel,
    Diphthong,
    Plosive,
    Nasal,
    Fricative,
    ConsonantOther,
}

impl PhoneClass {
    pub const ALL: [PhoneClass; 7] = [
        PhoneClass::Vowel,
        PhoneClass::Semivowel,
        PhoneClass::Diphthong,
        PhoneClass::Plosive,
        PhoneClass::Nasal,
        PhoneClass::Fricative,
        PhoneClass::ConsonantOther,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PhoneClass::Vowel => "vowel",
            PhoneClass::Semivowel => "semivowel",
            PhoneClass::Diphthong => "diphthong",
            PhoneClass::Plosive => "plosive",
            PhoneClass::Nasal => "nasal",
            PhoneClass::Fricative => "fricative",
            PhoneClass::ConsonantOther => "consonant-other",
        }
    }
}

impl fmt::Display for PhoneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhoneClass {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PhoneClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| LexiconError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhonemeUnit {
    pub symbol: String,
    pub class: PhoneClass,
    pub tonal_eligible: bool,
}

/// Ordered, duplicate-free tone labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToneSet {
    tones: Vec<String>,
}

impl ToneSet {
    pub fn new<I, S>(tones: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tones: Vec<String> = tones.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for t in &tones {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(LexiconError::InvalidSymbol(t.clone()));
            }
            if !seen.insert(t.as_str()) {
                return Err(LexiconError::DuplicateTone(t.clone()));
            }
        }
        Ok(Self { tones })
    }

    /// Mid, low, falling, high, rising.
    pub fn thai() -> Self {
        Self::new(["mid", "low", "falling", "high", "rising"]).expect("static tone set")
    }

    /// The Thai set for `n == 5`, otherwise `t1..tn`.
    pub fn with_count(n: usize) -> Self {
        if n == 5 {
            Self::thai()
        } else {
            Self::new((1..=n).map(|i| format!("t{i}"))).expect("generated labels are unique")
        }
    }

    pub fn len(&self) -> usize {
        self.tones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tones.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tones.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeInventory {
    language: String,
    units: Vec<PhonemeUnit>,
    expanded: bool,
}

impl PhonemeInventory {
    pub fn new(language: impl Into<String>, units: Vec<PhonemeUnit>) -> Result<Self, LexiconError> {
        if units.is_empty() {
            return Err(LexiconError::EmptyInventory);
        }
        let mut seen = HashSet::new();
        for u in &units {
            if u.symbol.is_empty() || u.symbol.chars().any(char::is_whitespace) {
                return Err(LexiconError::InvalidSymbol(u.symbol.clone()));
            }
            if !seen.insert(u.symbol.as_str()) {
                return Err(LexiconError::DuplicateSymbol(u.symbol.clone()));
            }
        }
        Ok(Self {
            language: language.into(),
            units,
            expanded: false,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn set_language(&mut self, language: impl Into<String>) {
        self.language = language.into();
    }

    pub fn units(&self) -> &[PhonemeUnit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn is_expanded(&self) -> bool {
        self.expanded
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index_of(symbol).is_some()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.units.iter().position(|u| u.symbol == symbol)
    }

    pub fn tonal_count(&self) -> usize {
        self.units.iter().filter(|u| u.tonal_eligible).count()
    }

    /// TSV form accepted by [`load_inventory`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if self.expanded {
            out.push_str(EXPANDED_MARKER);
            out.push('\n');
        }
        for u in &self.units {
            out.push_str(&format!("{}\t{}\ttonal:{}\n", u.symbol, u.class, u8::from(u.tonal_eligible)));
        }
        out
    }
}

/// Parses `symbol<TAB>class<TAB>tonal:{0,1}` lines; `#` starts a comment.
pub fn load_inventory(language: &str, config_text: &str) -> Result<PhonemeInventory, LexiconError> {
    let mut units = Vec::new();
    let mut expanded = false;
    for (i, raw) in config_text.lines().enumerate() {
        if raw.trim() == EXPANDED_MARKER {
            expanded = true;
            continue;
        }
        let line = raw.split('#').next().unwrap_or("").trim_end();
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |msg: &str| LexiconError::Malformed {
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [symbol, class, tonal] = fields[..] else {
            return Err(malformed("expected symbol<TAB>class<TAB>tonal:{0,1}"));
        };
        let tonal_eligible = match tonal {
            "tonal:0" => false,
            "tonal:1" => true,
            _ => return Err(malformed("tonal flag must be tonal:0 or tonal:1")),
        };
        units.push(PhonemeUnit {
            symbol: symbol.to_string(),
            class: class.parse()?,
            tonal_eligible,
        });
    }
    let mut inv = PhonemeInventory::new(language, units)?;
    inv.expanded = expanded;
    Ok(inv)
}

/// Replaces every tonal-eligible unit `u` by `u_<tone>` for each tone.
pub fn expand_tonal(inv: &PhonemeInventory, tones: &ToneSet) -> Result<PhonemeInventory, LexiconError> {
    if inv.expanded {
        return Err(LexiconError::AlreadyExpanded);
    }
    let mut units = Vec::with_capacity(inv.len() + inv.tonal_count() * tones.len());
    for u in &inv.units {
        if u.tonal_eligible {
            for t in tones.iter() {
                units.push(PhonemeUnit {
                    symbol: format!("{}_{}", u.symbol, t),
                    class: u.class,
                    tonal_eligible: false,
                });
            }
        } else {
            units.push(u.clone());
        }
    }
    let mut out = PhonemeInventory::new(inv.language.clone(), units)?;
    out.expanded = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(s: &str, tonal: bool) -> PhonemeUnit {
        PhonemeUnit {
            symbol: s.into(),
            class: if tonal { PhoneClass::Vowel } else { PhoneClass::Plosive },
            tonal_eligible: tonal,
        }
    }

    #[test]
    fn parse_and_serialize() {
        let inv = load_inventory("xx", "# test\na\tvowel\ttonal:1\np\tplosive\ttonal:0\n").unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(load_inventory("xx", &inv.serialize()).unwrap(), inv);
    }

    #[test]
    fn load_errors() {
        assert_eq!(load_inventory("xx", ""), Err(LexiconError::EmptyInventory));
        assert_eq!(load_inventory("xx", "# only comments\n\n"), Err(LexiconError::EmptyInventory));
        assert_eq!(
            load_inventory("xx", "a\tvowel\ttonal:0\na\tvowel\ttonal:1"),
            Err(LexiconError::DuplicateSymbol("a".into()))
        );
        assert!(load_inventory("xx", "a\tvowel\ttonal:0\na\tvowel\ttonal:1")
            .unwrap_err()
            .to_string()
            .contains("\"a\""));
        assert_eq!(
            load_inventory("xx", "a\tclick\ttonal:0"),
            Err(LexiconError::UnknownClass("click".into()))
        );
        assert!(matches!(load_inventory("xx", "a vowel"), Err(LexiconError::Malformed { line: 1, .. })));
        assert!(matches!(load_inventory("xx", "a\tvowel\tyes"), Err(LexiconError::Malformed { .. })));
    }

    #[test]
    fn expansion_count() {
        let inv = PhonemeInventory::new(
            "xx",
            vec![unit("p", false), unit("t", false), unit("a", true), unit("i", true), unit("u", true)],
        )
        .unwrap();
        let out = expand_tonal(&inv, &ToneSet::thai()).unwrap();
        assert_eq!(out.len(), 17);
        assert!(out.contains("a_falling"));
        assert!(out.units().iter().all(|u| !u.tonal_eligible));
        assert_eq!(expand_tonal(&out, &ToneSet::thai()), Err(LexiconError::AlreadyExpanded));
    }

    #[test]
    fn no_tonal_units_is_identity() {
        let inv = PhonemeInventory::new("xx", vec![unit("p", false), unit("t", false)]).unwrap();
        let out = expand_tonal(&inv, &ToneSet::thai()).unwrap();
        assert_eq!(out.units(), inv.units());
        assert!(out.is_expanded() && !inv.is_expanded());
    }

    #[test]
    fn tone_sets() {
        assert_eq!(ToneSet::thai().len(), 5);
        assert_eq!(ToneSet::with_count(3).iter().collect::<Vec<_>>(), ["t1", "t2", "t3"]);
        assert_eq!(ToneSet::new(["a", "a"]), Err(LexiconError::DuplicateTone("a".into())));
    }
}
