use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gender {
    Male,
    Female,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Speaker {
    pub id: String,
    pub gender: Gender,
    pub age: u32,
    pub region: String,
    pub native: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub speaker_id: String,
    pub duration_s: f64,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusManifest {
    pub speakers: Vec<Speaker>,
    pub utterances: Vec<Utterance>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{file} line {line}: {msg}")]
pub struct ManifestError {
    pub file: &'static str,
    pub line: usize,
    pub msg: String,
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| (n, l.split('\t').map(str::trim).collect()))
}

impl CorpusManifest {
    /// Parses `speakers.tsv` (id, gender, age, region, native) and
    /// `utterances.tsv` (speaker_id, duration_s, text). A first row whose
    /// leading field is `id` or `speaker_id` is taken as a header.
    pub fn parse(speakers_tsv: &str, utterances_tsv: &str) -> Result<Self, ManifestError> {
        let mut m = CorpusManifest::default();
        for (line, f) in rows(speakers_tsv) {
            let err = |msg: String| ManifestError {
                file: "speakers",
                line,
                msg,
            };
            if f[0] == "id" && m.speakers.is_empty() {
                continue;
            }
            if f.len() != 5 {
                return Err(err(format!("expected 5 fields, got {}", f.len())));
            }
            let gender = match f[1].to_ascii_lowercase().as_str() {
                "m" | "male" => Gender::Male,
                "f" | "female" => Gender::Female,
                g => return Err(err(format!("unknown gender {g:?}"))),
            };
            let age = f[2].parse().map_err(|_| err(format!("bad age {:?}", f[2])))?;
            let native = match f[4].to_ascii_lowercase().as_str() {
                "1" | "yes" | "true" | "y" => true,
                "0" | "no" | "false" | "n" => false,
                v => return Err(err(format!("bad native flag {v:?}"))),
            };
            m.speakers.push(Speaker {
                id: f[0].to_string(),
                gender,
                age,
                region: f[3].to_string(),
                native,
            });
        }
        for (line, f) in rows(utterances_tsv) {
            let err = |msg: String| ManifestError {
                file: "utterances",
                line,
                msg,
            };
            if f[0] == "speaker_id" && m.utterances.is_empty() {
                continue;
            }
            if f.len() != 3 {
                return Err(err(format!("expected 3 fields, got {}", f.len())));
            }
            let duration_s = f[1].parse().map_err(|_| err(format!("bad duration {:?}", f[1])))?;
            m.utterances.push(Utterance {
                speaker_id: f[0].to_string(),
                duration_s,
                text: f[2].to_string(),
            });
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRules {
    /// Sentences must have fewer words than this.
    pub max_words_per_sentence: usize,
    /// A sentence may appear at most this many times corpus-wide.
    pub max_sentence_repeats: usize,
    pub min_age: u32,
    pub max_age: u32,
    /// Allowed |male fraction − 0.5|.
    pub gender_tolerance: f64,
}

impl Default for ManifestRules {
    fn default() -> Self {
        Self {
            max_words_per_sentence: 20,
            max_sentence_repeats: 3,
            min_age: 16,
            max_age: 60,
            gender_tolerance: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifestViolation {
    /// Advisory: the manifest lists no speakers.
    NoSpeakers,
    SentenceTooLong { utterance: usize, words: usize },
    SentenceRepeated { text: String, count: usize },
    AgeOutOfRange { speaker: String, age: u32 },
    GenderImbalance { male: usize, female: usize },
    NonNative { speaker: String },
    UnknownSpeaker { utterance: usize, speaker: String },
    NonPositiveDuration { utterance: usize },
}

impl fmt::Display for ManifestViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoSpeakers => write!(f, "no speakers"),
            Self::SentenceTooLong { utterance, words } => {
                write!(f, "sentence too long: utterance {utterance} has {words} words")
            }
            Self::SentenceRepeated { text, count } => write!(f, "sentence repeated {count} times: {text:?}"),
            Self::AgeOutOfRange { speaker, age } => write!(f, "speaker {speaker} age {age} outside range"),
            Self::GenderImbalance { male, female } => write!(f, "gender imbalance: {male} male, {female} female"),
            Self::NonNative { speaker } => write!(f, "speaker {speaker} is not a native speaker"),
            Self::UnknownSpeaker { utterance, speaker } => {
                write!(f, "utterance {utterance} references unknown speaker {speaker}")
            }
            Self::NonPositiveDuration { utterance } => write!(f, "utterance {utterance} has non-positive duration"),
        }
    }
}

/// Checks a recording manifest against the collection rules. Utterance
/// indices are zero-based positions in `m.utterances`.
pub fn validate_manifest(m: &CorpusManifest, r: &ManifestRules) -> Vec<ManifestViolation> {
    let mut out = Vec::new();
    if m.speakers.is_empty() {
        out.push(ManifestViolation::NoSpeakers);
    }
    for s in &m.speakers {
        if s.age < r.min_age || s.age > r.max_age {
            out.push(ManifestViolation::AgeOutOfRange {
                speaker: s.id.clone(),
                age: s.age,
            });
        }
        if !s.native {
            out.push(ManifestViolation::NonNative { speaker: s.id.clone() });
        }
    }
    if !m.speakers.is_empty() {
        let male = m.speakers.iter().filter(|s| s.gender == Gender::Male).count();
        let female = m.speakers.len() - male;
        if (male as f64 / m.speakers.len() as f64 - 0.5).abs() > r.gender_tolerance {
            out.push(ManifestViolation::GenderImbalance { male, female });
        }
    }

    let known: HashSet<&str> = m.speakers.iter().map(|s| s.id.as_str()).collect();
    let mut repeats: BTreeMap<String, usize> = BTreeMap::new();
    for (i, u) in m.utterances.iter().enumerate() {
        if !known.contains(u.speaker_id.as_str()) {
            out.push(ManifestViolation::UnknownSpeaker {
                utterance: i,
                speaker: u.speaker_id.clone(),
            });
        }
        if u.duration_s.is_nan() || u.duration_s <= 0.0 {
            out.push(ManifestViolation::NonPositiveDuration { utterance: i });
        }
        let words: Vec<&str> = u.text.split_whitespace().collect();
        if words.len() >= r.max_words_per_sentence {
            out.push(ManifestViolation::SentenceTooLong {
                utterance: i,
                words: words.len(),
            });
        }
        *repeats.entry(words.join(" ")).or_default() += 1;
    }
    for (text, count) in repeats {
        if count > r.max_sentence_repeats {
            out.push(ManifestViolation::SentenceRepeated { text, count });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn speaker(id: &str, gender: Gender, age: u32) -> Speaker {
        Speaker {
            id: id.into(),
            gender,
            age,
            region: "jawa".into(),
            native: true,
        }
    }

    fn utt(text: &str) -> Utterance {
        Utterance {
            speaker_id: "s1".into(),
            duration_s: 2.0,
            text: text.into(),
        }
    }

    fn balanced() -> Vec<Speaker> {
        vec![speaker("s1", Gender::Male, 30), speaker("s2", Gender::Female, 40)]
    }

    #[test]
    fn empty_manifest_is_only_advisory() {
        assert_eq!(
            validate_manifest(&CorpusManifest::default(), &ManifestRules::default()),
            [ManifestViolation::NoSpeakers]
        );
    }

    #[test]
    fn sentence_length_boundary() {
        let nineteen = vec!["kata"; 19].join(" ");
        let twenty = vec!["kata"; 20].join(" ");
        let m = CorpusManifest {
            speakers: balanced(),
            utterances: vec![utt(&nineteen), utt(&twenty)],
        };
        assert_eq!(
            validate_manifest(&m, &ManifestRules::default()),
            [ManifestViolation::SentenceTooLong { utterance: 1, words: 20 }]
        );
    }

    #[test]
    fn repeats_counted_after_whitespace_normalization() {
        let m = CorpusManifest {
            speakers: balanced(),
            utterances: vec![utt("apa kabar"), utt("apa  kabar"), utt("apa kabar "), utt("apa kabar")],
        };
        assert_eq!(
            validate_manifest(&m, &ManifestRules::default()),
            [ManifestViolation::SentenceRepeated {
                text: "apa kabar".into(),
                count: 4
            }]
        );
    }

    #[test]
    fn speaker_rules() {
        let mut s = vec![speaker("a", Gender::Male, 15), speaker("b", Gender::Male, 61), speaker("c", Gender::Female, 30)];
        s[2].native = false;
        let m = CorpusManifest {
            speakers: s,
            utterances: vec![Utterance {
                speaker_id: "z".into(),
                duration_s: 0.0,
                text: "x".into(),
            }],
        };
        let v = validate_manifest(&m, &ManifestRules::default());
        assert_eq!(
            v,
            [
                ManifestViolation::AgeOutOfRange { speaker: "a".into(), age: 15 },
                ManifestViolation::AgeOutOfRange { speaker: "b".into(), age: 61 },
                ManifestViolation::NonNative { speaker: "c".into() },
                ManifestViolation::GenderImbalance { male: 2, female: 1 },
                ManifestViolation::UnknownSpeaker {
                    utterance: 0,
                    speaker: "z".into()
                },
                ManifestViolation::NonPositiveDuration { utterance: 0 },
            ]
        );
    }

    #[test]
    fn parse_with_headers() {
        let m = CorpusManifest::parse(
            "id\tgender\tage\tregion\tnative\ns1\tM\t20\tjakarta\t1\n# comment\ns2\tfemale\t33\tbandung\tno\n",
            "speaker_id\tduration_s\ttext\ns1\t1.5\tselamat pagi\n",
        )
        .unwrap();
        assert_eq!(m.speakers.len(), 2);
        assert_eq!(m.speakers[1].gender, Gender::Female);
        assert!(!m.speakers[1].native);
        assert_eq!(m.utterances[0].text, "selamat pagi");
        let e = CorpusManifest::parse("s1\tX\t20\tj\t1\n", "").unwrap_err();
        assert_eq!((e.file, e.line), ("speakers", 1));
    }
}
