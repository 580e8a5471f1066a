use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::{DecodeError, DecodingGraph};
use crate::lexicon::{expand_tonal, load_inventory, Lexicon, LexiconError, ToneSet};
use crate::lm::{read_arpa, LmError, NGramModel};

#[derive(Debug, Error)]
pub enum GraphSpecError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Lexicon {
        path: PathBuf,
        source: LexiconError,
    },
    #[error("{path}: {source}")]
    Lm { path: PathBuf, source: LmError },
    #[error(transparent)]
    Graph(#[from] DecodeError),
}

/// Files that make up a decoding graph, as listed in a TOML file:
///
/// ```toml
/// inventory = "thai.inv"
/// lexicon = "words.dict"
/// lm = "web.arpa"
/// tones = 5   # optional; expands tonal units before lexicon lookup
/// ```
///
/// Relative paths resolve against the TOML file's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub inventory: PathBuf,
    pub lexicon: PathBuf,
    pub lm: PathBuf,
    #[serde(default)]
    pub tones: Option<usize>,
    #[serde(default)]
    pub language: Option<String>,
}

impl GraphSpec {
    pub fn from_file(path: &Path) -> Result<Self, GraphSpecError> {
        let text = read(path)?;
        let mut spec: GraphSpec = toml::from_str(&text).map_err(|source| GraphSpecError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut spec.inventory, &mut spec.lexicon, &mut spec.lm] {
            *p = base.join(&*p);
        }
        Ok(spec)
    }

    pub fn load_lm(&self) -> Result<NGramModel, GraphSpecError> {
        read_arpa(&read(&self.lm)?).map_err(|source| GraphSpecError::Lm {
            path: self.lm.clone(),
            source,
        })
    }

    /// Builds the graph, using `lm` in place of the listed one when given.
    pub fn build(&self, lm: Option<&NGramModel>) -> Result<DecodingGraph, GraphSpecError> {
        let lex_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| GraphSpecError::Lexicon { path, source }
        };
        let lang = self.language.as_deref().unwrap_or("");
        let mut inv = load_inventory(lang, &read(&self.inventory)?).map_err(lex_err(&self.inventory))?;
        if let Some(n) = self.tones {
            inv = expand_tonal(&inv, &ToneSet::with_count(n)).map_err(lex_err(&self.inventory))?;
        }
        let lex = Lexicon::parse(&read(&self.lexicon)?).map_err(lex_err(&self.lexicon))?;
        let owned;
        let lm = match lm {
            Some(lm) => lm,
            None => {
                owned = self.load_lm()?;
                &owned
            }
        };
        Ok(DecodingGraph::build(&lex, &inv, lm)?)
    }
}

fn read(path: &Path) -> Result<String, GraphSpecError> {
    std::fs::read_to_string(path).map_err(|source| GraphSpecError::Io {
        path: path.to_path_buf(),
        source,
    })
}
