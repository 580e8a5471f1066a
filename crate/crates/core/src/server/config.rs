use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use super::pool::{DecoderPool, LanguageBundle};
use super::session::DEFAULT_PARTIAL_INTERVAL;
use crate::decoder::{load_scorer, BeamConfig, DecodeError, GraphSpec, GraphSpecError, ScorerError};
use crate::frontend::{FrontendConfig, FrontendError};
use crate::lm::{read_arpa, LmError};

pub const DEFAULT_PORT: u16 = 8722;
pub const DEFAULT_TIMEOUT_SECS: u64 = 30;

#[derive(Debug, Error)]
pub enum ConfigError {
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
    Scorer { path: PathBuf, source: ScorerError },
    #[error("{path}: {source}")]
    Frontend { path: PathBuf, source: FrontendError },
    #[error("{path}: {source}")]
    Lm { path: PathBuf, source: LmError },
    #[error(transparent)]
    Graph(#[from] GraphSpecError),
    #[error("language {language:?}: {source}")]
    Decoder { language: String, source: DecodeError },
    #[error("language {0:?} listed twice")]
    DuplicateLanguage(String),
    #[error("no languages configured")]
    NoLanguages,
}

/// Server config file:
///
/// ```toml
/// port = 8722
/// timeout_secs = 30
/// partial_interval = 50
///
/// [[language]]
/// code = "id"
/// graph = "id/graph.toml"
/// scorer = "id/scorer.table"
/// lm = "id/web+transcripts.arpa"  # optional, overrides the graph's LM
/// frontend = "id/frontend.conf"   # optional
/// max_sessions = 16
/// beam = 200.0                    # optional
/// ```
///
/// Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_partial")]
    pub partial_interval: usize,
    #[serde(default, rename = "language")]
    pub languages: Vec<LanguageConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageConfig {
    pub code: String,
    pub graph: PathBuf,
    pub scorer: PathBuf,
    #[serde(default)]
    pub lm: Option<PathBuf>,
    #[serde(default)]
    pub frontend: Option<PathBuf>,
    pub max_sessions: usize,
    #[serde(default)]
    pub beam: Option<f64>,
    #[serde(default)]
    pub max_active: Option<usize>,
    #[serde(default)]
    pub lm_scale: Option<f64>,
    #[serde(default)]
    pub word_insertion_penalty: Option<f64>,
}

fn default_port() -> u16 {
    DEFAULT_PORT
}
fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}
fn default_partial() -> usize {
    DEFAULT_PARTIAL_INTERVAL
}

impl ServerConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: ServerConfig = toml::from_str(text).map_err(|source| ConfigError::Toml {
            path: base.to_path_buf(),
            source,
        })?;
        for l in &mut cfg.languages {
            l.graph = base.join(&l.graph);
            l.scorer = base.join(&l.scorer);
            l.lm = l.lm.as_ref().map(|p| base.join(p));
            l.frontend = l.frontend.as_ref().map(|p| base.join(p));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Loads every language once.
    pub fn load_pool(&self) -> Result<DecoderPool, ConfigError> {
        if self.languages.is_empty() {
            return Err(ConfigError::NoLanguages);
        }
        let mut pool = DecoderPool::new();
        for l in &self.languages {
            if pool.bundle(&l.code).is_some() {
                return Err(ConfigError::DuplicateLanguage(l.code.clone()));
            }
            pool.insert(l.load()?);
        }
        Ok(pool)
    }
}

impl LanguageConfig {
    pub fn beam_config(&self) -> BeamConfig {
        let d = BeamConfig::default();
        BeamConfig {
            beam: self.beam.unwrap_or(d.beam),
            max_active: self.max_active.unwrap_or(d.max_active),
            lm_scale: self.lm_scale.unwrap_or(d.lm_scale),
            word_insertion_penalty: self.word_insertion_penalty.unwrap_or(d.word_insertion_penalty),
        }
    }

    pub fn load(&self) -> Result<LanguageBundle, ConfigError> {
        let spec = GraphSpec::from_file(&self.graph)?;
        let lm = match &self.lm {
            Some(p) => Some(read_arpa(&read(p)?).map_err(|source| ConfigError::Lm {
                path: p.clone(),
                source,
            })?),
            None => None,
        };
        let graph = spec.build(lm.as_ref())?;
        let scorer = load_scorer(&read(&self.scorer)?).map_err(|source| ConfigError::Scorer {
            path: self.scorer.clone(),
            source,
        })?;
        let frontend = match &self.frontend {
            Some(p) => FrontendConfig::parse(&read(p)?).map_err(|source| ConfigError::Frontend {
                path: p.clone(),
                source,
            })?,
            None => FrontendConfig::default(),
        };
        let beam = self.beam_config();
        let decoder_err = |source| ConfigError::Decoder {
            language: self.code.clone(),
            source,
        };
        beam.validate().map_err(decoder_err)?;
        if let Some(n) = scorer.num_pdfs() {
            if n < graph.num_pdfs() {
                return Err(decoder_err(DecodeError::ScorerMismatch {
                    scorer: n,
                    graph: graph.num_pdfs(),
                }));
            }
        }
        if let Some(d) = scorer.dim() {
            if d != frontend.output_width() {
                return Err(decoder_err(DecodeError::WidthMismatch {
                    got: frontend.output_width(),
                    expected: d,
                }));
            }
        }
        Ok(LanguageBundle::new(
            &self.code,
            Arc::new(graph),
            Arc::from(scorer),
            frontend,
            beam,
            self.max_sessions,
        ))
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}
