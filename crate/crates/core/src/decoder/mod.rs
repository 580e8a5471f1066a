//! Viterbi beam search over a lexicon prefix tree of 3-state phone HMMs,
//! with n-gram scores applied at word ends.

mod graph;
mod scorer;
mod search;
mod spec;

pub use graph::{DecodingGraph, TreeNode, ADVANCE_LOGPROB, SELF_LOOP_LOGPROB, STATES_PER_UNIT};
pub use scorer::{load_scorer, AcousticScorer, DiagonalGaussianScorer, ScorerError, TableScorer};
pub use search::{viterbi_decode, IncrementalDecoder};
pub use spec::{GraphSpec, GraphSpecError};

use thiserror::Error;

use crate::lexicon::LexiconViolation;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("empty lexicon")]
    EmptyLexicon,
    #[error("invalid lexicon: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidLexicon(Vec<LexiconViolation>),
    #[error("word {0:?} is not in the language model, which has no <unk>")]
    WordMissingFromLm(String),
    #[error("no input frames")]
    EmptyInput,
    #[error("search failure: no path reached a word end at the last frame")]
    SearchFailure,
    #[error("feature width {got}, expected {expected}")]
    WidthMismatch { got: usize, expected: usize },
    #[error("scorer covers {scorer} acoustic states, graph needs {graph}")]
    ScorerMismatch { scorer: usize, graph: usize },
    #[error("decoder already finalized")]
    Finalized,
    #[error("invalid beam configuration: {0}")]
    InvalidBeam(String),
}

/// Search parameters. Scores are natural-log; `beam = ∞` with unbounded
/// `max_active` gives exact Viterbi.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    pub beam: f64,
    pub max_active: usize,
    pub lm_scale: f64,
    pub word_insertion_penalty: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self {
            beam: 200.0,
            max_active: 20_000,
            lm_scale: 1.0,
            word_insertion_penalty: 0.0,
        }
    }
}

impl BeamConfig {
    pub fn exact() -> Self {
        Self {
            beam: f64::INFINITY,
            max_active: usize::MAX,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam.is_nan() || self.beam <= 0.0 {
            return Err(DecodeError::InvalidBeam(format!("beam must be positive, got {}", self.beam)));
        }
        if self.max_active == 0 {
            return Err(DecodeError::InvalidBeam("max_active must be at least 1".into()));
        }
        if !self.lm_scale.is_finite() || !self.word_insertion_penalty.is_finite() {
            return Err(DecodeError::InvalidBeam("lm_scale and insertion penalty must be finite".into()));
        }
        Ok(())
    }
}

/// A decoded word sequence. `boundaries[i]` is the half-open frame range
/// of `words[i]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hypothesis {
    pub words: Vec<String>,
    pub score: f64,
    pub boundaries: Vec<(usize, usize)>,
}

impl Hypothesis {
    pub fn transcript(&self) -> String {
        self.words.join(" ")
    }
}
