//! Backoff n-gram language models: Witten–Bell training, linear
//! interpolation, ARPA I/O and perplexity.
//!
//! All probabilities are stored as log10 values, as in ARPA files.

mod arpa;
mod eval;
mod interpolate;
mod train;

pub use arpa::{read_arpa, write_arpa};
pub use eval::{perplexity, sentence_logprob, PerplexityReport, SentenceScore};
pub use interpolate::{interpolate, InterpolationWeight};
pub use train::{count_ngrams, train_ngram, NGramCounts, Smoothing, TrainConfig};

use std::collections::HashMap;

use thiserror::Error;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// log10 of a zero probability, as written in ARPA files.
pub const LOG10_ZERO: f64 = -99.0;

pub type WordId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum LmError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("interpolation weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error("ARPA line {line}: {msg}")]
    Arpa { line: usize, msg: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocab {
    words: Vec<String>,
    index: HashMap<String, WordId>,
}

impl Vocab {
    pub fn insert(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, &str)> {
        self.words.iter().enumerate().map(|(i, w)| (i as WordId, w.as_str()))
    }
}

/// Backoff n-gram model.
///
/// `P(w | h)` is the stored probability of the longest suffix `g` of `h`
/// for which `g w` is explicit, times the backoff weights of every longer
/// suffix of `h` that was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab: Vocab,
    /// `probs[n - 1]` maps n-grams to log10 probabilities.
    probs: Vec<HashMap<Vec<WordId>, f64>>,
    /// Context → log10 backoff weight; absent means 0 (weight 1).
    backoff: HashMap<Vec<WordId>, f64>,
    sentence_markers: bool,
}

impl NGramModel {
    pub(crate) fn empty(order: usize, vocab: Vocab, sentence_markers: bool) -> Self {
        Self {
            order,
            vocab,
            probs: vec![HashMap::new(); order],
            backoff: HashMap::new(),
            sentence_markers,
        }
    }

    /// Unigram model giving every word probability `1 / |words|`, without
    /// sentence markers.
    pub fn uniform<S: AsRef<str>>(words: &[S]) -> Self {
        let mut vocab = Vocab::default();
        for w in words {
            vocab.insert(w.as_ref());
        }
        let logp = -(vocab.len() as f64).log10();
        let mut m = Self::empty(1, vocab, false);
        for (id, _) in m.vocab.iter() {
            m.probs[0].insert(vec![id], logp);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Whether sentences are scored with `<s>` … `</s>` around them.
    pub fn sentence_markers(&self) -> bool {
        self.sentence_markers
    }

    pub fn unk_id(&self) -> Option<WordId> {
        self.vocab.id(UNK)
    }

    pub fn bos_id(&self) -> Option<WordId> {
        self.vocab.id(BOS)
    }

    pub fn eos_id(&self) -> Option<WordId> {
        self.vocab.id(EOS)
    }

    /// Maps a token to its id, falling back to `<unk>` when present.
    pub fn map_token(&self, token: &str) -> Option<WordId> {
        self.vocab.id(token).or_else(|| self.unk_id())
    }

    /// Words that can be predicted, i.e. everything except `<s>`.
    pub fn predictable(&self) -> impl Iterator<Item = WordId> + '_ {
        let bos = self.bos_id();
        self.vocab.iter().map(|(id, _)| id).filter(move |&id| Some(id) != bos)
    }

    pub fn ngram_count(&self, n: usize) -> usize {
        self.probs[n - 1].len()
    }

    pub fn ngrams(&self, n: usize) -> impl Iterator<Item = (&[WordId], f64)> {
        self.probs[n - 1].iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn explicit_logprob(&self, ngram: &[WordId]) -> Option<f64> {
        self.probs.get(ngram.len().wrapping_sub(1))?.get(ngram).copied()
    }

    pub fn backoff_weight(&self, context: &[WordId]) -> Option<f64> {
        self.backoff.get(context).copied()
    }

    pub(crate) fn set_prob(&mut self, ngram: Vec<WordId>, logp: f64) {
        let n = ngram.len();
        self.probs[n - 1].insert(ngram, logp);
    }

    pub(crate) fn set_backoff(&mut self, context: Vec<WordId>, logw: f64) {
        self.backoff.insert(context, logw);
    }

    /// Contexts with explicit continuations or a stored backoff weight.
    pub fn contexts(&self) -> Vec<Vec<WordId>> {
        let mut out: Vec<Vec<WordId>> = self.backoff.keys().cloned().collect();
        for level in &self.probs[1..] {
            out.extend(level.keys().map(|k| k[..k.len() - 1].to_vec()));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// log10 P(word | history). The history is oldest-first and is
    /// truncated to the last `order - 1` entries.
    pub fn logprob(&self, word: WordId, history: &[WordId]) -> f64 {
        let keep = history.len().min(self.order - 1);
        let h = &history[history.len() - keep..];
        let mut key: Vec<WordId> = Vec::with_capacity(keep + 1);
        let mut bow = 0.0;
        for start in 0..=keep {
            key.clear();
            key.extend_from_slice(&h[start..]);
            key.push(word);
            if let Some(&p) = self.probs[key.len() - 1].get(&key) {
                return p + bow;
            }
            if start < keep {
                bow += self.backoff.get(&h[start..]).copied().unwrap_or(0.0);
            }
        }
        f64::NEG_INFINITY
    }

    pub fn prob(&self, word: WordId, history: &[WordId]) -> f64 {
        10f64.powf(self.logprob(word, history))
    }

    /// Σ_w P(w | history) over every predictable word.
    pub fn conditional_mass(&self, history: &[WordId]) -> f64 {
        self.predictable().map(|w| self.prob(w, history)).sum()
    }

    /// History state reached after `word`, limited to `order - 1` words.
    pub fn advance(&self, history: &[WordId], word: WordId) -> Vec<WordId> {
        let keep = self.order - 1;
        let mut h: Vec<WordId> = history.iter().copied().chain(std::iter::once(word)).collect();
        if h.len() > keep {
            h.drain(..h.len() - keep);
        }
        h
    }

    /// Initial history for a sentence.
    pub fn start_history(&self) -> Vec<WordId> {
        match (self.sentence_markers, self.bos_id()) {
            (true, Some(bos)) if self.order > 1 => vec![bos],
            _ => Vec::new(),
        }
    }
}

pub(crate) fn log10_or_zero(p: f64) -> f64 {
    if p > 0.0 {
        p.log10().max(LOG10_ZERO)
    } else {
        LOG10_ZERO
    }
}
