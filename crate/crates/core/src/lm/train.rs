use std::collections::{BTreeMap, HashMap};

use super::{log10_or_zero, LmError, NGramModel, Vocab, WordId, BOS, EOS, UNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Interpolated Witten–Bell, stored in backoff form. The unigram level
    /// interpolates with a uniform distribution over the predictable
    /// vocabulary, which is where `<unk>` gets its mass.
    #[default]
    WittenBell,
    /// Relative frequencies with no reserved mass; unseen events get zero.
    MaximumLikelihood,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub order: usize,
    pub smoothing: Smoothing,
    /// Tokens seen fewer times than this are mapped to `<unk>`.
    pub min_count: u64,
    pub sentence_markers: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            order: 3,
            smoothing: Smoothing::WittenBell,
            min_count: 1,
            sentence_markers: true,
        }
    }
}

impl TrainConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

/// Raw n-gram counts over a tokenized corpus.
#[derive(Debug, Clone)]
pub struct NGramCounts {
    order: usize,
    sentence_markers: bool,
    vocab: Vocab,
    /// Raw token counts before min-count mapping, markers excluded.
    word_counts: BTreeMap<String, u64>,
    /// `ngrams[n - 1]`: n-gram → count, over the mapped vocabulary.
    ngrams: Vec<HashMap<Vec<WordId>, u64>>,
}

impl NGramCounts {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Count of an n-gram given as tokens (after `<unk>` mapping).
    pub fn count(&self, tokens: &[&str]) -> u64 {
        let Some(ids) = tokens.iter().map(|t| self.vocab.id(t)).collect::<Option<Vec<_>>>() else {
            return 0;
        };
        self.ngrams
            .get(ids.len().wrapping_sub(1))
            .and_then(|m| m.get(&ids))
            .copied()
            .unwrap_or(0)
    }

    /// Maximum-likelihood unigram frequency of a raw token among all
    /// non-marker tokens.
    pub fn relative_frequency(&self, word: &str) -> f64 {
        let total: u64 = self.word_counts.values().sum();
        if total == 0 {
            return 0.0;
        }
        self.word_counts.get(word).copied().unwrap_or(0) as f64 / total as f64
    }

    pub fn ngrams(&self, n: usize) -> impl Iterator<Item = (&[WordId], u64)> {
        self.ngrams[n - 1].iter().map(|(k, &c)| (k.as_slice(), c))
    }
}

fn tokenize(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

pub fn count_ngrams<S: AsRef<str>>(corpus: &[S], cfg: &TrainConfig) -> Result<NGramCounts, LmError> {
    if cfg.order < 1 {
        return Err(LmError::InvalidOrder(cfg.order));
    }
    let sentences: Vec<Vec<&str>> = corpus
        .iter()
        .map(|l| tokenize(l.as_ref()))
        .filter(|s| !s.is_empty())
        .collect();
    if sentences.is_empty() {
        return Err(LmError::EmptyCorpus);
    }

    let mut word_counts: BTreeMap<String, u64> = BTreeMap::new();
    for s in &sentences {
        for w in s {
            *word_counts.entry((*w).to_string()).or_default() += 1;
        }
    }

    let mut vocab = Vocab::default();
    if cfg.sentence_markers {
        vocab.insert(BOS);
        vocab.insert(EOS);
    }
    if cfg.smoothing == Smoothing::WittenBell {
        vocab.insert(UNK);
    }
    for (w, &c) in &word_counts {
        if c >= cfg.min_count {
            vocab.insert(w);
        }
    }

    let mut ngrams = vec![HashMap::new(); cfg.order];
    for s in &sentences {
        let mut ids = Vec::with_capacity(s.len() + 2);
        if cfg.sentence_markers {
            ids.push(vocab.id(BOS).expect("marker in vocab"));
        }
        for w in s {
            let id = match vocab.id(w) {
                Some(id) => id,
                None => vocab.insert(UNK),
            };
            ids.push(id);
        }
        if cfg.sentence_markers {
            ids.push(vocab.id(EOS).expect("marker in vocab"));
        }
        let first = usize::from(cfg.sentence_markers);
        for i in first..ids.len() {
            for n in 1..=cfg.order.min(i + 1) {
                *ngrams[n - 1].entry(ids[i + 1 - n..=i].to_vec()).or_insert(0u64) += 1;
            }
        }
    }

    Ok(NGramCounts {
        order: cfg.order,
        sentence_markers: cfg.sentence_markers,
        vocab,
        word_counts,
        ngrams,
    })
}

/// Per-history totals: (Σ_w c(h w), number of distinct w).
fn history_stats(level: &HashMap<Vec<WordId>, u64>) -> HashMap<&[WordId], (u64, u64)> {
    let mut stats: HashMap<&[WordId], (u64, u64)> = HashMap::new();
    for (g, &c) in level {
        let e = stats.entry(&g[..g.len() - 1]).or_default();
        e.0 += c;
        e.1 += 1;
    }
    stats
}

pub fn train_ngram<S: AsRef<str>>(corpus: &[S], cfg: &TrainConfig) -> Result<NGramModel, LmError> {
    let counts = count_ngrams(corpus, cfg)?;
    Ok(estimate(&counts, cfg.smoothing))
}

fn estimate(counts: &NGramCounts, smoothing: Smoothing) -> NGramModel {
    let mut model = NGramModel::empty(counts.order, counts.vocab.clone(), counts.sentence_markers);
    let bos = model.bos_id();
    let predictable: Vec<WordId> = model.predictable().collect();

    // unigrams
    let uni = &counts.ngrams[0];
    let total: u64 = uni.values().sum();
    let types = uni.len() as f64;
    let uniform = 1.0 / predictable.len() as f64;
    for &w in &predictable {
        let c = uni.get(&vec![w]).copied().unwrap_or(0) as f64;
        let p = match smoothing {
            Smoothing::WittenBell => (c + types * uniform) / (total as f64 + types),
            Smoothing::MaximumLikelihood => c / total as f64,
        };
        if p > 0.0 || smoothing == Smoothing::WittenBell {
            model.set_prob(vec![w], log10_or_zero(p));
        }
    }
    if let Some(bos) = bos {
        model.set_prob(vec![bos], super::LOG10_ZERO);
    }

    for n in 2..=counts.order {
        let level = &counts.ngrams[n - 1];
        let stats = history_stats(level);
        let mut entries: Vec<(Vec<WordId>, f64)> = Vec::with_capacity(level.len());
        for (g, &c) in level {
            let h = &g[..n - 1];
            let w = g[n - 1];
            let (hc, ht) = stats[h];
            let p = match smoothing {
                Smoothing::WittenBell => {
                    let lower = model.prob(w, &h[1..]);
                    (c as f64 + ht as f64 * lower) / (hc + ht) as f64
                }
                Smoothing::MaximumLikelihood => c as f64 / hc as f64,
            };
            entries.push((g.clone(), log10_or_zero(p)));
        }
        let backoffs: Vec<(Vec<WordId>, f64)> = match smoothing {
            Smoothing::WittenBell => stats
                .iter()
                .map(|(h, &(hc, ht))| (h.to_vec(), (ht as f64 / (hc + ht) as f64).log10()))
                .collect(),
            Smoothing::MaximumLikelihood => Vec::new(),
        };
        for (g, p) in entries {
            model.set_prob(g, p);
        }
        for (h, w) in backoffs {
            model.set_backoff(h, w);
        }
    }
    model
}
