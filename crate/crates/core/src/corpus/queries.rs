use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, FrequencyList};

/// A one- or two-word search query.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    pub words: Vec<String>,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub queries: Vec<Query>,
    /// Seed of the sampler, when the set was sampled.
    pub seed: Option<u64>,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// First linear index of row `i` in the strict upper triangle of a k×k matrix.
fn row_start(i: usize, k: usize) -> usize {
    i * k - i * (i + 1) / 2
}

/// Maps `l ∈ [0, C(k,2))` to the pair `(i, j)` with `i < j`.
fn pair_at(l: usize, k: usize) -> (usize, usize) {
    // largest i with row_start(i) <= l
    let (mut lo, mut hi) = (0, k - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_start(mid, k) <= l {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, lo + 1 + (l - row_start(lo, k)))
}

/// Samples `n` distinct unordered word pairs uniformly without replacement.
/// Asking for more than `C(K, 2)` returns every pair.
pub fn generate_pair_queries(top: &FrequencyList, n: usize, seed: u64) -> Result<QuerySet, CorpusError> {
    let words: Vec<&str> = top.words().collect();
    let k = words.len();
    if k < 2 {
        return Err(CorpusError::TooFewWords(k));
    }
    if n == 0 {
        return Err(CorpusError::ZeroQueries);
    }
    let total = k * (k - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let queries = index::sample(&mut rng, total, n.min(total))
        .into_iter()
        .map(|l| {
            let (i, j) = pair_at(l, k);
            Query {
                words: vec![words[i].to_string(), words[j].to_string()],
            }
        })
        .collect();
    Ok(QuerySet {
        queries,
        seed: Some(seed),
    })
}

/// One query per vocabulary word outside `top`, in sorted order.
pub fn generate_single_queries<S: AsRef<str>>(full_vocab: &[S], top: &FrequencyList) -> Result<QuerySet, CorpusError> {
    let vocab: BTreeSet<&str> = full_vocab.iter().map(AsRef::as_ref).collect();
    let mut rest = vocab.clone();
    for w in top.words() {
        if !vocab.contains(w) {
            return Err(CorpusError::TopNotSubset(w.to_string()));
        }
        rest.remove(w);
    }
    Ok(QuerySet {
        queries: rest
            .into_iter()
            .map(|w| Query {
                words: vec![w.to_string()],
            })
            .collect(),
        seed: None,
    })
}
