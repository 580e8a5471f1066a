use std::collections::BTreeSet;

use super::{log10_or_zero, LmError, NGramModel, Vocab, WordId, BOS, LOG10_ZERO};

/// Mixture weight of the first model, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationWeight(f64);

impl InterpolationWeight {
    pub fn new(lambda: f64) -> Result<Self, LmError> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(LmError::InvalidWeight(lambda))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for InterpolationWeight {
    fn default() -> Self {
        Self(0.5)
    }
}

/// Maps ids of the union vocabulary back into one component.
struct Component<'a> {
    model: &'a NGramModel,
    ids: Vec<Option<WordId>>,
}

impl Component<'_> {
    /// Conditional probability as the component would assign it. Words
    /// outside its vocabulary get zero; unknown history words map to its
    /// `<unk>`, or cut the history when it has none.
    fn prob(&self, word: WordId, history: &[WordId]) -> f64 {
        let Some(w) = self.ids[word as usize] else {
            return 0.0;
        };
        let mut h = Vec::with_capacity(history.len());
        for &x in history {
            match self.ids[x as usize].or_else(|| self.model.unk_id()) {
                Some(id) => h.push(id),
                None => h.clear(),
            }
        }
        let lp = self.model.logprob(w, &h);
        if lp <= LOG10_ZERO {
            0.0
        } else {
            10f64.powf(lp)
        }
    }
}

/// Linear interpolation `λ·P_a + (1 − λ)·P_b` of two models of equal order.
///
/// For every history that either model has as a context, the mixed
/// distribution is stored over the whole union vocabulary, so every
/// conditional of the result equals the exact mixture and sums to one.
/// Histories neither model knows back off with weight one, as they do in
/// both components.
pub fn interpolate(a: &NGramModel, b: &NGramModel, w: InterpolationWeight) -> Result<NGramModel, LmError> {
    if a.order() != b.order() {
        return Err(LmError::OrderMismatch(a.order(), b.order()));
    }
    let lambda = w.value();
    let mut vocab = Vocab::default();
    for m in [a, b] {
        for (_, word) in m.vocab().iter() {
            vocab.insert(word);
        }
    }
    let comps = [a, b].map(|m| Component {
        model: m,
        ids: vocab.iter().map(|(_, word)| m.vocab().id(word)).collect(),
    });
    let to_union = |m: &NGramModel, ids: &[WordId]| -> Vec<WordId> {
        ids.iter()
            .map(|&i| vocab.id(m.vocab().word(i)).expect("union holds every word"))
            .collect()
    };

    let mut histories: BTreeSet<Vec<WordId>> = BTreeSet::new();
    histories.insert(Vec::new());
    for m in [a, b] {
        for h in m.contexts() {
            histories.insert(to_union(m, &h));
        }
    }

    let markers = a.sentence_markers() || b.sentence_markers();
    let mut out = NGramModel::empty(a.order(), vocab.clone(), markers);
    let bos = vocab.id(BOS);
    let predictable: Vec<WordId> = out.predictable().collect();
    for h in &histories {
        if h.len() >= a.order() {
            continue;
        }
        for &word in &predictable {
            let p = lambda * comps[0].prob(word, h) + (1.0 - lambda) * comps[1].prob(word, h);
            let mut g = h.clone();
            g.push(word);
            out.set_prob(g, log10_or_zero(p));
        }
        if !h.is_empty() {
            out.set_backoff(h.clone(), 0.0);
        }
    }
    if let Some(bos) = bos {
        out.set_prob(vec![bos], LOG10_ZERO);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lm::{train_ngram, TrainConfig};

    #[test]
    fn weight_bounds() {
        assert!(InterpolationWeight::new(1.2).is_err());
        assert!(InterpolationWeight::new(-0.1).is_err());
        assert_eq!(InterpolationWeight::default().value(), 0.5);
    }

    #[test]
    fn order_mismatch() {
        let a = train_ngram(&["a b"], &TrainConfig::with_order(2)).unwrap();
        let b = train_ngram(&["a b"], &TrainConfig::with_order(3)).unwrap();
        assert_eq!(
            interpolate(&a, &b, InterpolationWeight::default()).unwrap_err(),
            LmError::OrderMismatch(2, 3)
        );
    }

    #[test]
    fn averaged_unigrams() {
        let a = NGramModel::uniform(&["x", "y", "z"]);
        let mut b = NGramModel::uniform(&["x", "y", "z"]);
        for (w, p) in [("x", 0.5f64), ("y", 0.25), ("z", 0.25)] {
            let id = b.vocab().id(w).unwrap();
            b.set_prob(vec![id], p.log10());
        }
        let m = interpolate(&a, &b, InterpolationWeight::new(0.5).unwrap()).unwrap();
        let id = |w| m.vocab().id(w).unwrap();
        assert!((m.prob(id("x"), &[]) - (1.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
        assert!((m.prob(id("y"), &[]) - (1.0 / 3.0 + 0.25) / 2.0).abs() < 1e-12);
        assert!((m.conditional_mass(&[]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_vocabularies_stay_normalized() {
        let a = train_ngram(&["a b a", "b b"], &TrainConfig::with_order(2)).unwrap();
        let b = train_ngram(&["c d", "d c c"], &TrainConfig::with_order(2)).unwrap();
        let m = interpolate(&a, &b, InterpolationWeight::new(0.3).unwrap()).unwrap();
        for h in m.contexts().into_iter().chain([vec![]]) {
            assert!((m.conditional_mass(&h) - 1.0).abs() < 1e-9, "{h:?}");
        }
    }
}
