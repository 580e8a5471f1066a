use std::collections::HashMap;

use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seasr::lm::{
    interpolate, perplexity, read_arpa, train_ngram, write_arpa, InterpolationWeight, NGramModel, TrainConfig,
    WordId,
};

fn random_corpus(rng: &mut ChaCha8Rng, vocab: &[&str], lines: usize) -> Vec<String> {
    (0..lines)
        .map(|_| {
            let n = rng.gen_range(1..6);
            (0..n).map(|_| *vocab.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

/// Interpolated Witten–Bell straight from string counts, recursing on the
/// history. Shares nothing with the trainer beyond the definition.
struct WittenBellOracle {
    order: usize,
    counts: HashMap<Vec<String>, f64>,
    predictable: Vec<String>,
}

impl WittenBellOracle {
    fn new(corpus: &[String], order: usize) -> Self {
        let mut counts = HashMap::new();
        let mut words = std::collections::BTreeSet::new();
        for line in corpus {
            let mut toks = vec!["<s>".to_string()];
            toks.extend(line.split_whitespace().map(str::to_string));
            toks.push("</s>".to_string());
            for (i, _) in toks.iter().enumerate().skip(1) {
                for n in 1..=order.min(i + 1) {
                    *counts.entry(toks[i + 1 - n..=i].to_vec()).or_insert(0.0) += 1.0;
                }
            }
            words.extend(toks.into_iter().skip(1));
        }
        let mut predictable: Vec<String> = words.into_iter().collect();
        predictable.push("<unk>".into());
        Self {
            order,
            counts,
            predictable,
        }
    }

    fn continuations(&self, h: &[String]) -> (f64, f64) {
        let mut total = 0.0;
        let mut types = 0.0;
        for (g, c) in &self.counts {
            if g.len() == h.len() + 1 && g[..h.len()] == *h {
                total += c;
                types += 1.0;
            }
        }
        (total, types)
    }

    fn prob(&self, w: &str, h: &[String]) -> f64 {
        let h = &h[h.len().saturating_sub(self.order - 1)..];
        let (total, types) = self.continuations(h);
        let lower = if h.is_empty() {
            1.0 / self.predictable.len() as f64
        } else {
            self.prob(w, &h[1..])
        };
        if total == 0.0 {
            return lower;
        }
        let mut g = h.to_vec();
        g.push(w.to_string());
        let c = self.counts.get(&g).copied().unwrap_or(0.0);
        (c + types * lower) / (total + types)
    }
}

fn names(m: &NGramModel, ids: &[WordId]) -> Vec<String> {
    ids.iter().map(|&i| m.vocab().word(i).to_string()).collect()
}

#[test]
fn trainer_matches_witten_bell_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let corpus = random_corpus(&mut rng, &["a", "b", "c", "d"], 8);
        let model = train_ngram(&corpus, &TrainConfig::with_order(3)).unwrap();
        let oracle = WittenBellOracle::new(&corpus, 3);
        let mut histories = model.contexts();
        histories.push(vec![]);
        for h in &histories {
            for w in model.predictable() {
                let got = model.prob(w, h);
                let want = oracle.prob(model.vocab().word(w), &names(&model, h));
                assert!((got - want).abs() < 1e-12, "P({} | {:?}) {got} vs {want}", model.vocab().word(w), names(&model, h));
            }
        }
    }
}

#[test]
fn normalization_over_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let corpus = random_corpus(&mut rng, &["p", "q", "r", "s", "t"], 6);
        let m = train_ngram(&corpus, &TrainConfig::with_order(rng.gen_range(1..=3))).unwrap();
        let mut histories = m.contexts();
        histories.push(vec![]);
        // plus histories nobody saw
        let ids: Vec<WordId> = m.predictable().collect();
        for _ in 0..5 {
            histories.push((0..2).map(|_| *ids.choose(&mut rng).unwrap()).collect());
        }
        for h in &histories {
            assert!((m.conditional_mass(h) - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn interpolation_endpoints_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let a = train_ngram(&random_corpus(&mut rng, &["a", "b", "c"], 6), &TrainConfig::with_order(3)).unwrap();
        let b = train_ngram(&random_corpus(&mut rng, &["b", "c", "d"], 6), &TrainConfig::with_order(3)).unwrap();
        let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
        let mixes: Vec<NGramModel> = lambdas
            .iter()
            .map(|&l| interpolate(&a, &b, InterpolationWeight::new(l).unwrap()).unwrap())
            .collect();
        let probe = |m: &NGramModel, src: &NGramModel, w: WordId, h: &[WordId]| {
            let w2 = m.vocab().id(src.vocab().word(w)).unwrap();
            let h2: Vec<WordId> = h.iter().map(|&x| m.vocab().id(src.vocab().word(x)).unwrap()).collect();
            m.prob(w2, &h2)
        };
        for (src, mix) in [(&b, &mixes[0]), (&a, &mixes[4])] {
            let mut hs = src.contexts();
            hs.push(vec![]);
            for h in &hs {
                for w in src.predictable() {
                    assert!((probe(mix, src, w, h) - src.prob(w, h)).abs() < 1e-12);
                }
            }
        }
        // along λ every conditional moves from P_b to P_a without turning back
        let mut hs = a.contexts();
        hs.push(vec![]);
        for h in &hs {
            for w in a.predictable() {
                let series: Vec<f64> = mixes.iter().map(|m| probe(m, &a, w, h)).collect();
                let up = series.windows(2).all(|p| p[1] >= p[0] - 1e-12);
                let down = series.windows(2).all(|p| p[1] <= p[0] + 1e-12);
                assert!(up || down, "{series:?}");
            }
        }
        for m in &mixes {
            for h in m.contexts() {
                assert!((m.conditional_mass(&h) - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn perplexity_prefers_training_text() {
    let train = vec!["satu dua tiga", "dua tiga empat", "satu satu dua"];
    let m = train_ngram(&train, &TrainConfig::default()).unwrap();
    let own = perplexity(&m, &train).unwrap().perplexity;
    let foreign = perplexity(&m, &["lima enam", "tujuh delapan sembilan"]).unwrap().perplexity;
    assert!(own <= foreign, "{own} vs {foreign}");
}

#[test]
fn arpa_round_trip_preserves_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let corpus = random_corpus(&mut rng, &["x", "y", "z", "w"], 20);
    let m = train_ngram(&corpus, &TrainConfig::default()).unwrap();
    let back = read_arpa(&write_arpa(&m)).unwrap();
    let mut hs = m.contexts();
    hs.push(vec![]);
    for h in &hs {
        for w in m.predictable() {
            let w2 = back.vocab().id(m.vocab().word(w)).unwrap();
            let h2: Vec<WordId> = h.iter().map(|&x| back.vocab().id(m.vocab().word(x)).unwrap()).collect();
            assert!((m.prob(w, h) - back.prob(w2, &h2)).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perplexity_ignores_line_order(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = train_ngram(&random_corpus(&mut rng, &["a", "b", "c"], 5), &TrainConfig::default()).unwrap();
        let mut test = random_corpus(&mut rng, &["a", "b", "c", "d"], 6);
        let p1 = perplexity(&m, &test).unwrap().perplexity;
        test.shuffle(&mut rng);
        let p2 = perplexity(&m, &test).unwrap().perplexity;
        prop_assert!((p1 - p2).abs() < 1e-9 * p1);
    }

    #[test]
    fn arpa_text_is_a_fixed_point(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = train_ngram(&random_corpus(&mut rng, &["a", "b", "c"], 4), &TrainConfig::with_order(2)).unwrap();
        let once = write_arpa(&m);
        let twice = write_arpa(&read_arpa(&once).unwrap());
        prop_assert_eq!(once.lines().count(), twice.lines().count());
    }
}
