//! Random decoding instances and an exhaustive reference decoder.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use seasr::decoder::*;
use seasr::frontend::FeatureMatrix;
use seasr::lexicon::{load_inventory, Lexicon, PhonemeInventory};
use seasr::lm::{train_ngram, NGramModel, TrainConfig, WordId};

pub const UNITS: [&str; 3] = ["a", "b", "c"];

pub struct Instance {
    pub inv: PhonemeInventory,
    pub lex: Lexicon,
    pub lm: NGramModel,
    pub scorer: TableScorer,
    pub frames: usize,
}

impl Instance {
    pub fn graph(&self) -> DecodingGraph {
        DecodingGraph::build(&self.lex, &self.inv, &self.lm).unwrap()
    }

    pub fn features(&self) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..self.frames).map(|t| vec![t as f64]).collect();
        FeatureMatrix::from_rows(&rows, 1, 10.0).unwrap()
    }
}

pub fn inventory() -> PhonemeInventory {
    let text: String = UNITS.iter().map(|u| format!("{u}\tvowel\ttonal:0\n")).collect();
    load_inventory("xx", &text).unwrap()
}

/// Random lexicon of distinct pronunciations, a small trained LM and random
/// acoustic scores for every (pdf, frame).
pub fn random_instance(rng: &mut ChaCha8Rng, max_words: usize, max_phones: usize, frames: usize) -> Instance {
    let n_words = rng.gen_range(1..=max_words);
    let mut prons: Vec<Vec<&str>> = Vec::new();
    while prons.len() < n_words {
        let len = rng.gen_range(1..=max_phones);
        let p: Vec<&str> = (0..len).map(|_| UNITS[rng.gen_range(0..3)]).collect();
        if !prons.contains(&p) {
            prons.push(p);
        }
    }
    let words: Vec<String> = (0..n_words).map(|i| format!("w{i}")).collect();
    let lex_text: String = words.iter().zip(&prons).map(|(w, p)| format!("{w}\t{}\n", p.join(" "))).collect();
    let corpus: Vec<String> = (0..6)
        .map(|_| {
            let n = rng.gen_range(1..4);
            (0..n).map(|_| words[rng.gen_range(0..n_words)].clone()).collect::<Vec<_>>().join(" ")
        })
        .collect();
    let lm = train_ngram(&corpus, &TrainConfig::with_order(rng.gen_range(1..=3))).unwrap();
    let mut scorer = TableScorer::new(-3.0);
    for pdf in 0..UNITS.len() * 3 {
        for t in 0..frames {
            scorer.set(pdf, t, rng.gen_range(-6.0..0.0));
        }
    }
    Instance {
        inv: inventory(),
        lex: Lexicon::parse(&lex_text).unwrap(),
        lm,
        scorer,
        frames,
    }
}

/// Enumerates every word sequence and state alignment over flat per-word
/// HMMs, independent of the prefix tree and token passing.
pub struct BruteForce<'a> {
    inst: &'a Instance,
    prons: Vec<(String, Vec<usize>)>,
    ln_self: f64,
    ln_adv: f64,
    best: Option<(f64, Vec<String>)>,
}

impl<'a> BruteForce<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let prons = inst
            .lex
            .entries()
            .iter()
            .map(|e| {
                let units = e.pronunciation.iter().map(|p| UNITS.iter().position(|u| u == p).unwrap()).collect();
                (e.word.clone(), units)
            })
            .collect();
        Self {
            inst,
            prons,
            ln_self: 0.6f64.ln(),
            ln_adv: 0.4f64.ln(),
            best: None,
        }
    }

    fn emit(&self, pron: usize, pos: usize, t: usize) -> f64 {
        let pdf = self.prons[pron].1[pos / 3] * 3 + pos % 3;
        self.inst.scorer.score(pdf, t, &[])
    }

    fn lm_cost(&self, word: &str, hist: &[WordId]) -> Option<(f64, Vec<WordId>)> {
        let lm = &self.inst.lm;
        let id = lm.map_token(word).unwrap();
        let lp = lm.logprob(id, hist);
        lp.is_finite().then(|| (lp * std::f64::consts::LN_10, lm.advance(hist, id)))
    }

    pub fn run(mut self) -> Option<(f64, Vec<String>)> {
        let start = self.inst.lm.start_history();
        for p in 0..self.prons.len() {
            let e = self.emit(p, 0, 0);
            self.walk(0, p, 0, &start, e, &mut Vec::new());
        }
        self.best
    }

    fn walk(&mut self, t: usize, p: usize, pos: usize, hist: &[WordId], score: f64, done: &mut Vec<String>) {
        let last = self.prons[p].1.len() * 3 - 1;
        let word = self.prons[p].0.clone();
        if t + 1 == self.inst.frames {
            if pos == last {
                if let Some((c, h)) = self.lm_cost(&word, hist) {
                    let lm = &self.inst.lm;
                    let eos = if lm.sentence_markers() {
                        lm.logprob(lm.eos_id().unwrap(), &h) * std::f64::consts::LN_10
                    } else {
                        0.0
                    };
                    let total = score + self.ln_adv + c + eos;
                    if self.best.as_ref().is_none_or(|b| total > b.0) {
                        let mut words = done.clone();
                        words.push(word);
                        self.best = Some((total, words));
                    }
                }
            }
            return;
        }
        let e = self.emit(p, pos, t + 1);
        self.walk(t + 1, p, pos, hist, score + self.ln_self + e, done);
        if pos < last {
            let e = self.emit(p, pos + 1, t + 1);
            self.walk(t + 1, p, pos + 1, hist, score + self.ln_adv + e, done);
        } else if let Some((c, h)) = self.lm_cost(&word, hist) {
            done.push(word);
            for q in 0..self.prons.len() {
                let e = self.emit(q, 0, t + 1);
                self.walk(t + 1, q, 0, &h, score + self.ln_adv + c + e, done);
            }
            done.pop();
        }
    }
}

pub fn assert_partition(h: &Hypothesis, frames: usize) {
    assert_eq!(h.words.len(), h.boundaries.len());
    let mut expect = 0;
    for &(s, e) in &h.boundaries {
        assert_eq!(s, expect);
        assert!(e > s);
        expect = e;
    }
    assert_eq!(expect, frames);
}

pub fn chunked(inst: &Instance, cfg: &BeamConfig, cuts: &[usize]) -> Result<Hypothesis, DecodeError> {
    let feats = inst.features();
    let rows: Vec<Vec<f64>> = feats.iter_rows().map(<[f64]>::to_vec).collect();
    let scorer: Arc<dyn AcousticScorer> = Arc::new(inst.scorer.clone());
    let mut d = IncrementalDecoder::new(Arc::new(inst.graph()), scorer, cfg.clone())?;
    let mut start = 0;
    for &c in cuts.iter().chain(std::iter::once(&rows.len())) {
        d.decode_incremental(&rows[start..c])?;
        start = c;
    }
    d.finalize()
}

pub fn pruned() -> BeamConfig {
    BeamConfig {
        beam: 8.0,
        max_active: 40,
        ..BeamConfig::default()
    }
}
