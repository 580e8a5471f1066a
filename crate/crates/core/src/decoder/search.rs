use std::collections::HashMap;
use std::sync::Arc;

use super::graph::{ADVANCE_LOGPROB, STATES_PER_UNIT};
use super::{AcousticScorer, BeamConfig, DecodeError, DecodingGraph, Hypothesis};
use crate::frontend::FeatureMatrix;
use crate::lm::WordId;

const NO_LINK: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Token {
    state: u32,
    hist: u32,
    score: f64,
    link: u32,
}

/// A completed word on some path: `word` ended at frame `end` (exclusive).
#[derive(Debug, Clone, Copy)]
struct WordLink {
    word: u32,
    prev: u32,
    end: u32,
}

/// Token-passing Viterbi state. Holds no references so it can live inside
/// a streaming session; the graph and scorer are passed to each call.
#[derive(Debug, Clone)]
struct SearchCore {
    cfg: BeamConfig,
    frames: usize,
    /// Active tokens sorted by (state, hist).
    tokens: Vec<Token>,
    links: Vec<WordLink>,
    histories: Vec<Vec<WordId>>,
    history_ids: HashMap<Vec<WordId>, u32>,
    /// (hist, word) → (scaled LM score + penalty, next hist); `None` when
    /// the LM gives the word zero probability.
    word_cache: HashMap<(u32, u32), Option<(f64, u32)>>,
}

impl SearchCore {
    fn new(g: &DecodingGraph, cfg: BeamConfig) -> Self {
        let mut core = Self {
            cfg,
            frames: 0,
            tokens: Vec::new(),
            links: Vec::new(),
            histories: Vec::new(),
            history_ids: HashMap::new(),
            word_cache: HashMap::new(),
        };
        core.intern(g.lm().start_history());
        core
    }

    fn intern(&mut self, h: Vec<WordId>) -> u32 {
        if let Some(&id) = self.history_ids.get(&h) {
            return id;
        }
        let id = self.histories.len() as u32;
        self.histories.push(h.clone());
        self.history_ids.insert(h, id);
        id
    }

    fn lm_term(&self, logprob10: f64) -> f64 {
        self.cfg.lm_scale * std::f64::consts::LN_10 * logprob10
    }

    fn word_step(&mut self, g: &DecodingGraph, hist: u32, word: usize) -> Option<(f64, u32)> {
        if let Some(&hit) = self.word_cache.get(&(hist, word as u32)) {
            return hit;
        }
        let lm = g.lm();
        let id = g.word_lm_id(word);
        let lp = lm.logprob(id, &self.histories[hist as usize]);
        let out = if lp.is_finite() {
            let next = lm.advance(&self.histories[hist as usize], id);
            Some((self.lm_term(lp) + self.cfg.word_insertion_penalty, self.intern(next)))
        } else {
            None
        };
        self.word_cache.insert((hist, word as u32), out);
        out
    }

    fn step(&mut self, g: &DecodingGraph, s: &dyn AcousticScorer, row: &[f64]) {
        let t = self.frames;
        let mut next: HashMap<(u32, u32), Token> = HashMap::new();
        fn relax(next: &mut HashMap<(u32, u32), Token>, tok: Token) -> bool {
            match next.get_mut(&(tok.state, tok.hist)) {
                Some(cur) if tok.score > cur.score => {
                    *cur = tok;
                    true
                }
                Some(_) => false,
                None => {
                    next.insert((tok.state, tok.hist), tok);
                    true
                }
            }
        }

        if t == 0 {
            for &r in g.roots() {
                let tok = Token {
                    state: (r * STATES_PER_UNIT) as u32,
                    hist: 0,
                    score: 0.0,
                    link: NO_LINK,
                };
                relax(&mut next, tok);
            }
        } else {
            let tokens = std::mem::take(&mut self.tokens);
            for tok in &tokens {
                g.successors(tok.state as usize, |ns, lp| {
                    relax(
                        &mut next,
                        Token {
                            state: ns as u32,
                            score: tok.score + lp,
                            ..*tok
                        },
                    );
                });
                for &w in g.word_ends(tok.state as usize) {
                    let Some((cost, nh)) = self.word_step(g, tok.hist, w) else {
                        continue;
                    };
                    let link = self.links.len() as u32;
                    self.links.push(WordLink {
                        word: w as u32,
                        prev: tok.link,
                        end: t as u32,
                    });
                    let mut used = false;
                    for &r in g.roots() {
                        used |= relax(
                            &mut next,
                            Token {
                                state: (r * STATES_PER_UNIT) as u32,
                                hist: nh,
                                score: tok.score + ADVANCE_LOGPROB + cost,
                                link,
                            },
                        );
                    }
                    if !used {
                        self.links.pop();
                    }
                }
            }
        }

        let mut emissions: HashMap<usize, f64> = HashMap::new();
        let mut tokens: Vec<Token> = next.into_values().collect();
        for tok in &mut tokens {
            let pdf = g.pdf(tok.state as usize);
            tok.score += *emissions.entry(pdf).or_insert_with(|| s.score(pdf, t, row));
        }
        tokens.sort_unstable_by_key(|tok| (tok.state, tok.hist));
        self.tokens = self.prune(tokens);
        self.frames += 1;
    }

    fn prune(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        let best = tokens.iter().map(|t| t.score).fold(f64::NEG_INFINITY, f64::max);
        let floor = best - self.cfg.beam;
        tokens.retain(|t| t.score >= floor);
        if tokens.len() > self.cfg.max_active {
            tokens.sort_by(|a, b| b.score.total_cmp(&a.score).then((a.state, a.hist).cmp(&(b.state, b.hist))));
            tokens.truncate(self.cfg.max_active);
            tokens.sort_unstable_by_key(|tok| (tok.state, tok.hist));
        }
        tokens
    }

    fn trace(&self, g: &DecodingGraph, mut link: u32) -> (Vec<String>, Vec<(usize, usize)>) {
        let mut rev = Vec::new();
        while link != NO_LINK {
            let l = self.links[link as usize];
            rev.push(l);
            link = l.prev;
        }
        let mut words = Vec::with_capacity(rev.len());
        let mut bounds = Vec::with_capacity(rev.len());
        let mut start = 0;
        for l in rev.into_iter().rev() {
            words.push(g.word_text(l.word as usize).to_string());
            bounds.push((start, l.end as usize));
            start = l.end as usize;
        }
        (words, bounds)
    }

    /// Best path so far, reporting only completed words.
    fn partial(&self, g: &DecodingGraph) -> Hypothesis {
        let mut best: Option<&Token> = None;
        for tok in &self.tokens {
            if best.is_none_or(|b| tok.score > b.score) {
                best = Some(tok);
            }
        }
        match best {
            Some(tok) => {
                let (words, boundaries) = self.trace(g, tok.link);
                Hypothesis {
                    words,
                    score: tok.score,
                    boundaries,
                }
            }
            None => Hypothesis::default(),
        }
    }

    fn finish(&mut self, g: &DecodingGraph) -> Result<Hypothesis, DecodeError> {
        if self.frames == 0 {
            return Err(DecodeError::EmptyInput);
        }
        let lm = g.lm();
        let eos = if lm.sentence_markers() { lm.eos_id() } else { None };
        let mut best: Option<(f64, u32, usize)> = None;
        let tokens = std::mem::take(&mut self.tokens);
        for tok in &tokens {
            for &w in g.word_ends(tok.state as usize) {
                let Some((cost, nh)) = self.word_step(g, tok.hist, w) else {
                    continue;
                };
                let mut total = tok.score + ADVANCE_LOGPROB + cost;
                if let Some(eos) = eos {
                    total += self.lm_term(lm.logprob(eos, &self.histories[nh as usize]));
                }
                if total.is_finite() && best.is_none_or(|b| total > b.0) {
                    best = Some((total, tok.link, w));
                }
            }
        }
        self.tokens = tokens;
        let (score, link, w) = best.ok_or(DecodeError::SearchFailure)?;
        let (mut words, mut boundaries) = self.trace(g, link);
        let start = boundaries.last().map_or(0, |b| b.1);
        words.push(g.word_text(w).to_string());
        boundaries.push((start, self.frames));
        Ok(Hypothesis {
            words,
            score,
            boundaries,
        })
    }
}

fn check_setup(g: &DecodingGraph, s: &dyn AcousticScorer, cfg: &BeamConfig) -> Result<(), DecodeError> {
    cfg.validate()?;
    if let Some(n) = s.num_pdfs() {
        if n < g.num_pdfs() {
            return Err(DecodeError::ScorerMismatch {
                scorer: n,
                graph: g.num_pdfs(),
            });
        }
    }
    Ok(())
}

fn check_width(s: &dyn AcousticScorer, width: usize) -> Result<(), DecodeError> {
    match s.dim() {
        Some(d) if d != width => Err(DecodeError::WidthMismatch {
            got: width,
            expected: d,
        }),
        _ => Ok(()),
    }
}

/// Decodes a whole utterance.
pub fn viterbi_decode(
    features: &FeatureMatrix,
    g: &DecodingGraph,
    s: &dyn AcousticScorer,
    cfg: &BeamConfig,
) -> Result<Hypothesis, DecodeError> {
    check_setup(g, s, cfg)?;
    if features.is_empty() {
        return Err(DecodeError::EmptyInput);
    }
    check_width(s, features.width())?;
    let mut core = SearchCore::new(g, cfg.clone());
    for row in features.iter_rows() {
        core.step(g, s, row);
    }
    core.finish(g)
}

/// Streaming decoder. Feeding rows in any chunking and then calling
/// [`finalize`](Self::finalize) gives exactly the batch result.
pub struct IncrementalDecoder {
    graph: Arc<DecodingGraph>,
    scorer: Arc<dyn AcousticScorer>,
    core: SearchCore,
    width: Option<usize>,
    finalized: bool,
}

impl IncrementalDecoder {
    pub fn new(graph: Arc<DecodingGraph>, scorer: Arc<dyn AcousticScorer>, cfg: BeamConfig) -> Result<Self, DecodeError> {
        check_setup(&graph, scorer.as_ref(), &cfg)?;
        let core = SearchCore::new(&graph, cfg);
        Ok(Self {
            width: scorer.dim(),
            graph,
            scorer,
            core,
            finalized: false,
        })
    }

    /// Consumes rows in order and returns the current partial hypothesis.
    pub fn decode_incremental<R: AsRef<[f64]>>(&mut self, rows: &[R]) -> Result<Hypothesis, DecodeError> {
        if self.finalized {
            return Err(DecodeError::Finalized);
        }
        for row in rows {
            let row = row.as_ref();
            let expected = *self.width.get_or_insert(row.len());
            if row.len() != expected {
                return Err(DecodeError::WidthMismatch {
                    got: row.len(),
                    expected,
                });
            }
            self.core.step(&self.graph, self.scorer.as_ref(), row);
        }
        Ok(self.partial())
    }

    pub fn partial(&self) -> Hypothesis {
        self.core.partial(&self.graph)
    }

    pub fn frames(&self) -> usize {
        self.core.frames
    }

    pub fn finalize(&mut self) -> Result<Hypothesis, DecodeError> {
        if self.finalized {
            return Err(DecodeError::Finalized);
        }
        self.finalized = true;
        self.core.finish(&self.graph)
    }
}
