use std::collections::HashMap;

use super::DecodeError;
use crate::lexicon::{validate_lexicon, Lexicon, PhonemeInventory};
use crate::lm::{NGramModel, WordId};

pub const STATES_PER_UNIT: usize = 3;
/// ln 0.6
pub const SELF_LOOP_LOGPROB: f64 = -0.510_825_623_765_990_7;
/// ln 0.4
pub const ADVANCE_LOGPROB: f64 = -0.916_290_731_874_155;

/// One phone position in the prefix tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub unit: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Words whose pronunciation ends here.
    pub word_ends: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
struct GraphWord {
    text: String,
    lm_id: WordId,
}

/// Lexicon prefix tree with three emitting states per node. State `3n + k`
/// is HMM state `k` of node `n`; its acoustic state (pdf) is
/// `3·unit + k`, so every occurrence of a phone shares its models.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    nodes: Vec<TreeNode>,
    roots: Vec<usize>,
    words: Vec<GraphWord>,
    lm: NGramModel,
    num_units: usize,
}

impl DecodingGraph {
    pub fn build(lex: &Lexicon, inv: &PhonemeInventory, lm: &NGramModel) -> Result<Self, DecodeError> {
        if lex.is_empty() {
            return Err(DecodeError::EmptyLexicon);
        }
        let report = validate_lexicon(lex, inv);
        if !report.is_empty() {
            return Err(DecodeError::InvalidLexicon(report));
        }
        let unit_index: HashMap<&str, usize> =
            inv.units().iter().enumerate().map(|(i, u)| (u.symbol.as_str(), i)).collect();

        let mut words: Vec<GraphWord> = Vec::new();
        let mut word_index: HashMap<&str, usize> = HashMap::new();
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        let mut edges: HashMap<(Option<usize>, usize), usize> = HashMap::new();

        for e in lex.entries() {
            let w = match word_index.get(e.word.as_str()) {
                Some(&w) => w,
                None => {
                    let lm_id = lm
                        .vocab()
                        .id(&e.word)
                        .or_else(|| lm.unk_id())
                        .ok_or_else(|| DecodeError::WordMissingFromLm(e.word.clone()))?;
                    words.push(GraphWord {
                        text: e.word.clone(),
                        lm_id,
                    });
                    word_index.insert(&e.word, words.len() - 1);
                    words.len() - 1
                }
            };
            let mut parent = None;
            for sym in &e.pronunciation {
                let unit = unit_index[sym.as_str()];
                let node = *edges.entry((parent, unit)).or_insert_with(|| {
                    nodes.push(TreeNode {
                        unit,
                        parent,
                        children: Vec::new(),
                        word_ends: Vec::new(),
                    });
                    let id = nodes.len() - 1;
                    match parent {
                        Some(p) => nodes[p].children.push(id),
                        None => roots.push(id),
                    }
                    id
                });
                parent = Some(node);
            }
            let end = parent.expect("validated pronunciations are non-empty");
            if !nodes[end].word_ends.contains(&w) {
                nodes[end].word_ends.push(w);
            }
        }

        Ok(Self {
            nodes,
            roots,
            words,
            lm: lm.clone(),
            num_units: inv.len(),
        })
    }

    pub fn num_states(&self) -> usize {
        self.nodes.len() * STATES_PER_UNIT
    }

    /// Acoustic states the scorer must cover.
    pub fn num_pdfs(&self) -> usize {
        self.num_units * STATES_PER_UNIT
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Nodes entered from the root, i.e. first phones of words.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn pdf(&self, state: usize) -> usize {
        self.nodes[state / STATES_PER_UNIT].unit * STATES_PER_UNIT + state % STATES_PER_UNIT
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    pub fn word_text(&self, w: usize) -> &str {
        &self.words[w].text
    }

    pub fn word_lm_id(&self, w: usize) -> WordId {
        self.words[w].lm_id
    }

    pub fn lm(&self) -> &NGramModel {
        &self.lm
    }

    /// Units along the path from the root to `node`.
    pub fn path_units(&self, node: usize) -> Vec<usize> {
        let mut out = vec![self.nodes[node].unit];
        let mut cur = self.nodes[node].parent;
        while let Some(p) = cur {
            out.push(self.nodes[p].unit);
            cur = self.nodes[p].parent;
        }
        out.reverse();
        out
    }

    /// Successor states of `state` with their transition log-probabilities,
    /// excluding word exits. The exit probability of a phone's last state
    /// is given unchanged to every child, leaving word choice to the LM.
    pub fn successors(&self, state: usize, mut f: impl FnMut(usize, f64)) {
        f(state, SELF_LOOP_LOGPROB);
        if state % STATES_PER_UNIT + 1 < STATES_PER_UNIT {
            f(state + 1, ADVANCE_LOGPROB);
        } else {
            for &c in &self.nodes[state / STATES_PER_UNIT].children {
                f(c * STATES_PER_UNIT, ADVANCE_LOGPROB);
            }
        }
    }

    /// Words that may end in `state` (only last HMM states carry any).
    pub fn word_ends(&self, state: usize) -> &[usize] {
        if state % STATES_PER_UNIT == STATES_PER_UNIT - 1 {
            &self.nodes[state / STATES_PER_UNIT].word_ends
        } else {
            &[]
        }
    }
}
