use super::{LexiconError, PhonemeInventory};

/// One rewrite rule. `left`/`right` are literal context strings that must
/// precede/follow the grapheme; `^` and `$` anchor to the word edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2PRule {
    pub grapheme: String,
    pub phonemes: Vec<String>,
    pub left: Option<String>,
    pub right: Option<String>,
}

impl G2PRule {
    pub fn new(grapheme: &str, phonemes: &[&str]) -> Self {
        Self {
            grapheme: grapheme.to_string(),
            phonemes: phonemes.iter().map(|p| p.to_string()).collect(),
            left: None,
            right: None,
        }
    }

    fn matches(&self, word: &[char], at: usize) -> Option<usize> {
        let g: Vec<char> = self.grapheme.chars().collect();
        let end = at + g.len();
        if end > word.len() || word[at..end] != g[..] {
            return None;
        }
        if let Some(left) = &self.left {
            let (anchored, lit) = match left.strip_prefix('^') {
                Some(rest) => (true, rest),
                None => (false, left.as_str()),
            };
            let lit: Vec<char> = lit.chars().collect();
            if lit.len() > at || word[at - lit.len()..at] != lit[..] || (anchored && at != lit.len()) {
                return None;
            }
        }
        if let Some(right) = &self.right {
            let (anchored, lit) = match right.strip_suffix('$') {
                Some(rest) => (true, rest),
                None => (false, right.as_str()),
            };
            let lit: Vec<char> = lit.chars().collect();
            let stop = end + lit.len();
            if stop > word.len() || word[end..stop] != lit[..] || (anchored && stop != word.len()) {
                return None;
            }
        }
        Some(g.len())
    }
}

/// Ordered rules; order breaks ties between equally long matches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct G2PRuleSet {
    rules: Vec<G2PRule>,
}

impl G2PRuleSet {
    pub fn new(rules: Vec<G2PRule>) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &[G2PRule] {
        &self.rules
    }

    /// `grapheme<TAB>phonemes[<TAB>left[<TAB>right]]`; phonemes are
    /// space-separated, `-` for a silent grapheme, and `-` also leaves a
    /// context unset.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim_start().starts_with('#') || raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if !(2..=4).contains(&fields.len()) || fields[0].is_empty() {
                return Err(LexiconError::Malformed {
                    line: i + 1,
                    msg: "expected grapheme<TAB>phonemes[<TAB>left[<TAB>right]]".into(),
                });
            }
            let ctx = |k: usize| {
                fields
                    .get(k)
                    .map(|s| s.trim())
                    .filter(|s| !s.is_empty() && *s != "-")
                    .map(str::to_string)
            };
            let out = fields[1].trim();
            rules.push(G2PRule {
                grapheme: fields[0].to_string(),
                phonemes: if out == "-" {
                    Vec::new()
                } else {
                    out.split_whitespace().map(str::to_string).collect()
                },
                left: ctx(2),
                right: ctx(3),
            });
        }
        Ok(Self { rules })
    }

    /// Every output symbol must belong to `inv`.
    pub fn validate(&self, inv: &PhonemeInventory) -> Result<(), LexiconError> {
        for (i, r) in self.rules.iter().enumerate() {
            if let Some(p) = r.phonemes.iter().find(|p| !inv.contains(p)) {
                return Err(LexiconError::RuleSymbolNotInInventory {
                    rule: i,
                    symbol: p.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Leftmost-longest rewriting, left to right. Positions are in characters.
pub fn apply_g2p(word: &str, rules: &G2PRuleSet) -> Result<Vec<String>, LexiconError> {
    if word.is_empty() {
        return Err(LexiconError::EmptyWord);
    }
    let chars: Vec<char> = word.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let mut best: Option<(usize, &G2PRule)> = None;
        for rule in &rules.rules {
            if let Some(len) = rule.matches(&chars, pos) {
                if best.is_none_or(|(l, _)| len > l) {
                    best = Some((len, rule));
                }
            }
        }
        let Some((len, rule)) = best.filter(|(len, _)| *len > 0) else {
            return Err(LexiconError::UnmatchedGrapheme {
                position: pos,
                ch: chars[pos],
            });
        };
        out.extend(rule.phonemes.iter().cloned());
        pos += len;
    }
    Ok(out)
}
