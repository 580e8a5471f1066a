use super::{LmError, NGramModel};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SentenceScore {
    /// Total log10 probability.
    pub logprob: f64,
    /// Predicted tokens, including `</s>` when markers are on.
    pub predicted: usize,
    /// Tokens skipped because the model has no `<unk>`.
    pub oov: usize,
}

/// Scores one tokenized sentence. Out-of-vocabulary tokens map to `<unk>`;
/// if the model has none they are skipped and the history restarts.
pub fn sentence_logprob<S: AsRef<str>>(m: &NGramModel, tokens: &[S]) -> SentenceScore {
    let mut score = SentenceScore::default();
    let mut history = m.start_history();
    for t in tokens {
        match m.map_token(t.as_ref()) {
            Some(id) => {
                score.logprob += m.logprob(id, &history);
                score.predicted += 1;
                history = m.advance(&history, id);
            }
            None => {
                score.oov += 1;
                history.clear();
            }
        }
    }
    if m.sentence_markers() {
        if let Some(eos) = m.eos_id() {
            score.logprob += m.logprob(eos, &history);
            score.predicted += 1;
        }
    }
    score
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerplexityReport {
    pub perplexity: f64,
    pub logprob: f64,
    pub sentences: usize,
    pub predicted: usize,
    pub oov: usize,
}

/// `10^(-logprob / predicted)` over all non-empty lines.
pub fn perplexity<S: AsRef<str>>(m: &NGramModel, corpus: &[S]) -> Result<PerplexityReport, LmError> {
    let mut total = SentenceScore::default();
    let mut sentences = 0;
    for line in corpus {
        let tokens: Vec<&str> = line.as_ref().split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let s = sentence_logprob(m, &tokens);
        total.logprob += s.logprob;
        total.predicted += s.predicted;
        total.oov += s.oov;
        sentences += 1;
    }
    if sentences == 0 || total.predicted == 0 {
        return Err(LmError::EmptyCorpus);
    }
    Ok(PerplexityReport {
        perplexity: 10f64.powf(-total.logprob / total.predicted as f64),
        logprob: total.logprob,
        sentences,
        predicted: total.predicted,
        oov: total.oov,
    })
}
