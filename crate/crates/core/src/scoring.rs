//! Word error rate and relative improvement arithmetic.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("empty reference (pair {0})")]
    EmptyReference(usize),
    #[error("no reference/hypothesis pairs")]
    NoPairs,
    #[error("baseline WER must be positive, got {0}")]
    NonPositiveBaseline(f64),
    #[error("reference has {refs} lines but hypothesis has {hyps}")]
    LineCountMismatch { refs: usize, hyps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalResult {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_tokens: usize,
}

impl EvalResult {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// Percentage; zero for an empty reference.
    pub fn wer(&self) -> f64 {
        if self.ref_tokens == 0 {
            0.0
        } else {
            100.0 * self.errors() as f64 / self.ref_tokens as f64
        }
    }

    fn add(&mut self, o: &EvalResult) {
        self.substitutions += o.substitutions;
        self.deletions += o.deletions;
        self.insertions += o.insertions;
        self.ref_tokens += o.ref_tokens;
    }
}

/// Unit-cost Levenshtein alignment. Among minimum-cost alignments the one
/// with fewest insertions wins, then fewest deletions.
pub fn wer<S: AsRef<str>, T: AsRef<str>>(reference: &[S], hypothesis: &[T]) -> Result<EvalResult, ScoringError> {
    if reference.is_empty() {
        return Err(ScoringError::EmptyReference(0));
    }
    Ok(align(reference, hypothesis))
}

fn align<S: AsRef<str>, T: AsRef<str>>(r: &[S], h: &[T]) -> EvalResult {
    // (cost, insertions, deletions), compared lexicographically
    type Cell = (usize, usize, usize);
    let m = h.len();
    let mut prev: Vec<Cell> = (0..=m).map(|j| (j, j, 0)).collect();
    let mut cur = vec![(0, 0, 0); m + 1];
    for (i, rw) in r.iter().enumerate() {
        cur[0] = (i + 1, 0, i + 1);
        for j in 1..=m {
            let diag = prev[j - 1];
            let sub = (diag.0 + usize::from(rw.as_ref() != h[j - 1].as_ref()), diag.1, diag.2);
            let del = (prev[j].0 + 1, prev[j].1, prev[j].2 + 1);
            let ins = (cur[j - 1].0 + 1, cur[j - 1].1 + 1, cur[j - 1].2);
            cur[j] = sub.min(del).min(ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let (cost, insertions, deletions) = prev[m];
    EvalResult {
        substitutions: cost - insertions - deletions,
        deletions,
        insertions,
        ref_tokens: r.len(),
    }
}

/// Sums error counts over all pairs before dividing.
pub fn corpus_wer<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<EvalResult, ScoringError> {
    Ok(score_lines(pairs)?.1)
}

/// Per-pair results plus their aggregate. Lines are whitespace-tokenized.
pub fn score_lines<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<(Vec<EvalResult>, EvalResult), ScoringError> {
    if pairs.is_empty() {
        return Err(ScoringError::NoPairs);
    }
    let mut total = EvalResult::default();
    let mut per = Vec::with_capacity(pairs.len());
    for (i, (r, h)) in pairs.iter().enumerate() {
        let r: Vec<&str> = r.as_ref().split_whitespace().collect();
        let h: Vec<&str> = h.as_ref().split_whitespace().collect();
        if r.is_empty() {
            return Err(ScoringError::EmptyReference(i));
        }
        let e = align(&r, &h);
        total.add(&e);
        per.push(e);
    }
    Ok((per, total))
}

/// Pairs up line-aligned reference and hypothesis texts.
pub fn pair_lines<'a>(refs: &'a str, hyps: &'a str) -> Result<Vec<(&'a str, &'a str)>, ScoringError> {
    let r: Vec<&str> = refs.lines().collect();
    let h: Vec<&str> = hyps.lines().collect();
    if r.len() != h.len() {
        return Err(ScoringError::LineCountMismatch {
            refs: r.len(),
            hyps: h.len(),
        });
    }
    Ok(r.into_iter().zip(h).collect())
}

/// TSV with one row per line and a final `ALL` row.
pub fn format_tsv(per: &[EvalResult], total: &EvalResult) -> String {
    let mut out = String::from("line\tref_tokens\tsub\tdel\tins\twer\n");
    let row = |out: &mut String, label: &str, e: &EvalResult| {
        let _ = writeln!(
            out,
            "{label}\t{}\t{}\t{}\t{}\t{:.2}",
            e.ref_tokens,
            e.substitutions,
            e.deletions,
            e.insertions,
            e.wer()
        );
    };
    for (i, e) in per.iter().enumerate() {
        row(&mut out, &(i + 1).to_string(), e);
    }
    row(&mut out, "ALL", total);
    out
}

/// `100·(baseline − improved)/baseline`.
pub fn relative_reduction(baseline_wer: f64, improved_wer: f64) -> Result<f64, ScoringError> {
    if baseline_wer.is_nan() || baseline_wer <= 0.0 {
        return Err(ScoringError::NonPositiveBaseline(baseline_wer));
    }
    Ok(100.0 * (baseline_wer - improved_wer) / baseline_wer)
}

/// Rounds half away from zero at `decimals` places. A relative slack of
/// 1e-9 absorbs binary representation error at the halfway point.
pub fn round_half_up(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x.abs() * scale;
    let r = (scaled * (1.0 + 1e-9) + 0.5).floor() / scale;
    r.copysign(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn hand_cases() {
        assert_eq!(wer(&toks("a b c"), &toks("a b c")).unwrap().wer(), 0.0);
        let e = wer(&toks("a b c d"), &toks("a x c")).unwrap();
        assert_eq!((e.substitutions, e.deletions, e.insertions), (1, 1, 0));
        assert_eq!(e.wer(), 50.0);
        let e = wer(&toks("a"), &toks("")).unwrap();
        assert_eq!((e.deletions, e.wer()), (1, 100.0));
        let empty: [&str; 0] = [];
        assert_eq!(wer(&empty, &toks("a")).unwrap_err(), ScoringError::EmptyReference(0));
    }

    #[test]
    fn tie_break_prefers_substitution_over_ins_del() {
        // "a b" vs "b c": 2 substitutions or 1 deletion + 1 insertion, both cost 2
        let e = wer(&toks("a b"), &toks("b c")).unwrap();
        assert_eq!((e.substitutions, e.deletions, e.insertions), (2, 0, 0));
        let e = wer(&toks("a"), &toks("x y")).unwrap();
        assert_eq!((e.substitutions, e.deletions, e.insertions), (1, 0, 1));
    }

    #[test]
    fn corpus_sums_before_dividing() {
        let e = corpus_wer(&[("a", "b"), ("a b c", "a b c")]).unwrap();
        assert_eq!(e.wer(), 25.0);
        let none: [(&str, &str); 0] = [];
        assert_eq!(corpus_wer(&none).unwrap_err(), ScoringError::NoPairs);
        assert_eq!(corpus_wer(&[("a", "a"), ("", "x")]).unwrap_err(), ScoringError::EmptyReference(1));
    }

    #[test]
    fn relative_and_rounding() {
        let r = relative_reduction(42.8, 32.9).unwrap();
        assert!((r - 23.130841121495).abs() < 1e-9);
        assert_eq!(round_half_up(r, 1), 23.1);
        assert_eq!(round_half_up(relative_reduction(37.6, 27.3).unwrap(), 1), 27.4);
        assert_eq!(relative_reduction(7.0, 7.0).unwrap(), 0.0);
        assert!(relative_reduction(0.0, 1.0).is_err());
        assert_eq!(round_half_up(0.25, 1), 0.3);
        assert_eq!(round_half_up(-0.25, 1), -0.3);
        assert_eq!(round_half_up(2.44, 1), 2.4);
    }

    #[test]
    fn tsv_layout() {
        let (per, total) = score_lines(&[("a b", "a"), ("c", "c")]).unwrap();
        let tsv = format_tsv(&per, &total);
        assert_eq!(tsv.lines().nth(1).unwrap(), "1\t2\t0\t1\t0\t50.00");
        assert_eq!(tsv.lines().last().unwrap(), "ALL\t3\t0\t1\t0\t33.33");
        assert!(pair_lines("a\nb\n", "a\n").is_err());
    }
}
