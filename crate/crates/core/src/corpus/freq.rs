use std::collections::HashMap;

use super::CorpusError;

/// Words ranked by count, descending, ties in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyList {
    entries: Vec<(String, u64)>,
}

impl FrequencyList {
    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        self.entries.iter().map(|(w, c)| format!("{w}\t{c}\n")).collect()
    }
}

/// Counts whitespace tokens and keeps the `k` most frequent.
pub fn build_frequency_list<S: AsRef<str>>(transcripts: &[S], k: usize) -> Result<FrequencyList, CorpusError> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for line in transcripts {
        for w in line.as_ref().split_whitespace() {
            *counts.entry(w).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(CorpusError::EmptyTranscripts);
    }
    let mut entries: Vec<(String, u64)> = counts.into_iter().map(|(w, c)| (w.to_string(), c)).collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    Ok(FrequencyList { entries })
}
