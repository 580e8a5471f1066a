//! Offline web-corpus bootstrapping: frequency lists, search queries, URL
//! filtering, HTML text extraction, plus recording-manifest validation.

mod freq;
mod html;
mod manifest;
mod provider;
mod queries;
mod urls;

pub use freq::{build_frequency_list, FrequencyList};
pub use html::extract_main_text;
pub use manifest::{
    validate_manifest, CorpusManifest, Gender, ManifestError, ManifestRules, ManifestViolation, Speaker, Utterance,
};
pub use provider::{collect_urls, FixtureProvider, ProviderError, SearchProvider};
pub use queries::{generate_pair_queries, generate_single_queries, Query, QuerySet};
pub use urls::{filter_urls, FetchStatus, FilterReport, UrlFilter, UrlRecord, DEFAULT_BLOCKED_EXTENSIONS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("empty transcripts")]
    EmptyTranscripts,
    #[error("need at least 2 words for pair queries, got {0}")]
    TooFewWords(usize),
    #[error("query count must be at least 1")]
    ZeroQueries,
    #[error("top not subset: {0:?} is missing from the vocabulary")]
    TopNotSubset(String),
}
