use std::collections::HashMap;

use thiserror::Error;

use super::{FetchStatus, Query, UrlRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProviderError {
    #[error("search failed for {query:?}: {msg}")]
    Failed { query: String, msg: String },
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
}

/// A web search backend returning result URLs for a query.
pub trait SearchProvider {
    fn search(&self, query: &Query) -> Result<Vec<UrlRecord>, ProviderError>;
}

/// Canned results read from `query<TAB>url` lines. Queries without an entry
/// return nothing.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    results: HashMap<String, Vec<String>>,
}

impl FixtureProvider {
    pub fn parse(text: &str) -> Result<Self, ProviderError> {
        let mut results: HashMap<String, Vec<String>> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (q, url) = line.split_once('\t').ok_or_else(|| ProviderError::Fixture {
                line: i + 1,
                msg: "expected query<TAB>url".into(),
            })?;
            let q = q.split_whitespace().collect::<Vec<_>>().join(" ");
            results.entry(q).or_default().push(url.trim().to_string());
        }
        Ok(Self { results })
    }
}

impl SearchProvider for FixtureProvider {
    fn search(&self, query: &Query) -> Result<Vec<UrlRecord>, ProviderError> {
        let key = query.to_string();
        Ok(self
            .results
            .get(&key)
            .into_iter()
            .flatten()
            .map(|url| UrlRecord {
                url: url.clone(),
                query: key.clone(),
                status: FetchStatus::Pending,
            })
            .collect())
    }
}

/// Runs every query and concatenates the results in query order.
pub fn collect_urls<P: SearchProvider + ?Sized>(provider: &P, queries: &[Query]) -> Result<Vec<UrlRecord>, ProviderError> {
    let mut out = Vec::new();
    for q in queries {
        out.extend(provider.search(q)?);
    }
    Ok(out)
}
