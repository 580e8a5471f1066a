use std::collections::HashSet;

use url::Url;

pub const DEFAULT_BLOCKED_EXTENSIONS: [&str; 10] = ["pdf", "ppt", "pptx", "doc", "docx", "jpg", "jpeg", "png", "gif", "zip"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FetchStatus {
    #[default]
    Pending,
    Fetched,
    Failed,
}

/// A search result: the URL and the query that returned it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlRecord {
    pub url: String,
    pub query: String,
    pub status: FetchStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlFilter {
    /// Keep only hosts equal to this or ending in `.` + this.
    pub domain_suffix: Option<String>,
    /// Lowercase extensions without the dot.
    pub blocked_extensions: Vec<String>,
}

impl Default for UrlFilter {
    fn default() -> Self {
        Self {
            domain_suffix: None,
            blocked_extensions: DEFAULT_BLOCKED_EXTENSIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl UrlFilter {
    pub fn with_domain(suffix: &str) -> Self {
        Self {
            domain_suffix: Some(suffix.trim_start_matches('.').to_ascii_lowercase()),
            ..Self::default()
        }
    }

    fn blocked(&self, url: &Url) -> bool {
        let last = url.path().rsplit('/').next().unwrap_or("");
        match last.rsplit_once('.') {
            Some((_, ext)) => {
                let ext = ext.to_ascii_lowercase();
                self.blocked_extensions.contains(&ext)
            }
            None => false,
        }
    }

    fn in_domain(&self, url: &Url) -> bool {
        let Some(suffix) = &self.domain_suffix else {
            return true;
        };
        let Some(host) = url.host_str() else {
            return false;
        };
        let host = host.trim_end_matches('.').to_ascii_lowercase();
        host == *suffix || host.ends_with(&format!(".{suffix}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterReport {
    pub kept: Vec<String>,
    pub duplicates: usize,
    pub blocked: usize,
    pub off_domain: usize,
    pub unparseable: usize,
}

/// Removes exact duplicates (first occurrence wins), URLs whose last path
/// segment has a blocked extension, and hosts outside the domain suffix.
/// Unparseable URLs are dropped and counted.
pub fn filter_urls<S: AsRef<str>>(urls: &[S], filter: &UrlFilter) -> FilterReport {
    let mut seen = HashSet::new();
    let mut report = FilterReport::default();
    for raw in urls {
        let raw = raw.as_ref();
        if !seen.insert(raw) {
            report.duplicates += 1;
            continue;
        }
        let Ok(url) = Url::parse(raw) else {
            report.unparseable += 1;
            continue;
        };
        if filter.blocked(&url) {
            report.blocked += 1;
        } else if !filter.in_domain(&url) {
            report.off_domain += 1;
        } else {
            report.kept.push(raw.to_string());
        }
    }
    report
}
