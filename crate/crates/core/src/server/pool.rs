use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::decoder::{AcousticScorer, BeamConfig, DecodingGraph};
use crate::frontend::FrontendConfig;

/// Everything needed to recognize one language. Immutable once loaded;
/// only the session counter changes.
pub struct LanguageBundle {
    pub language: String,
    pub graph: Arc<DecodingGraph>,
    pub scorer: Arc<dyn AcousticScorer>,
    pub frontend: FrontendConfig,
    pub beam: BeamConfig,
    pub max_sessions: usize,
    active: AtomicUsize,
}

impl LanguageBundle {
    pub fn new(
        language: &str,
        graph: Arc<DecodingGraph>,
        scorer: Arc<dyn AcousticScorer>,
        frontend: FrontendConfig,
        beam: BeamConfig,
        max_sessions: usize,
    ) -> Self {
        Self {
            language: language.to_string(),
            graph,
            scorer,
            frontend,
            beam,
            max_sessions,
            active: AtomicUsize::new(0),
        }
    }

    pub fn active_sessions(&self) -> usize {
        self.active.load(Ordering::SeqCst)
    }
}

impl std::fmt::Debug for LanguageBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LanguageBundle")
            .field("language", &self.language)
            .field("states", &self.graph.num_states())
            .field("max_sessions", &self.max_sessions)
            .field("active", &self.active_sessions())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispatchError {
    #[error("language {0:?} is not loaded")]
    UnknownLanguage(String),
    #[error("language {language:?} is at its limit of {max} sessions")]
    Overloaded { language: String, max: usize },
}

#[derive(Debug, Default)]
pub struct DecoderPool {
    bundles: BTreeMap<String, Arc<LanguageBundle>>,
}

impl DecoderPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the bundle for its language.
    pub fn insert(&mut self, bundle: LanguageBundle) {
        self.bundles.insert(bundle.language.clone(), Arc::new(bundle));
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.bundles.keys().map(String::as_str)
    }

    pub fn bundle(&self, language: &str) -> Option<&Arc<LanguageBundle>> {
        self.bundles.get(language)
    }

    /// Claims a session slot. Rejects rather than queues when full.
    pub fn dispatch(&self, language: &str) -> Result<Lease, DispatchError> {
        let b = self
            .bundles
            .get(language)
            .ok_or_else(|| DispatchError::UnknownLanguage(language.to_string()))?;
        b.active
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < b.max_sessions).then_some(n + 1))
            .map_err(|_| DispatchError::Overloaded {
                language: language.to_string(),
                max: b.max_sessions,
            })?;
        Ok(Lease { bundle: b.clone() })
    }
}

/// A claimed session slot, released on drop.
#[derive(Debug)]
pub struct Lease {
    bundle: Arc<LanguageBundle>,
}

impl Lease {
    pub fn bundle(&self) -> &Arc<LanguageBundle> {
        &self.bundle
    }
}

impl Drop for Lease {
    fn drop(&mut self) {
        self.bundle.active.fetch_sub(1, Ordering::SeqCst);
    }
}
