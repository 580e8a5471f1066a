use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};

use super::pool::{DecoderPool, DispatchError, Lease};
use super::protocol::{ErrorCode, Message, MessageType, StartPayload, ENCODING_PCM16LE};
use crate::decoder::{DecodeError, IncrementalDecoder};
use crate::frontend::StreamingFrontend;

/// Frames between PARTIAL results unless configured otherwise.
pub const DEFAULT_PARTIAL_INTERVAL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    AwaitingStart,
    Streaming,
    Finalizing,
    Closed,
}

struct Active {
    lease: Lease,
    frontend: StreamingFrontend,
    decoder: IncrementalDecoder,
    /// Low byte of a sample split across AUDIO messages.
    odd_byte: Option<u8>,
}

/// Per-connection recognition state. Transport-free: feed it messages,
/// send what it returns, and close once it reports [`SessionState::Closed`].
pub struct Session {
    pool: Arc<DecoderPool>,
    partial_interval: usize,
    state: SessionState,
    id: u64,
    language: Option<String>,
    active: Option<Active>,
    created: Instant,
    last_activity: Instant,
}

impl Session {
    pub fn new(pool: Arc<DecoderPool>, partial_interval: usize) -> Self {
        let now = Instant::now();
        Self {
            pool,
            partial_interval,
            state: SessionState::AwaitingStart,
            id: 0,
            language: None,
            active: None,
            created: now,
            last_activity: now,
        }
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn created(&self) -> Instant {
        self.created
    }

    pub fn last_activity(&self) -> Instant {
        self.last_activity
    }

    pub fn is_closed(&self) -> bool {
        self.state == SessionState::Closed
    }

    /// Processes one client message and returns the replies.
    pub fn handle(&mut self, m: Message) -> Vec<Message> {
        self.last_activity = Instant::now();
        match (self.state, m.msg_type) {
            (SessionState::Closed, _) => Vec::new(),
            (SessionState::AwaitingStart, MessageType::Start) => self.start(m),
            (SessionState::AwaitingStart, t) => {
                self.id = m.session_id;
                self.fail(ErrorCode::BadStateTransition, &format!("{} before START", t.name()))
            }
            (_, _) if m.session_id != self.id => self.fail(
                ErrorCode::BadStateTransition,
                &format!("session id {} does not match {}", m.session_id, self.id),
            ),
            (SessionState::Streaming, MessageType::Audio) => self.audio(&m.payload),
            (SessionState::Streaming, MessageType::End) if m.payload.is_empty() => self.end(),
            (SessionState::Streaming, MessageType::End) => {
                self.fail(ErrorCode::MalformedPayload, "END carries no payload")
            }
            (_, t) => self.fail(
                ErrorCode::BadStateTransition,
                &format!("{} not allowed while {:?}", t.name(), self.state),
            ),
        }
    }

    /// Closes an idle session with a timeout error.
    pub fn timeout(&mut self) -> Vec<Message> {
        if self.is_closed() {
            return Vec::new();
        }
        self.fail(ErrorCode::SessionTimeout, "session idle too long")
    }

    /// Closes the session because the byte stream could not be framed.
    pub fn malformed_stream(&mut self, why: &str) -> Vec<Message> {
        if self.is_closed() {
            return Vec::new();
        }
        self.fail(ErrorCode::MalformedPayload, why)
    }

    fn start(&mut self, m: Message) -> Vec<Message> {
        self.id = m.session_id;
        let p = match StartPayload::decode(&m.payload) {
            Ok(p) => p,
            Err(e) => return self.fail(ErrorCode::MalformedPayload, &format!("START: {e}")),
        };
        if p.encoding != ENCODING_PCM16LE {
            return self.fail(
                ErrorCode::MalformedPayload,
                &format!("unsupported audio encoding 0x{:02x}", p.encoding),
            );
        }
        let lease = match self.pool.dispatch(&p.language) {
            Ok(l) => l,
            Err(e @ DispatchError::UnknownLanguage(_)) => return self.fail(ErrorCode::UnknownLanguage, &e.to_string()),
            Err(e @ DispatchError::Overloaded { .. }) => return self.fail(ErrorCode::Overloaded, &e.to_string()),
        };
        let b = lease.bundle().clone();
        let frontend = match StreamingFrontend::new(b.frontend.clone(), p.sample_rate_hz) {
            Ok(f) => f,
            Err(e) => return self.fail(ErrorCode::MalformedPayload, &e.to_string()),
        };
        let decoder = match IncrementalDecoder::new(b.graph.clone(), b.scorer.clone(), b.beam.clone()) {
            Ok(d) => d,
            Err(e) => return self.fail(ErrorCode::MalformedPayload, &e.to_string()),
        };
        info!(
            "session={} event=start lang={} rate={} active={}",
            self.id,
            p.language,
            p.sample_rate_hz,
            b.active_sessions()
        );
        self.language = Some(p.language);
        self.active = Some(Active {
            lease,
            frontend,
            decoder,
            odd_byte: None,
        });
        self.state = SessionState::Streaming;
        Vec::new()
    }

    fn audio(&mut self, bytes: &[u8]) -> Vec<Message> {
        let a = self.active.as_mut().expect("streaming sessions hold decode state");
        let mut samples = Vec::with_capacity(bytes.len() / 2 + 1);
        let mut rest = bytes;
        if let (Some(lo), Some((&hi, tail))) = (a.odd_byte, rest.split_first()) {
            samples.push(pcm16(lo, hi));
            a.odd_byte = None;
            rest = tail;
        }
        let mut pairs = rest.chunks_exact(2);
        samples.extend(pairs.by_ref().map(|c| pcm16(c[0], c[1])));
        if let [lo] = pairs.remainder() {
            a.odd_byte = Some(*lo);
        }

        let before = a.decoder.frames();
        let rows = a.frontend.push(&samples);
        let partial = match a.decoder.decode_incremental(&rows) {
            Ok(h) => h,
            Err(e) => return self.decode_failed(e),
        };
        let after = a.decoder.frames();
        let n = self.partial_interval;
        if n > 0 && after / n > before / n {
            vec![Message::new(MessageType::Partial, self.id, partial.transcript())]
        } else {
            Vec::new()
        }
    }

    fn end(&mut self) -> Vec<Message> {
        self.state = SessionState::Finalizing;
        let mut a = self.active.take().expect("streaming sessions hold decode state");
        if a.odd_byte.is_some() {
            self.active = Some(a);
            return self.fail(ErrorCode::MalformedPayload, "audio ends in the middle of a sample");
        }
        let rows = a.frontend.finish();
        let result = a.decoder.decode_incremental(&rows).and_then(|_| a.decoder.finalize());
        let transcript = match result {
            Ok(h) => h.transcript(),
            Err(DecodeError::EmptyInput) => String::new(),
            Err(DecodeError::SearchFailure) => {
                warn!("session={} event=search-failure frames={}", self.id, a.decoder.frames());
                String::new()
            }
            Err(e) => {
                self.active = Some(a);
                return self.decode_failed(e);
            }
        };
        info!(
            "session={} event=final frames={} words={} elapsed_ms={}",
            self.id,
            a.decoder.frames(),
            transcript.split_whitespace().count(),
            self.created.elapsed().as_millis()
        );
        drop(a.lease);
        self.state = SessionState::Closed;
        vec![Message::new(MessageType::Final, self.id, transcript)]
    }

    fn decode_failed(&mut self, e: DecodeError) -> Vec<Message> {
        self.fail(ErrorCode::MalformedPayload, &e.to_string())
    }

    fn fail(&mut self, code: ErrorCode, text: &str) -> Vec<Message> {
        warn!("session={} event=error code=0x{:04x} msg={text:?}", self.id, code as u16);
        self.active = None;
        self.state = SessionState::Closed;
        vec![Message::error(self.id, code, text)]
    }
}

fn pcm16(lo: u8, hi: u8) -> f32 {
    i16::from_le_bytes([lo, hi]) as f32 / 32768.0
}
