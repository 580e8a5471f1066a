//! SEA1 wire framing.
//!
//! ```text
//! "SEA1" | version u8 | type u8 | reserved [0; 2] | session u64 BE | len u32 BE | payload
//! ```

use std::fmt;

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"SEA1";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 20;
pub const MAX_PAYLOAD: usize = 16 * 1024 * 1024;
/// Encoding tag for 16-bit little-endian PCM.
pub const ENCODING_PCM16LE: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MessageType {
    Start = 0x01,
    Audio = 0x02,
    End = 0x03,
    Partial = 0x04,
    Final = 0x05,
    Error = 0x06,
}

impl MessageType {
    pub const ALL: [MessageType; 6] = [
        Self::Start,
        Self::Audio,
        Self::End,
        Self::Partial,
        Self::Final,
        Self::Error,
    ];

    pub fn from_u8(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Start => "START",
            Self::Audio => "AUDIO",
            Self::End => "END",
            Self::Partial => "PARTIAL",
            Self::Final => "FINAL",
            Self::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub msg_type: MessageType,
    pub session_id: u64,
    pub payload: Vec<u8>,
}

impl Message {
    pub fn new(msg_type: MessageType, session_id: u64, payload: impl Into<Vec<u8>>) -> Self {
        Self {
            msg_type,
            session_id,
            payload: payload.into(),
        }
    }

    pub fn start(session_id: u64, p: &StartPayload) -> Self {
        Self::new(MessageType::Start, session_id, p.encode())
    }

    pub fn error(session_id: u64, code: ErrorCode, text: &str) -> Self {
        Self::new(MessageType::Error, session_id, ErrorPayload::new(code, text).encode())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    /// Not fatal: the buffer holds a valid prefix of a frame.
    #[error("incomplete frame: need {needed} more bytes")]
    Incomplete { needed: usize },
    #[error("bad magic {0:02x?}")]
    BadMagic(Vec<u8>),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown message type 0x{0:02x}")]
    UnknownType(u8),
    #[error("payload of {0} bytes exceeds the 16 MiB cap")]
    PayloadTooLarge(usize),
}

impl FrameError {
    pub fn is_incomplete(&self) -> bool {
        matches!(self, Self::Incomplete { .. })
    }
}

pub fn encode_message(m: &Message) -> Result<Vec<u8>, FrameError> {
    if m.payload.len() > MAX_PAYLOAD {
        return Err(FrameError::PayloadTooLarge(m.payload.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + m.payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(m.msg_type as u8);
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&m.session_id.to_be_bytes());
    out.extend_from_slice(&(m.payload.len() as u32).to_be_bytes());
    out.extend_from_slice(&m.payload);
    Ok(out)
}

/// Decodes one frame from the front of `buf`, returning the unread rest.
///
/// Header fields are checked as soon as their bytes arrive, so garbage is
/// rejected without waiting for a full header.
pub fn decode_message(buf: &[u8]) -> Result<(Message, &[u8]), FrameError> {
    let seen = buf.len().min(MAGIC.len());
    if buf[..seen] != MAGIC[..seen] {
        return Err(FrameError::BadMagic(buf[..seen].to_vec()));
    }
    if let Some(&v) = buf.get(4) {
        if v != VERSION {
            return Err(FrameError::UnsupportedVersion(v));
        }
    }
    let msg_type = match buf.get(5) {
        Some(&t) => Some(MessageType::from_u8(t).ok_or(FrameError::UnknownType(t))?),
        None => None,
    };
    if buf.len() < HEADER_LEN {
        return Err(FrameError::Incomplete {
            needed: HEADER_LEN - buf.len(),
        });
    }
    let msg_type = msg_type.expect("header is complete");
    let session_id = u64::from_be_bytes(buf[8..16].try_into().unwrap());
    let len = u32::from_be_bytes(buf[16..20].try_into().unwrap()) as usize;
    if len > MAX_PAYLOAD {
        return Err(FrameError::PayloadTooLarge(len));
    }
    let total = HEADER_LEN + len;
    if buf.len() < total {
        return Err(FrameError::Incomplete {
            needed: total - buf.len(),
        });
    }
    let m = Message {
        msg_type,
        session_id,
        payload: buf[HEADER_LEN..total].to_vec(),
    };
    Ok((m, &buf[total..]))
}

/// Reassembles frames from arbitrarily split reads.
#[derive(Debug, Default)]
pub struct FrameReader {
    buf: Vec<u8>,
}

impl FrameReader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Next complete frame, `Ok(None)` when more bytes are needed. After a
    /// fatal error the stream cannot be resynchronized.
    pub fn next_message(&mut self) -> Result<Option<Message>, FrameError> {
        if self.buf.is_empty() {
            return Ok(None);
        }
        match decode_message(&self.buf) {
            Ok((m, rest)) => {
                let used = self.buf.len() - rest.len();
                self.buf.drain(..used);
                Ok(Some(m))
            }
            Err(e) if e.is_incomplete() => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum ErrorCode {
    UnknownLanguage = 0x0001,
    BadStateTransition = 0x0002,
    MalformedPayload = 0x0003,
    Overloaded = 0x0004,
    SessionTimeout = 0x0005,
}

impl ErrorCode {
    pub fn from_u16(c: u16) -> Option<Self> {
        use ErrorCode::*;
        [UnknownLanguage, BadStateTransition, MalformedPayload, Overloaded, SessionTimeout]
            .into_iter()
            .find(|e| *e as u16 == c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("payload truncated")]
    Truncated,
    #[error("{0} trailing bytes after payload")]
    Trailing(usize),
    #[error("text is not valid UTF-8")]
    BadUtf8,
    #[error("unknown error code 0x{0:04x}")]
    UnknownCode(u16),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartPayload {
    pub language: String,
    pub sample_rate_hz: u32,
    pub encoding: u8,
}

impl StartPayload {
    pub fn pcm16(language: &str, sample_rate_hz: u32) -> Self {
        Self {
            language: language.to_string(),
            sample_rate_hz,
            encoding: ENCODING_PCM16LE,
        }
    }

    /// Panics if the language code is longer than 255 bytes.
    pub fn encode(&self) -> Vec<u8> {
        let lang = self.language.as_bytes();
        let n = u8::try_from(lang.len()).expect("language code longer than 255 bytes");
        let mut out = vec![n];
        out.extend_from_slice(lang);
        out.extend_from_slice(&self.sample_rate_hz.to_be_bytes());
        out.push(self.encoding);
        out
    }

    pub fn decode(p: &[u8]) -> Result<Self, PayloadError> {
        let n = *p.first().ok_or(PayloadError::Truncated)? as usize;
        let want = 1 + n + 4 + 1;
        if p.len() < want {
            return Err(PayloadError::Truncated);
        }
        if p.len() > want {
            return Err(PayloadError::Trailing(p.len() - want));
        }
        let language = std::str::from_utf8(&p[1..1 + n]).map_err(|_| PayloadError::BadUtf8)?;
        Ok(Self {
            language: language.to_string(),
            sample_rate_hz: u32::from_be_bytes(p[1 + n..5 + n].try_into().unwrap()),
            encoding: p[5 + n],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPayload {
    pub code: ErrorCode,
    pub text: String,
}

impl fmt::Display for ErrorPayload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:04x} {:?}: {}", self.code as u16, self.code, self.text)
    }
}

impl ErrorPayload {
    pub fn new(code: ErrorCode, text: &str) -> Self {
        Self {
            code,
            text: text.to_string(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = (self.code as u16).to_be_bytes().to_vec();
        out.extend_from_slice(self.text.as_bytes());
        out
    }

    pub fn decode(p: &[u8]) -> Result<Self, PayloadError> {
        if p.len() < 2 {
            return Err(PayloadError::Truncated);
        }
        let raw = u16::from_be_bytes([p[0], p[1]]);
        let code = ErrorCode::from_u16(raw).ok_or(PayloadError::UnknownCode(raw))?;
        let text = std::str::from_utf8(&p[2..]).map_err(|_| PayloadError::BadUtf8)?;
        Ok(Self::new(code, text))
    }
}
