//! Streaming recognition over TCP: SEA1 framing, a per-connection session
//! state machine, and a pool of per-language decoder bundles.

mod config;
mod net;
mod pool;
mod protocol;
mod session;

pub use config::{ConfigError, LanguageConfig, ServerConfig, DEFAULT_PORT, DEFAULT_TIMEOUT_SECS};
pub use net::{handle_connection, serve, ServerHandle, ServerOptions};
pub use pool::{DecoderPool, DispatchError, LanguageBundle, Lease};
pub use protocol::{
    decode_message, encode_message, ErrorCode, ErrorPayload, FrameError, FrameReader, Message, MessageType,
    PayloadError, StartPayload, ENCODING_PCM16LE, HEADER_LEN, MAGIC, MAX_PAYLOAD, VERSION,
};
pub use session::{Session, SessionState, DEFAULT_PARTIAL_INTERVAL};
