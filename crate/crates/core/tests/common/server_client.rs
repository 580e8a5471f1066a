//! Loopback client and batch reference for server tests.

use std::io::{Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use seasr::decoder::{viterbi_decode, DecodeError};
use seasr::frontend::wav::read_wav;
use seasr::frontend::{extract_features, AudioBuffer, FrontendError};
use seasr::server::*;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// The Indonesian table-scorer bundle from `fixtures/bundle`.
pub fn id_pool() -> DecoderPool {
    ServerConfig::from_file(&fixture("bundle/server.toml"))
        .unwrap()
        .load_pool()
        .unwrap()
}

pub fn fixture_pcm() -> Vec<i16> {
    let audio = read_wav(std::fs::File::open(fixture("bundle/id/utterance.wav")).unwrap()).unwrap();
    audio.samples().iter().map(|&s| (s * 32768.0).round() as i16).collect()
}

pub fn spawn(pool: Arc<DecoderPool>, opts: ServerOptions) -> ServerHandle {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    ServerHandle::spawn(listener, pool, opts).unwrap()
}

pub fn pcm_bytes(pcm: &[i16]) -> Vec<u8> {
    pcm.iter().flat_map(|s| s.to_le_bytes()).collect()
}

/// START, AUDIO in random-sized chunks, END, all written to the socket in
/// random-sized pieces.
pub fn session_bytes(id: u64, lang: &str, pcm: &[i16], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut out = encode_message(&Message::start(id, &StartPayload::pcm16(lang, 16000))).unwrap();
    let bytes = pcm_bytes(pcm);
    let mut i = 0;
    while i < bytes.len() {
        let n = rng.gen_range(1..=4000).min(bytes.len() - i);
        out.extend(encode_message(&Message::new(MessageType::Audio, id, bytes[i..i + n].to_vec())).unwrap());
        i += n;
    }
    out.extend(encode_message(&Message::new(MessageType::End, id, vec![])).unwrap());
    out
}

pub fn write_split(stream: &mut TcpStream, bytes: &[u8], rng: &mut ChaCha8Rng) -> std::io::Result<()> {
    let mut i = 0;
    while i < bytes.len() {
        let n = rng.gen_range(1..=3000).min(bytes.len() - i);
        stream.write_all(&bytes[i..i + n])?;
        i += n;
    }
    Ok(())
}

/// Everything the server sent until it closed, plus any framing error in
/// its output.
pub fn read_replies(stream: &mut TcpStream) -> (Vec<Message>, Option<FrameError>) {
    stream.set_read_timeout(Some(Duration::from_secs(120))).unwrap();
    let mut raw = Vec::new();
    let _ = stream.read_to_end(&mut raw);
    let mut reader = FrameReader::new();
    reader.push(&raw);
    let mut msgs = Vec::new();
    loop {
        match reader.next_message() {
            Ok(Some(m)) => msgs.push(m),
            Ok(None) if reader.buffered() == 0 => return (msgs, None),
            Ok(None) => {
                return (
                    msgs,
                    Some(FrameError::Incomplete {
                        needed: reader.buffered(),
                    }),
                )
            }
            Err(e) => return (msgs, Some(e)),
        }
    }
}

pub fn run_session(addr: SocketAddr, id: u64, lang: &str, pcm: &[i16], rng: &mut ChaCha8Rng) -> Vec<Message> {
    let mut s = TcpStream::connect(addr).unwrap();
    let bytes = session_bytes(id, lang, pcm, rng);
    write_split(&mut s, &bytes, rng).unwrap();
    let _ = s.shutdown(Shutdown::Write);
    let (msgs, err) = read_replies(&mut s);
    assert_eq!(err, None);
    msgs
}

/// FINAL text, or the error the session ended with.
pub fn outcome(msgs: &[Message]) -> Result<String, ErrorPayload> {
    let last = msgs.last().expect("server sent nothing");
    match last.msg_type {
        MessageType::Final => Ok(String::from_utf8(last.payload.clone()).unwrap()),
        MessageType::Error => Err(ErrorPayload::decode(&last.payload).unwrap()),
        t => panic!("session ended with {t:?}"),
    }
}

/// Offline pipeline on the whole signal, with the server's conventions for
/// audio too short to yield a frame and for failed searches.
pub fn batch_transcript(bundle: &LanguageBundle, pcm: &[i16]) -> String {
    if pcm.is_empty() {
        return String::new();
    }
    let audio = AudioBuffer::from_pcm16(pcm, 16000).unwrap();
    let feats = match extract_features(&audio, &bundle.frontend) {
        Ok(f) => f,
        Err(FrontendError::TooShort { .. }) => return String::new(),
        Err(e) => panic!("batch features: {e}"),
    };
    match viterbi_decode(&feats, &bundle.graph, bundle.scorer.as_ref(), &bundle.beam) {
        Ok(h) => h.transcript(),
        Err(DecodeError::SearchFailure | DecodeError::EmptyInput) => String::new(),
        Err(e) => panic!("batch decode: {e}"),
    }
}
