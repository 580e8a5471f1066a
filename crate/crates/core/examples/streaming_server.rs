// Starts the recognition server on a loopback port with the bundled
// Indonesian configuration and streams the fixture clip to it.

use std::io::{Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::path::Path;
use std::sync::Arc;

use seasr::frontend::wav::read_wav;
use seasr::server::{
    encode_message, ErrorPayload, FrameReader, Message, MessageType, ServerConfig, ServerHandle, ServerOptions,
    StartPayload,
};

pub fn run() -> anyhow::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bundle");
    let pool = Arc::new(ServerConfig::from_file(&root.join("server.toml"))?.load_pool()?);
    let server = ServerHandle::spawn(TcpListener::bind("127.0.0.1:0")?, pool, ServerOptions::default())?;
    println!("listening on {}", server.local_addr());

    let audio = read_wav(std::fs::File::open(root.join("id/utterance.wav"))?)?;
    let pcm: Vec<u8> = audio
        .samples()
        .iter()
        .flat_map(|&s| ((s * 32768.0).round().clamp(-32768.0, 32767.0) as i16).to_le_bytes())
        .collect();

    let session = 7;
    let mut conn = TcpStream::connect(server.local_addr())?;
    conn.write_all(&encode_message(&Message::start(session, &StartPayload::pcm16("id", 16000)))?)?;
    // 100 ms of audio per message
    for chunk in pcm.chunks(3200) {
        conn.write_all(&encode_message(&Message::new(MessageType::Audio, session, chunk.to_vec()))?)?;
    }
    conn.write_all(&encode_message(&Message::new(MessageType::End, session, vec![]))?)?;
    conn.shutdown(Shutdown::Write)?;

    let mut raw = Vec::new();
    conn.read_to_end(&mut raw)?;
    let mut reader = FrameReader::new();
    reader.push(&raw);
    while let Some(m) = reader.next_message()? {
        match m.msg_type {
            MessageType::Error => println!("ERROR {}", ErrorPayload::decode(&m.payload)?),
            t => println!("{:<7} {:?}", t.name(), String::from_utf8_lossy(&m.payload)),
        }
    }
    server.shutdown()?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
