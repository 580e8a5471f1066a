mod common;

use std::io::Write;
use std::net::{Shutdown, TcpStream};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::server_client::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seasr::decoder::{BeamConfig, DiagonalGaussianScorer};
use seasr::frontend::{extract_features, AudioBuffer};
use seasr::server::*;

fn parse_type(s: &str) -> MessageType {
    MessageType::ALL.into_iter().find(|t| t.name() == s).unwrap()
}

fn hex(s: &str) -> Vec<u8> {
    (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap()).collect()
}

#[test]
fn golden_frames_decode_and_reencode() {
    let index = std::fs::read_to_string(fixture("frames/frames.tsv")).unwrap();
    let mut seen = 0;
    for line in index.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split('\t').collect();
        let bytes = std::fs::read(fixture(&format!("frames/{}", f[0]))).unwrap();
        let want = Message::new(parse_type(f[1]), f[2].parse().unwrap(), hex(f[3]));
        let (got, rest) = decode_message(&bytes).unwrap();
        assert_eq!(got, want, "{}", f[0]);
        assert!(rest.is_empty());
        assert_eq!(encode_message(&want).unwrap(), bytes, "{}", f[0]);
        assert!(decode_message(&bytes[..bytes.len() - 1]).unwrap_err().is_incomplete());
        match want.msg_type {
            MessageType::Start => assert_eq!(StartPayload::decode(&got.payload).unwrap().sample_rate_hz, 16000),
            MessageType::Error => {
                ErrorPayload::decode(&got.payload).unwrap();
            }
            _ => {}
        }
        seen += 1;
    }
    assert_eq!(seen, 10);

    let th = std::fs::read(fixture("frames/start_th.bin")).unwrap();
    assert_eq!(&th[..16], b"SEA1\x01\x01\x00\x00\x00\x00\x00\x00\x00\x00\x00\x01");
    assert_eq!(StartPayload::decode(&th[20..]).unwrap(), StartPayload::pcm16("th", 16000));
}

fn random_message(rng: &mut ChaCha8Rng) -> Message {
    let t = MessageType::ALL[rng.gen_range(0..6)];
    let len = match rng.gen_range(0..10) {
        0 => 0,
        1 => rng.gen_range(1000..20_000),
        _ => rng.gen_range(0..64),
    };
    Message::new(t, rng.gen(), (0..len).map(|_| rng.gen()).collect::<Vec<u8>>())
}

#[test]
fn ten_thousand_messages_survive_random_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8722);
    let msgs: Vec<Message> = (0..10_000).map(|_| random_message(&mut rng)).collect();
    let stream: Vec<u8> = msgs.iter().flat_map(|m| encode_message(m).unwrap()).collect();
    let mut reader = FrameReader::new();
    let mut got = Vec::with_capacity(msgs.len());
    let mut i = 0;
    while i < stream.len() {
        let n = rng.gen_range(1..=2 * HEADER_LEN + 100).min(stream.len() - i);
        reader.push(&stream[i..i + n]);
        i += n;
        while let Some(m) = reader.next_message().unwrap() {
            got.push(m);
        }
    }
    assert_eq!(reader.buffered(), 0);
    assert_eq!(got, msgs);
}

#[test]
fn fixture_wav_streams_to_fixture_transcript() {
    let pool = Arc::new(id_pool());
    let server = spawn(pool.clone(), ServerOptions::default());
    let pcm = fixture_pcm();
    let msgs = run_session(server.local_addr(), 42, "id", &pcm, &mut ChaCha8Rng::seed_from_u64(1));
    let want = std::fs::read_to_string(fixture("bundle/id/transcript.txt")).unwrap();
    assert_eq!(outcome(&msgs).unwrap(), want.trim());
    assert_eq!(outcome(&msgs).unwrap(), batch_transcript(pool.bundle("id").unwrap(), &pcm));
    // 118 frames: partials after frames 50 and 100, then the final
    let types: Vec<MessageType> = msgs.iter().map(|m| m.msg_type).collect();
    assert_eq!(types, [MessageType::Partial, MessageType::Partial, MessageType::Final]);
    assert!(msgs.iter().all(|m| m.session_id == 42));
}

#[test]
fn empty_audio_gets_empty_final() {
    let server = spawn(Arc::new(id_pool()), ServerOptions::default());
    let msgs = run_session(server.local_addr(), 1, "id", &[], &mut ChaCha8Rng::seed_from_u64(2));
    assert_eq!(msgs, [Message::new(MessageType::Final, 1, "")]);
}

/// Bundle whose scores depend on the audio: one Gaussian per acoustic
/// state, centred on a random frame of the fixture utterance.
fn gaussian_pool(seed: u64) -> Arc<DecoderPool> {
    let base = id_pool();
    let b = base.bundle("id").unwrap();
    let audio = AudioBuffer::from_pcm16(&fixture_pcm(), 16000).unwrap();
    let feats = extract_features(&audio, &b.frontend).unwrap();
    let width = feats.width();
    let mean: Vec<f64> = (0..width).map(|d| feats.iter_rows().map(|r| r[d]).sum::<f64>() / feats.rows() as f64).collect();
    let var: Vec<f64> = (0..width)
        .map(|d| feats.iter_rows().map(|r| (r[d] - mean[d]).powi(2)).sum::<f64>() / feats.rows() as f64 + 1e-3)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = b.graph.num_pdfs();
    let means = (0..n).map(|_| feats.row(rng.gen_range(0..feats.rows())).to_vec()).collect();
    let scorer = DiagonalGaussianScorer::new(means, vec![var; n]).unwrap();
    let mut pool = DecoderPool::new();
    pool.insert(LanguageBundle::new(
        "id",
        b.graph.clone(),
        Arc::new(scorer),
        b.frontend.clone(),
        BeamConfig::default(),
        64,
    ));
    Arc::new(pool)
}

#[test]
fn concurrent_feature_driven_sessions_match_batch() {
    let pool = gaussian_pool(5);
    let server = spawn(pool.clone(), ServerOptions::default());
    let base = fixture_pcm();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let clips: Vec<Vec<i16>> = (0..12)
        .map(|_| {
            let len = rng.gen_range(4000..base.len());
            let off = rng.gen_range(0..base.len() - len);
            let gain = rng.gen_range(0.2..1.5);
            base[off..off + len]
                .iter()
                .map(|&s| (s as f64 * gain + rng.gen_range(-200.0..200.0)).clamp(-32768.0, 32767.0) as i16)
                .collect()
        })
        .collect();
    let addr = server.local_addr();
    let got: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = clips
            .iter()
            .enumerate()
            .map(|(i, pcm)| {
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
                    outcome(&run_session(addr, i as u64, "id", pcm, &mut rng)).unwrap()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let bundle = pool.bundle("id").unwrap();
    let want: Vec<String> = clips.iter().map(|c| batch_transcript(bundle, c)).collect();
    assert_eq!(got, want);
    let mut distinct = want.clone();
    distinct.sort();
    distinct.dedup();
    assert!(distinct.len() > 3, "clips should decode differently: {want:?}");
}

fn error_code(msgs: &[Message]) -> ErrorCode {
    outcome(msgs).unwrap_err().code
}

fn send_and_collect(addr: std::net::SocketAddr, msgs: &[Message]) -> Vec<Message> {
    let mut s = TcpStream::connect(addr).unwrap();
    for m in msgs {
        s.write_all(&encode_message(m).unwrap()).unwrap();
    }
    let _ = s.shutdown(Shutdown::Write);
    let (replies, err) = read_replies(&mut s);
    assert_eq!(err, None);
    replies
}

#[test]
fn protocol_errors_over_the_socket() {
    let server = spawn(Arc::new(id_pool()), ServerOptions::default());
    let addr = server.local_addr();
    let r = send_and_collect(addr, &[Message::start(9, &StartPayload::pcm16("xx", 16000))]);
    assert_eq!(error_code(&r), ErrorCode::UnknownLanguage);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].session_id, 9);

    let r = send_and_collect(addr, &[Message::new(MessageType::Audio, 3, vec![0; 10])]);
    assert_eq!(error_code(&r), ErrorCode::BadStateTransition);

    let mut s = TcpStream::connect(addr).unwrap();
    s.write_all(b"GET / HTTP/1.1\r\n\r\n").unwrap();
    let (r, _) = read_replies(&mut s);
    assert_eq!(error_code(&r), ErrorCode::MalformedPayload);
}

#[test]
fn second_session_over_cap_is_rejected() {
    let mut cfg = seasr::server::ServerConfig::from_file(&fixture("bundle/server.toml")).unwrap();
    cfg.languages[0].max_sessions = 1;
    let pool = Arc::new(cfg.load_pool().unwrap());
    let server = spawn(pool.clone(), ServerOptions::default());
    let addr = server.local_addr();

    let mut first = TcpStream::connect(addr).unwrap();
    first
        .write_all(&encode_message(&Message::start(1, &StartPayload::pcm16("id", 16000))).unwrap())
        .unwrap();
    let t0 = Instant::now();
    while pool.bundle("id").unwrap().active_sessions() == 0 {
        assert!(t0.elapsed() < Duration::from_secs(10));
        std::thread::sleep(Duration::from_millis(5));
    }
    let r = send_and_collect(addr, &[Message::start(2, &StartPayload::pcm16("id", 16000))]);
    assert_eq!(error_code(&r), ErrorCode::Overloaded);

    first.write_all(&encode_message(&Message::new(MessageType::End, 1, vec![])).unwrap()).unwrap();
    first.shutdown(Shutdown::Write).unwrap();
    let (r, _) = read_replies(&mut first);
    assert_eq!(outcome(&r).unwrap(), "");
    assert_eq!(pool.bundle("id").unwrap().active_sessions(), 0);
}

#[test]
fn stalled_session_times_out_and_frees_its_slot() {
    let pool = Arc::new(id_pool());
    let opts = ServerOptions {
        timeout: Duration::from_millis(300),
        ..ServerOptions::default()
    };
    let server = spawn(pool.clone(), opts);
    let mut s = TcpStream::connect(server.local_addr()).unwrap();
    s.write_all(&encode_message(&Message::start(77, &StartPayload::pcm16("id", 16000))).unwrap())
        .unwrap();
    // a partial frame does not count as activity
    s.write_all(b"SEA1\x01").unwrap();
    let t0 = Instant::now();
    let (r, _) = read_replies(&mut s);
    assert!(t0.elapsed() >= Duration::from_millis(250));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].session_id, 77);
    assert_eq!(error_code(&r), ErrorCode::SessionTimeout);
    assert_eq!(pool.bundle("id").unwrap().active_sessions(), 0);
}

/// Valid session bytes with random corruption, truncation or pure noise.
fn mangled(rng: &mut ChaCha8Rng, pcm: &[i16]) -> Vec<u8> {
    let mut b = session_bytes(rng.gen(), "id", &pcm[..rng.gen_range(0..4000)], rng);
    match rng.gen_range(0..4) {
        0 => (0..rng.gen_range(1..200)).map(|_| rng.gen()).collect(),
        1 => {
            for _ in 0..rng.gen_range(1..4) {
                let i = rng.gen_range(0..b.len());
                b[i] = rng.gen();
            }
            b
        }
        2 => {
            b.truncate(rng.gen_range(0..b.len()));
            b
        }
        _ => {
            let at = rng.gen_range(0..b.len());
            let junk: Vec<u8> = (0..rng.gen_range(1..30)).map(|_| rng.gen()).collect();
            b.splice(at..at, junk);
            b
        }
    }
}

#[test]
fn fuzzed_streams_get_coded_errors_or_clean_close() {
    let pool = Arc::new(id_pool());
    let server = spawn(pool.clone(), ServerOptions::default());
    let addr = server.local_addr();
    let pcm = fixture_pcm();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut errors = 0;
    for _ in 0..150 {
        let bytes = mangled(&mut rng, &pcm);
        let mut s = TcpStream::connect(addr).unwrap();
        let _ = write_split(&mut s, &bytes, &mut rng);
        let _ = s.shutdown(Shutdown::Write);
        let (r, err) = read_replies(&mut s);
        assert_eq!(err, None, "server output must always be well framed");
        for m in &r {
            match m.msg_type {
                MessageType::Error => {
                    ErrorPayload::decode(&m.payload).expect("error payload carries a known code");
                    errors += 1;
                }
                MessageType::Partial | MessageType::Final => {}
                t => panic!("server sent {t:?}"),
            }
        }
        let finals = r.iter().filter(|m| m.msg_type == MessageType::Final).count();
        assert!(finals <= 1);
    }
    assert!(errors > 50);
    let msgs = run_session(addr, 1, "id", &pcm, &mut rng);
    assert_eq!(outcome(&msgs).unwrap(), "saya makan nasi");
    let t0 = Instant::now();
    while pool.bundle("id").unwrap().active_sessions() != 0 {
        assert!(t0.elapsed() < Duration::from_secs(10));
        std::thread::sleep(Duration::from_millis(5));
    }
}
