// Batch and streaming feature extraction on the bundled Indonesian clip.

use std::fs::File;
use std::path::Path;

use seasr::frontend::wav::read_wav;
use seasr::frontend::{extract_features, FrontendConfig, StreamingFrontend};

pub fn run() -> anyhow::Result<()> {
    let wav = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bundle/id/utterance.wav");
    let audio = read_wav(File::open(wav)?)?;
    let cfg = FrontendConfig::default();

    let batch = extract_features(&audio, &cfg)?;
    println!(
        "{:.2} s of audio -> {} frames x {} features",
        audio.duration_secs(),
        batch.rows(),
        batch.width()
    );
    // MFCC, energy and tone, each with deltas and accelerations
    let r = batch.row(batch.rows() / 2);
    println!("c0..c2 {:.3} {:.3} {:.3}  energy {:.3}  tone {:.3}", r[0], r[1], r[2], r[12], r[13]);

    // Same features from 20 ms pushes.
    let mut fe = StreamingFrontend::new(cfg, audio.sample_rate_hz())?;
    let mut rows = Vec::new();
    for chunk in audio.samples().chunks(320) {
        rows.extend(fe.push(chunk));
    }
    rows.extend(fe.finish());
    let max_diff = rows
        .iter()
        .zip(batch.iter_rows())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    println!("streaming: {} frames, max |diff| vs batch {max_diff:.2e}", rows.len());
    anyhow::ensure!(rows.len() == batch.rows());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
