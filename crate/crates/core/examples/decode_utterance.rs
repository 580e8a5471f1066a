// Offline decode of the bundled Indonesian clip with its lexicon, trigram
// model and table scorer.

use std::fs;
use std::path::Path;

use seasr::decoder::{load_scorer, viterbi_decode, BeamConfig, GraphSpec};
use seasr::frontend::wav::read_wav;
use seasr::frontend::{extract_features, FrontendConfig};
use seasr::scoring::wer;

pub fn run() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bundle/id");
    let spec = GraphSpec::from_file(&dir.join("graph.toml"))?;
    let graph = spec.build(None)?;
    let scorer = load_scorer(&fs::read_to_string(dir.join("scorer.table"))?)?;
    let frontend = FrontendConfig::parse(&fs::read_to_string(dir.join("frontend.conf"))?)?;

    let audio = read_wav(fs::File::open(dir.join("utterance.wav"))?)?;
    let feats = extract_features(&audio, &frontend)?;
    let hyp = viterbi_decode(&feats, &graph, scorer.as_ref(), &BeamConfig::default())?;

    println!("hypothesis: {}  (score {:.3})", hyp.transcript(), hyp.score);
    for (w, (s, e)) in hyp.words.iter().zip(&hyp.boundaries) {
        println!("  {w:<8} frames {s:>3}..{e:<3}");
    }
    let reference = fs::read_to_string(dir.join("transcript.txt"))?;
    let r: Vec<&str> = reference.split_whitespace().collect();
    println!("WER vs reference: {:.1}%", wer(&r, &hyp.words)?.wer());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
