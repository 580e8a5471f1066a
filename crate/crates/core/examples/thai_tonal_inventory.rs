// Tonal expansion of the Thai inventory, and grapheme-to-phoneme rules
// checked against the Indonesian one.

use std::fs;
use std::path::Path;

use seasr::lexicon::{apply_g2p, expand_tonal, load_inventory, validate_lexicon, G2PRuleSet, Lexicon, ToneSet};

pub fn run() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    let thai = load_inventory("th", &fs::read_to_string(dir.join("thai.inv"))?)?;
    let tones = ToneSet::thai();
    let tonal = expand_tonal(&thai, &tones)?;
    println!(
        "thai: {} units, {} tone-bearing, x{} tones -> {} units",
        thai.len(),
        thai.tonal_count(),
        tones.len(),
        tonal.len()
    );
    let sample: Vec<&str> = tonal.units().iter().rev().take(6).map(|u| u.symbol.as_str()).collect();
    println!("  e.g. {}", sample.join(" "));

    let indo = load_inventory("id", &fs::read_to_string(dir.join("indonesian.inv"))?)?;
    let rules = G2PRuleSet::parse(&fs::read_to_string(dir.join("indonesian.g2p"))?)?;
    rules.validate(&indo)?;
    let mut lex = Lexicon::default();
    for w in ["nyanyi", "khusus", "sekolah", "pagi"] {
        let pron = apply_g2p(w, &rules)?;
        println!("{w}\t{}", pron.join(" "));
        lex.push(w, pron);
    }
    let problems = validate_lexicon(&lex, &indo);
    println!("indonesian: {} units, lexicon violations: {}", indo.len(), problems.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
