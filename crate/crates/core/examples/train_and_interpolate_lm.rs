// Two small trigram models mixed at a few weights, scored on held-out text.

use seasr::lm::{interpolate, perplexity, read_arpa, train_ngram, write_arpa, InterpolationWeight, TrainConfig};

const SPEECH: &[&str] = &[
    "saya mau makan nasi",
    "saya mau minum teh",
    "ini kopi saya",
    "saya makan roti pagi ini",
];
const WEB: &[&str] = &[
    "harga nasi dan kopi naik pagi ini",
    "warga minum air bersih",
    "saya dan warga makan bersama",
    "roti dan teh untuk sarapan",
];
const HELD_OUT: &[&str] = &["saya minum kopi pagi ini", "warga makan nasi dan roti"];

pub fn run() -> anyhow::Result<()> {
    let cfg = TrainConfig::with_order(3);
    let speech = train_ngram(SPEECH, &cfg)?;
    let web = train_ngram(WEB, &cfg)?;

    // The held-out text uses words only the web model has seen, so the
    // speech model alone (lambda 1) would score near zero.
    for lambda in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let mix = interpolate(&speech, &web, InterpolationWeight::new(lambda)?)?;
        let r = perplexity(&mix, HELD_OUT)?;
        println!("lambda {lambda:.1}  ppl {:8.2}  oov {}", r.perplexity, r.oov);
    }

    let mix = interpolate(&speech, &web, InterpolationWeight::new(0.5)?)?;
    let arpa = write_arpa(&mix);
    let back = read_arpa(&arpa)?;
    println!(
        "ARPA: {} lines, reloaded vocabulary {}, order {}",
        arpa.lines().count(),
        back.vocab().len(),
        back.order()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
