// Corpus-level WER from reference/hypothesis lines, and relative WER
// reduction between two systems.

use seasr::scoring::{format_tsv, relative_reduction, round_half_up, score_lines};

pub fn run() -> anyhow::Result<()> {
    let pairs = [
        ("saya mau makan nasi", "saya mau makan nasi"),
        ("ini kopi saya", "ini kopi"),
        ("minum teh pagi ini", "minum teh di pagi hari"),
    ];
    let (per, total) = score_lines(&pairs)?;
    print!("{}", format_tsv(&per, &total));

    // WER (%) of three acoustic models, decoded with a web-only LM and then
    // with the web LM interpolated with an in-domain one
    let systems = [("am1", 42.8, 32.9), ("am2", 38.8, 29.0), ("am3", 37.6, 27.3)];
    for (am, base, improved) in systems {
        let r = round_half_up(relative_reduction(base, improved)?, 1);
        println!("{am}: {base:.1} -> {improved:.1}  relative reduction {r:.1}%");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
