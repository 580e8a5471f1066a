// Frequent words to search queries to filtered URLs to page text, using
// canned search results instead of a live engine.

use std::fs;
use std::path::Path;

use seasr::corpus::{
    build_frequency_list, collect_urls, extract_main_text, filter_urls, generate_pair_queries, FixtureProvider, Query,
    UrlFilter,
};

pub fn run() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let transcripts = [
        "hujan deras di jakarta",
        "jakarta banjir setelah hujan",
        "warga jakarta membersihkan rumah",
        "hujan turun lagi",
    ];

    let top = build_frequency_list(&transcripts, 5)?;
    print!("top words:\n{}", top.to_tsv());
    let mut queries = generate_pair_queries(&top, 6, 42)?.queries;
    queries.push(Query {
        words: vec!["hujan".into(), "jakarta".into()],
    });
    println!("queries: {}", queries.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "));

    let provider = FixtureProvider::parse(&fs::read_to_string(dir.join("search_results.tsv"))?)?;
    let records = collect_urls(&provider, &queries)?;
    let urls: Vec<&str> = records.iter().map(|r| r.url.as_str()).collect();
    let report = filter_urls(&urls, &UrlFilter::with_domain("id"));
    println!(
        "{} results -> kept {} (duplicates {}, blocked {}, off-domain {})",
        urls.len(),
        report.kept.len(),
        report.duplicates,
        report.blocked,
        report.off_domain
    );
    for u in &report.kept {
        println!("  {u}");
    }

    let page = extract_main_text(&fs::read(dir.join("html/berita.html"))?);
    println!("extracted page text:\n{page}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
