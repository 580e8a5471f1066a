use std::collections::HashSet;

use proptest::prelude::*;
use seasr::corpus::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn fixture(path: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{path}")).unwrap()
}

#[test]
fn html_fixture_matches_golden() {
    let html = std::fs::read(format!("{FIXTURES}/html/berita.html")).unwrap();
    assert_eq!(extract_main_text(&html), fixture("html/berita.txt"));
}

#[test]
fn manifest_fixtures_fire_rules() {
    let speakers = fixture("manifest/speakers.tsv");
    let long = CorpusManifest::parse(&speakers, &fixture("manifest/utterances_long.tsv")).unwrap();
    assert_eq!(
        validate_manifest(&long, &ManifestRules::default()),
        [ManifestViolation::SentenceTooLong { utterance: 1, words: 25 }]
    );
    let rep = CorpusManifest::parse(&speakers, &fixture("manifest/utterances_repeat.tsv")).unwrap();
    assert_eq!(
        validate_manifest(&rep, &ManifestRules::default()),
        [ManifestViolation::SentenceRepeated {
            text: "apa kabar hari ini".into(),
            count: 4
        }]
    );
}

#[test]
fn near_even_split_of_899_speakers_is_balanced() {
    let speakers = (0..899)
        .map(|i| Speaker {
            id: format!("s{i}"),
            gender: if i < 450 { Gender::Male } else { Gender::Female },
            age: 16 + (i % 45) as u32,
            region: "r".into(),
            native: true,
        })
        .collect();
    let m = CorpusManifest {
        speakers,
        utterances: vec![],
    };
    assert!(validate_manifest(&m, &ManifestRules::default()).is_empty());
}

#[test]
fn bootstrap_from_fixture_provider() {
    let top = build_frequency_list(&["hujan jakarta banjir", "hujan jakarta"], 2).unwrap();
    let mut queries = generate_pair_queries(&top, 10, 1).unwrap().queries;
    queries.extend(generate_single_queries(&["hujan", "jakarta", "banjir"], &top).unwrap().queries);
    let provider = FixtureProvider::parse(&fixture("search_results.tsv")).unwrap();
    let records = collect_urls(&provider, &queries).unwrap();
    let urls: Vec<&str> = records.iter().map(|r| r.url.as_str()).collect();
    let report = filter_urls(&urls, &UrlFilter::with_domain("id"));
    assert_eq!(report.kept, ["http://berita.co.id/hujan-deras", "http://portal.go.id/banjir"]);
    assert_eq!((report.duplicates, report.blocked, report.off_domain), (1, 2, 2));
}

#[test]
fn pair_sampling_has_no_duplicates() {
    let words: Vec<String> = (0..30).map(|i| format!("w{i:02}")).collect();
    let top = build_frequency_list(&[words.join(" ")], 30).unwrap();
    for n in [1, 50, 200, 435, 500] {
        let q = generate_pair_queries(&top, n, n as u64).unwrap();
        assert_eq!(q.len(), n.min(435));
        let mut seen = HashSet::new();
        for query in &q.queries {
            assert_eq!(query.words.len(), 2);
            assert_ne!(query.words[0], query.words[1]);
            let mut key = query.words.clone();
            key.sort();
            assert!(seen.insert(key));
        }
    }
}

fn url_strategy() -> impl Strategy<Value = String> {
    let host = prop::sample::select(vec!["a.id", "b.co.id", "solid.com", "id", "x.com", "ID.OR.ID"]);
    let path = prop::sample::select(vec!["", "/", "/a", "/b.pdf", "/c.Png", "/d.html", "/e.tar.zip", "/f/"]);
    let scheme = prop::sample::select(vec!["http://", "https://", "", "ftp://"]);
    (scheme, host, path).prop_map(|(s, h, p)| format!("{s}{h}{p}"))
}

fn tag_soup() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-z ]{0,8}",
        prop::sample::select(vec![
            "<p>", "</p>", "<div class=\"x\">", "<br/>", "<b>", "</b>", "<!-- c -->", "&amp;", "<a href='q'>",
        ])
        .prop_map(String::from),
        "[a-z ]{0,6}".prop_map(|s| format!("<script>SECRET{s}</script>")),
        "[a-z ]{0,6}".prop_map(|s| format!("<style>SECRET{s}</STYLE>")),
    ];
    prop::collection::vec(piece, 0..20).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn filter_is_idempotent(urls in prop::collection::vec(url_strategy(), 0..30), with_domain in any::<bool>()) {
        let f = if with_domain { UrlFilter::with_domain("id") } else { UrlFilter::default() };
        let once = filter_urls(&urls, &f).kept;
        let twice = filter_urls(&once, &f).kept;
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn tag_soup_leaves_no_markup(html in tag_soup()) {
        let text = extract_main_text(html.as_bytes());
        prop_assert!(!text.contains('<') && !text.contains('>'), "{text:?}");
        prop_assert!(!text.contains("SECRET"));
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = extract_main_text(&bytes);
    }
}
