use std::fmt::Write as _;

use super::{LmError, NGramModel, Vocab, WordId, BOS, EOS, LOG10_ZERO};

fn fmt_log(v: f64) -> String {
    if v <= LOG10_ZERO || !v.is_finite() {
        "-99".to_string()
    } else {
        // shortest representation that parses back to the same f64
        format!("{v}")
    }
}

/// Writes the model in ARPA format. Entries are sorted by word id so the
/// output is deterministic.
pub fn write_arpa(m: &NGramModel) -> String {
    let mut out = String::from("\\data\\\n");
    for n in 1..=m.order() {
        let _ = writeln!(out, "ngram {n}={}", m.ngram_count(n));
    }
    for n in 1..=m.order() {
        let _ = write!(out, "\n\\{n}-grams:\n");
        let mut grams: Vec<(&[WordId], f64)> = m.ngrams(n).collect();
        grams.sort_unstable_by(|a, b| a.0.cmp(b.0));
        for (g, p) in grams {
            let words: Vec<&str> = g.iter().map(|&id| m.vocab().word(id)).collect();
            let _ = write!(out, "{}\t{}", fmt_log(p), words.join(" "));
            if n < m.order() {
                if let Some(b) = m.backoff_weight(g) {
                    let _ = write!(out, "\t{}", fmt_log(b));
                }
            }
            out.push('\n');
        }
    }
    out.push_str("\n\\end\\\n");
    out
}

enum Section {
    Preamble,
    Data,
    Grams(usize),
    End,
}

type Gram = (Vec<String>, f64, Option<f64>);

pub fn read_arpa(text: &str) -> Result<NGramModel, LmError> {
    let err = |line: usize, msg: String| LmError::Arpa { line, msg };
    let mut section = Section::Preamble;
    let mut declared: Vec<usize> = Vec::new();
    // per order: (words, log10 prob, log10 backoff)
    let mut grams: Vec<Vec<Gram>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('\\') {
            section = match line {
                "\\data\\" => match section {
                    Section::Preamble => Section::Data,
                    _ => return Err(err(lineno, "repeated \\data\\".into())),
                },
                "\\end\\" => Section::End,
                _ => {
                    let n = line
                        .strip_prefix('\\')
                        .and_then(|s| s.strip_suffix("-grams:"))
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err(lineno, format!("unknown section {line:?}")))?;
                    if matches!(section, Section::Preamble) {
                        return Err(err(lineno, "n-gram section before \\data\\".into()));
                    }
                    if n == 0 || n > declared.len() {
                        return Err(err(lineno, format!("section {n} not declared in header")));
                    }
                    Section::Grams(n)
                }
            };
            continue;
        }
        match section {
            Section::Preamble => {}
            Section::End => return Err(err(lineno, "content after \\end\\".into())),
            Section::Data => {
                let rest = line
                    .strip_prefix("ngram ")
                    .ok_or_else(|| err(lineno, format!("malformed header line {line:?}")))?;
                let (n, c) = rest
                    .split_once('=')
                    .and_then(|(n, c)| Some((n.trim().parse::<usize>().ok()?, c.trim().parse::<usize>().ok()?)))
                    .ok_or_else(|| err(lineno, format!("malformed header line {line:?}")))?;
                if n != declared.len() + 1 {
                    return Err(err(lineno, format!("header declares order {n} out of sequence")));
                }
                declared.push(c);
                grams.push(Vec::new());
            }
            Section::Grams(n) => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != n + 1 && fields.len() != n + 2 {
                    return Err(err(lineno, format!("expected {n} words with probability")));
                }
                let parse = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| err(lineno, format!("bad number {s:?}")))
                };
                let p = parse(fields[0])?;
                if p > 0.0 {
                    return Err(err(lineno, "log probability above zero".into()));
                }
                let bow = if fields.len() == n + 2 { Some(parse(fields[n + 1])?) } else { None };
                grams[n - 1].push((fields[1..=n].iter().map(|s| s.to_string()).collect(), p, bow));
            }
        }
    }

    if !matches!(section, Section::End) {
        return Err(err(text.lines().count(), "missing \\end\\".into()));
    }
    if declared.is_empty() {
        return Err(err(0, "no \\data\\ header".into()));
    }
    for (n, (want, got)) in declared.iter().zip(&grams).enumerate() {
        if *want != got.len() {
            return Err(err(
                0,
                format!("header declares {want} {}-grams but {} present", n + 1, got.len()),
            ));
        }
    }

    let mut vocab = Vocab::default();
    for (words, _, _) in &grams[0] {
        vocab.insert(&words[0]);
    }
    let markers = vocab.id(BOS).is_some() && vocab.id(EOS).is_some();
    let mut model = NGramModel::empty(declared.len(), vocab, markers);
    for (n, level) in grams.into_iter().enumerate() {
        for (words, p, bow) in level {
            let ids = words
                .iter()
                .map(|w| model.vocab.id(w))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(0, format!("{}-gram {words:?} uses a word missing from the unigrams", n + 1)))?;
            if let Some(b) = bow {
                model.set_backoff(ids.clone(), b);
            }
            model.set_prob(ids, p);
        }
    }
    Ok(model)
}
