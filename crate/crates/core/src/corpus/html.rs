/// Elements whose contents are dropped entirely.
const SKIPPED: [&str; 3] = ["script", "style", "noscript"];

/// Tags that break lines.
const BLOCK: [&str; 36] = [
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "option", "p", "pre",
    "section", "table", "title", "tr", "ul", "body", "head", "html",
];

/// Tags that separate words without breaking lines.
const SPACED: [&str; 2] = ["td", "th"];

fn find_ci(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if needle.len() > hay.len() {
        return None;
    }
    (from..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()].eq_ignore_ascii_case(needle))
}

fn decode_entity(name: &str) -> Option<char> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code);
    }
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        _ => return None,
    })
}

/// Appends literal text; source line breaks count as plain whitespace.
fn push_plain(out: &mut String, text: &str) {
    out.extend(text.chars().map(|c| if c == '\n' || c == '\r' { ' ' } else { c }));
}

fn push_text(out: &mut String, text: &str) {
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        push_plain(out, &rest[..amp]);
        let tail = &rest[amp + 1..];
        let decoded = tail
            .find(';')
            .filter(|&semi| semi > 0 && semi <= 10)
            .and_then(|semi| Some((decode_entity(&tail[..semi])?, semi)));
        match decoded {
            Some((c, semi)) => {
                push_plain(out, c.encode_utf8(&mut [0; 4]));
                rest = &tail[semi + 1..];
            }
            None => {
                out.push('&');
                rest = tail;
            }
        }
    }
    push_plain(out, rest);
}

/// Strips markup from an HTML page, keeping its visible text. Script and
/// style contents and comments vanish, block elements become line breaks,
/// entities are decoded, and whitespace collapses to single spaces.
/// Malformed markup is handled best-effort.
pub fn extract_main_text(html: &[u8]) -> String {
    let src = String::from_utf8_lossy(html);
    let bytes = src.as_bytes();
    let mut raw = String::with_capacity(src.len());
    let mut i = 0;
    while i < bytes.len() {
        let Some(off) = src[i..].find('<') else {
            push_text(&mut raw, &src[i..]);
            break;
        };
        let lt = i + off;
        push_text(&mut raw, &src[i..lt]);
        let next = bytes.get(lt + 1).copied().unwrap_or(b' ');
        if src[lt..].starts_with("<!--") {
            i = src[lt + 4..].find("-->").map_or(bytes.len(), |e| lt + 4 + e + 3);
            continue;
        }
        if !(next.is_ascii_alphabetic() || matches!(next, b'/' | b'!' | b'?')) {
            raw.push('<');
            i = lt + 1;
            continue;
        }
        // tag runs to the next '>' outside quotes
        let mut j = lt + 1;
        let mut quote = None;
        while j < bytes.len() {
            match (quote, bytes[j]) {
                (None, b'>') => break,
                (None, q @ (b'"' | b'\'')) => quote = Some(q),
                (Some(q), c) if c == q => quote = None,
                _ => {}
            }
            j += 1;
        }
        let inner = &src[lt + 1..j.min(bytes.len())];
        i = (j + 1).min(bytes.len());
        let closing = inner.starts_with('/');
        let name: String = inner
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if !closing && SKIPPED.contains(&name.as_str()) && !inner.trim_end().ends_with('/') {
            let end = format!("</{name}");
            i = match find_ci(bytes, end.as_bytes(), i) {
                Some(e) => src[e..].find('>').map_or(bytes.len(), |g| e + g + 1),
                None => bytes.len(),
            };
            continue;
        }
        if BLOCK.contains(&name.as_str()) {
            raw.push('\n');
        } else if SPACED.contains(&name.as_str()) {
            raw.push(' ');
        }
    }

    raw.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}
