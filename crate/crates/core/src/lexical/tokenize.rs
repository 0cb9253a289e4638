//! Tokenizers and text helpers for the lexical metrics.

use std::sync::OnceLock;

use regex::Regex;

/// Whitespace as understood by Python's `str.split()`: Unicode `White_Space`
/// plus the ASCII information separators U+001C..U+001F.
#[inline]
pub fn is_py_whitespace(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

/// Splits on runs of whitespace, dropping empty pieces.
pub fn split_words(text: &str) -> impl Iterator<Item = &str> {
    text.split(is_py_whitespace).filter(|w| !w.is_empty())
}

pub fn rstrip(text: &str) -> &str {
    text.trim_end_matches(is_py_whitespace)
}

struct Rules13a {
    symbols: Regex,
    period_comma_after_nondigit: Regex,
    period_comma_before_nondigit: Regex,
    dash_after_digit: Regex,
}

fn rules() -> &'static Rules13a {
    static RULES: OnceLock<Rules13a> = OnceLock::new();
    RULES.get_or_init(|| Rules13a {
        // { | } ~  [ \ ] ^ _ `  space ! " # $ % &  ( ) * +  : ; < = > ? @  /
        symbols: Regex::new(r"([\x7B-\x7E\x5B-\x60\x20-\x26\x28-\x2B\x3A-\x40\x2F])").unwrap(),
        period_comma_after_nondigit: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_comma_before_nondigit: Regex::new(r"([\.,])([^0-9])").unwrap(),
        dash_after_digit: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

/// The `13a` tokenizer (mteval-v13a): unescapes a few SGML entities, splits
/// punctuation and symbols, and normalizes whitespace.
pub fn tokenize_13a(text: &str) -> String {
    let mut line = text
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let line = format!(" {line} ");

    let r = rules();
    let line = r.symbols.replace_all(&line, " $1 ");
    let line = r.period_comma_after_nondigit.replace_all(&line, "$1 $2 ");
    let line = r.period_comma_before_nondigit.replace_all(&line, " $1 $2");
    let line = r.dash_after_digit.replace_all(&line, "$1 $2 ");

    split_words(&line).collect::<Vec<_>>().join(" ")
}

/// Tercom-style tokenization with default settings: lowercase, then
/// whitespace normalization. No punctuation splitting.
pub fn tokenize_tercom(text: &str) -> Vec<String> {
    let lowered = rstrip(text).to_lowercase();
    split_words(&lowered).map(str::to_owned).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_punctuation() {
        assert_eq!(tokenize_13a("Hello, world!"), "Hello , world !");
        assert_eq!(tokenize_13a("It's (fine)."), "It's ( fine ) .");
        assert_eq!(tokenize_13a("a/b"), "a / b");
    }

    #[test]
    fn numbers_keep_separators() {
        assert_eq!(tokenize_13a("1,000.5 items"), "1,000.5 items");
        assert_eq!(tokenize_13a("pages 3-5"), "pages 3 - 5");
        assert_eq!(tokenize_13a("end of 1999."), "end of 1999 .");
    }

    #[test]
    fn unescapes_entities() {
        assert_eq!(tokenize_13a("a &amp; b &quot;c&quot;"), "a & b \" c \"");
    }

    #[test]
    fn python_whitespace() {
        assert!(is_py_whitespace('\u{1f}'));
        assert!(is_py_whitespace('\u{3000}'));
        assert!(!is_py_whitespace('\u{200b}'));
        assert_eq!(
            split_words("a\u{1c}b  c").collect::<Vec<_>>(),
            ["a", "b", "c"]
        );
    }

    #[test]
    fn tercom_lowercases() {
        assert_eq!(tokenize_tercom("The  Cat, sat. "), ["the", "cat,", "sat."]);
    }
}
