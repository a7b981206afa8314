//! Text cleanup applied to claim and non-target texts before training.

use std::sync::OnceLock;

use regex::Regex;

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|ftp://|www\.)\S*").expect("valid url regex"))
}

const KEPT_PUNCTUATION: &str = ".,;:%()-'\"/&";
const KEPT_SYMBOLS: &str = "$€£¥₹¢°";

fn is_kept(c: char) -> bool {
    c.is_alphanumeric() || KEPT_PUNCTUATION.contains(c) || KEPT_SYMBOLS.contains(c)
}

/// Maps typographic variants onto the ASCII punctuation we keep.
fn fold_typography(c: char) -> char {
    match c {
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{2032}' | '`' | '´' => '\'',
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{2033}' | '«' | '»' => '"',
        '\u{2010}'..='\u{2015}' | '\u{2212}' => '-',
        _ => c,
    }
}

/// Removes URLs and special characters and collapses whitespace.
///
/// Letters, digits, `.,;:%()-'"/&`, currency signs and `°` survive. Case and
/// accents are left alone.
pub fn clean_text(text: &str) -> String {
    let filtered: String = text
        .chars()
        .map(fold_typography)
        .filter_map(|c| {
            if c.is_whitespace() || c.is_control() {
                Some(' ')
            } else if is_kept(c) {
                Some(c)
            } else {
                None
            }
        })
        .collect();
    let without_urls = url_pattern().replace_all(&filtered, " ");
    without_urls.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace token count of the cleaned text.
pub fn word_count(text: &str) -> usize {
    clean_text(text).split_whitespace().count()
}
