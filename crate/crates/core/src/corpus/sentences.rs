use std::collections::HashSet;
use std::sync::OnceLock;

const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

fn abbreviations() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| ABBREVIATIONS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect())
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];

fn ends_sentence(token: &str, next: Option<&str>) -> bool {
    let core = token.trim_end_matches(CLOSERS);
    let Some(last) = core.chars().last() else { return false };
    if !matches!(last, '.' | '!' | '?') {
        return false;
    }
    let Some(next) = next else { return true };
    if next.chars().find(|c| c.is_alphanumeric()).is_some_and(char::is_lowercase) {
        return false;
    }
    if last == '.' && !core.ends_with("..") {
        let word = core.trim_end_matches('.').trim_start_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        let single_letter = word.chars().count() == 1 && word.chars().all(char::is_alphabetic);
        if single_letter || abbreviations().contains(word.as_str()) {
            return false;
        }
    }
    true
}

/// Rule-based sentence splitter.
///
/// Blank lines always end a sentence. Inside a paragraph a token ending in
/// `.`, `!` or `?` (optionally followed by closing quotes or brackets) ends
/// the sentence unless the next word starts lowercase or the token is a
/// known abbreviation or a single-letter initial. Splits only ever happen at
/// whitespace, so decimals such as `3.5` stay intact and every
/// whitespace-separated token of the input appears in exactly one sentence.
/// Whitespace inside a sentence is collapsed to single spaces.
pub fn split_sentences(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    for para in paragraphs(body) {
        let tokens: Vec<&str> = para.split_whitespace().collect();
        let mut current: Vec<&str> = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            current.push(tok);
            if ends_sentence(tok, tokens.get(i + 1).copied()) {
                out.push(current.join(" "));
                current.clear();
            }
        }
        if !current.is_empty() {
            out.push(current.join(" "));
        }
    }
    out
}

fn paragraphs(body: &str) -> Vec<String> {
    let mut paras = Vec::new();
    let mut current = String::new();
    for line in body.lines() {
        if line.trim().is_empty() {
            if !current.trim().is_empty() {
                paras.push(std::mem::take(&mut current));
            }
            current.clear();
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.trim().is_empty() {
        paras.push(current);
    }
    paras
}
