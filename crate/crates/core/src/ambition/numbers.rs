//! Numeric tokens and the "answer contains the gold number" test.
//!
//! A raw numeric run is a maximal stretch of digits in which a single `,` or
//! `.` may appear between two digits. Each run is then read as follows.
//!
//! * Commas are thousands separators only in the `d{1,3}(,ddd)+` shape,
//!   optionally followed by one decimal part. Any other comma separates list
//!   items, so `2019,2020` is two tokens.
//! * A single dot is a decimal point. Two or more dots split the run into
//!   integers, so `31.12.2030` yields `31`, `12` and `2030`.
//!
//! Signs, currency symbols and `%` are never part of a token.

use std::sync::OnceLock;

use regex::Regex;

use crate::ambition::AmbitionDimension;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericToken {
    /// Byte range of the token in the source text.
    pub start: usize,
    pub end: usize,
    pub value: f64,
    /// Plain four-digit integer with no separators.
    pub is_year: bool,
}

fn raw_runs() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[0-9]+(?:[.,][0-9]+)*").expect("regex"))
}

fn thousands() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[0-9]{1,3}(?:,[0-9]{3})+(?:\.[0-9]+)?$").expect("regex"))
}

fn plain(text: &str, start: usize, out: &mut Vec<NumericToken>) {
    let value: f64 = text.parse().expect("digits with at most one dot");
    let is_year = text.len() == 4 && text.bytes().all(|b| b.is_ascii_digit());
    out.push(NumericToken { start, end: start + text.len(), value, is_year });
}

fn split_on(run: &str, start: usize, sep: char, out: &mut Vec<NumericToken>) {
    let mut offset = start;
    for part in run.split(sep) {
        read_run(part, offset, out);
        offset += part.len() + 1;
    }
}

fn read_run(run: &str, start: usize, out: &mut Vec<NumericToken>) {
    if run.contains(',') {
        if thousands().is_match(run) {
            let value: f64 = run.replace(',', "").parse().expect("validated shape");
            out.push(NumericToken { start, end: start + run.len(), value, is_year: false });
        } else {
            split_on(run, start, ',', out);
        }
    } else if run.matches('.').count() > 1 {
        split_on(run, start, '.', out);
    } else {
        plain(run, start, out);
    }
}

pub fn numeric_tokens(text: &str) -> Vec<NumericToken> {
    let mut out = Vec::new();
    for m in raw_runs().find_iter(text) {
        read_run(m.as_str(), m.start(), &mut out);
    }
    out
}

const TOLERANCE: f64 = 1e-9;

/// True when some numeric token of `answer` equals `gold` under the
/// dimension's rule: years need a four-digit integer token, percentages
/// compare by value.
pub fn answer_matches(answer: &str, gold: f64, dimension: AmbitionDimension) -> bool {
    numeric_tokens(answer).iter().any(|t| token_matches(t, gold, dimension))
}

pub(crate) fn token_matches(t: &NumericToken, gold: f64, dimension: AmbitionDimension) -> bool {
    if dimension.is_year() {
        t.is_year && (t.value - gold).abs() < TOLERANCE
    } else {
        (t.value - gold).abs() < TOLERANCE
    }
}
