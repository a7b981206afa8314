//! Transcript files.
//!
//! A document file is UTF-8 text with a four-line header, a `---` separator
//! line and the body:
//!
//! ```text
//! doc_id: ACME-2021Q1
//! firm_id: ACME
//! date: 2021-02-11
//! quarter: 2021Q1
//! ---
//! Good morning and welcome to the call. ...
//! ```
//!
//! Header keys may come in any order but each must appear exactly once.
//! `quarter` must be the calendar quarter of `date`. Everything after the
//! separator line is the body, kept verbatim; it must contain some
//! non-whitespace text. A corpus is a directory of such files with the
//! `.txt` extension.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Quarter {
    pub year: i32,
    pub q: u8,
}

impl Quarter {
    pub fn new(year: i32, q: u8) -> Result<Self> {
        if (1..=4).contains(&q) {
            Ok(Quarter { year, q })
        } else {
            Err(Error::Input(format!("quarter {q} out of range")))
        }
    }

    pub fn of_date(date: NaiveDate) -> Self {
        Quarter { year: date.year(), q: (date.month0() / 3 + 1) as u8 }
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.q)
    }
}

impl FromStr for Quarter {
    type Err = Error;

    /// `2021Q1`, `2021-Q1` and lowercase `q` are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad quarter {s:?}"));
        let (y, q) = s.trim().split_once(['Q', 'q']).ok_or_else(bad)?;
        let year: i32 = y.trim_end_matches('-').parse().map_err(|_| bad())?;
        let q: u8 = q.parse().map_err(|_| bad())?;
        Quarter::new(year, q)
    }
}

impl TryFrom<String> for Quarter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Quarter> for String {
    fn from(q: Quarter) -> String {
        q.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub firm_id: String,
    pub event_date: NaiveDate,
    pub quarter: Quarter,
    pub body: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, firm_id: impl Into<String>, event_date: NaiveDate, body: impl Into<String>) -> Self {
        Document { doc_id: doc_id.into(), firm_id: firm_id.into(), event_date, quarter: Quarter::of_date(event_date), body: body.into() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::parse("document", m);
        let mut rest = text;
        let (mut doc_id, mut firm_id, mut date, mut quarter) = (None, None, None, None);
        loop {
            let (line, tail) = rest.split_once('\n').ok_or_else(|| bad("missing --- separator".into()))?;
            rest = tail;
            let line = line.trim_end_matches('\r');
            if line == "---" {
                break;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| bad(format!("header line {line:?} is not key: value")))?;
            let value = value.trim().to_string();
            let slot = match key.trim() {
                "doc_id" => &mut doc_id,
                "firm_id" => &mut firm_id,
                "date" => &mut date,
                "quarter" => &mut quarter,
                other => return Err(bad(format!("unknown header key {other:?}"))),
            };
            if slot.replace(value).is_some() {
                return Err(bad(format!("duplicate header key {:?}", key.trim())));
            }
        }
        let need = |v: Option<String>, k: &str| v.filter(|s| !s.is_empty()).ok_or_else(|| bad(format!("missing header key {k:?}")));
        let doc_id = need(doc_id, "doc_id")?;
        let firm_id = need(firm_id, "firm_id")?;
        let date_s = need(date, "date")?;
        let event_date = NaiveDate::parse_from_str(&date_s, "%Y-%m-%d").map_err(|e| bad(format!("date {date_s:?}: {e}")))?;
        let quarter: Quarter = need(quarter, "quarter")?.parse()?;
        if quarter != Quarter::of_date(event_date) {
            return Err(Error::Input(format!("{doc_id}: quarter {quarter} does not contain {event_date}")));
        }
        if rest.trim().is_empty() {
            return Err(Error::Input(format!("{doc_id}: empty body")));
        }
        Ok(Document { doc_id, firm_id, event_date, quarter, body: rest.to_string() })
    }

    pub fn render(&self) -> String {
        format!(
            "doc_id: {}\nfirm_id: {}\ndate: {}\nquarter: {}\n---\n{}",
            self.doc_id,
            self.firm_id,
            self.event_date.format("%Y-%m-%d"),
            self.quarter,
            self.body
        )
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Document::parse(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
        other => other,
    })
}

/// Every `.txt` file in `dir`, sorted by doc id.
pub fn read_corpus(dir: &Path) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "txt") && path.is_file() {
            docs.push(read_document(&path)?);
        }
    }
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    let mut seen = HashSet::new();
    for d in &docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(Error::Input(format!("duplicate doc_id {}", d.doc_id)));
        }
    }
    Ok(docs)
}

/// Writes one `<doc_id>.txt` per document.
pub fn write_corpus(dir: &Path, docs: &[Document]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for d in docs {
        let path = dir.join(format!("{}.txt", d.doc_id));
        fs::write(&path, d.render()).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
