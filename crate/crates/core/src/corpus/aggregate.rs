//! Event shares, yearly indices and the time-series file.
//!
//! The time-series file is tab-separated with the header
//! `year  mean_share_net_zero  mean_share_reduction  n_events`. Floats are
//! written in shortest round-trip form, so reading a file back reproduces
//! the indices bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Quarter, SentenceRecord};
use crate::error::{Error, Result};
use crate::label::TargetLabel;
use crate::plot::{LineChart, Series};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventShare {
    pub doc_id: String,
    pub firm_id: String,
    pub quarter: Quarter,
    /// Net-zero sentences over all sentences of the event.
    pub share_net_zero: f64,
    pub share_reduction: f64,
    pub n_sentences: usize,
}

/// Shares of one event. All records must belong to the same document.
pub fn event_share(records: &[SentenceRecord], firm_id: &str, quarter: Quarter) -> Result<EventShare> {
    let first = records.first().ok_or(Error::EmptyEvent)?;
    if let Some(other) = records.iter().find(|r| r.doc_id != first.doc_id) {
        return Err(Error::Input(format!("records of {} and {} mixed in one event", first.doc_id, other.doc_id)));
    }
    let n = records.len();
    let count = |l: TargetLabel| records.iter().filter(|r| r.target == l).count() as f64;
    Ok(EventShare {
        doc_id: first.doc_id.clone(),
        firm_id: firm_id.to_string(),
        quarter,
        share_net_zero: count(TargetLabel::NetZero) / n as f64,
        share_reduction: count(TargetLabel::Reduction) / n as f64,
        n_sentences: n,
    })
}

/// How events are pooled into a year.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Unweighted mean over all events of the year.
    #[default]
    EventMean,
    /// Mean of the quarterly means, each quarter weighted equally.
    QuarterFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyIndex {
    pub year: i32,
    pub mean_share_net_zero: f64,
    pub mean_share_reduction: f64,
    pub n_events: usize,
}

/// Order-independent mean: values are sorted and averaged as offsets from
/// the minimum, so a constant input returns that constant exactly.
fn mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let base = values[0];
    base + values.iter().map(|v| v - base).sum::<f64>() / values.len() as f64
}

fn pooled(shares: &[&EventShare], mode: Aggregation, pick: fn(&EventShare) -> f64) -> f64 {
    match mode {
        Aggregation::EventMean => mean(shares.iter().map(|s| pick(s)).collect()),
        Aggregation::QuarterFirst => {
            let mut by_q: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
            for s in shares {
                by_q.entry(s.quarter.q).or_default().push(pick(s));
            }
            mean(by_q.into_values().map(mean).collect())
        }
    }
}

/// One index per calendar year that has events, ascending.
pub fn yearly_index(shares: &[EventShare], mode: Aggregation) -> Vec<YearlyIndex> {
    let mut by_year: BTreeMap<i32, Vec<&EventShare>> = BTreeMap::new();
    for s in shares {
        by_year.entry(s.quarter.year).or_default().push(s);
    }
    by_year
        .into_iter()
        .map(|(year, events)| YearlyIndex {
            year,
            mean_share_net_zero: pooled(&events, mode, |s| s.share_net_zero),
            mean_share_reduction: pooled(&events, mode, |s| s.share_reduction),
            n_events: events.len(),
        })
        .collect()
}

pub const TIMESERIES_HEADER: &str = "year\tmean_share_net_zero\tmean_share_reduction\tn_events";

pub fn timeseries_tsv(indices: &[YearlyIndex]) -> String {
    let mut out = format!("{TIMESERIES_HEADER}\n");
    for i in indices {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", i.year, i.mean_share_net_zero, i.mean_share_reduction, i.n_events));
    }
    out
}

pub fn timeseries_chart(indices: &[YearlyIndex]) -> LineChart {
    let pct = |f: fn(&YearlyIndex) -> f64| indices.iter().map(|i| (i.year as f64, 100.0 * f(i))).collect();
    LineChart {
        title: "Target sentences as a share of all sentences".into(),
        x_label: "year".into(),
        y_label: "% of sentences".into(),
        series: vec![
            Series::new("net zero", pct(|i| i.mean_share_net_zero)),
            Series { dashed: true, ..Series::new("reduction", pct(|i| i.mean_share_reduction)) },
        ],
        y_range: None,
        integer_x: true,
    }
}

/// Writes the time series to `path` and, with `with_plot`, an SVG chart next
/// to it. Returns the written paths.
pub fn emit_timeseries(indices: &[YearlyIndex], path: &Path, with_plot: bool) -> Result<Vec<PathBuf>> {
    if indices.is_empty() {
        return Err(Error::Input("no yearly indices to write".into()));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, timeseries_tsv(indices)).map_err(|e| Error::io(path, e))?;
    let mut written = vec![path.to_path_buf()];
    if with_plot {
        let svg = path.with_extension("svg");
        fs::write(&svg, timeseries_chart(indices).to_svg()).map_err(|e| Error::io(&svg, e))?;
        written.push(svg);
    }
    Ok(written)
}

pub fn parse_timeseries(text: &str) -> Result<Vec<YearlyIndex>> {
    let mut lines = text.lines();
    if lines.next() != Some(TIMESERIES_HEADER) {
        return Err(Error::parse("time series", "unexpected header"));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |m: &str| Error::parse(format!("time series line {}", i + 2), m.to_string());
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            Ok(YearlyIndex {
                year: f[0].parse().map_err(|_| bad("year"))?,
                mean_share_net_zero: f[1].parse().map_err(|_| bad("mean_share_net_zero"))?,
                mean_share_reduction: f[2].parse().map_err(|_| bad("mean_share_reduction"))?,
                n_events: f[3].parse().map_err(|_| bad("n_events"))?,
            })
        })
        .collect()
}

pub fn read_timeseries(path: &Path) -> Result<Vec<YearlyIndex>> {
    parse_timeseries(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}
