//! Tab-separated files for gold values, claim texts and curves.
//!
//! Gold file columns are `sample_id`, `dimension` and `gold_value`. The
//! claims file has `sample_id` and `text`. Curve files hold `threshold`,
//! `accuracy`, `coverage`, `n_retained` and `n_total`; accuracy is left empty
//! when nothing is retained.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ambition::{AmbitionDimension, AmbitionGold, EvalMode, EvalResult};
use crate::error::{Error, Result};

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().delimiter(b'\t').quoting(false).from_reader(input)
}

#[derive(Deserialize)]
struct GoldRow {
    sample_id: String,
    dimension: String,
    gold_value: f64,
}

pub fn parse_gold_tsv<R: Read>(input: R) -> Result<Vec<AmbitionGold>> {
    let mut out = Vec::new();
    for (i, row) in reader(input).deserialize::<GoldRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(format!("gold row {}", i + 1), e))?;
        let dimension: AmbitionDimension = row.dimension.parse()?;
        dimension.validate_gold(row.gold_value)?;
        out.push(AmbitionGold { sample_id: row.sample_id, dimension, gold_value: row.gold_value });
    }
    Ok(out)
}

pub fn read_gold_tsv(path: &Path) -> Result<Vec<AmbitionGold>> {
    parse_gold_tsv(fs::File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn parse_claims_tsv<R: Read>(input: R) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (i, row) in reader(input).deserialize::<(String, String)>().enumerate() {
        let (id, text) = row.map_err(|e| Error::parse(format!("claims row {}", i + 1), e))?;
        if out.insert(id.clone(), text).is_some() {
            return Err(Error::Input(format!("duplicate claim id {id}")));
        }
    }
    Ok(out)
}

pub fn read_claims_tsv(path: &Path) -> Result<HashMap<String, String>> {
    parse_claims_tsv(fs::File::open(path).map_err(|e| Error::io(path, e))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub accuracy: Option<f64>,
    pub coverage: f64,
    pub n_retained: usize,
    pub n_total: usize,
}

impl CurvePoint {
    pub fn from_result(r: &EvalResult) -> Option<Self> {
        let EvalMode::Confidence(threshold) = r.mode else { return None };
        Some(CurvePoint { threshold, accuracy: r.accuracy, coverage: r.coverage, n_retained: r.retained_ids.len(), n_total: r.n_total })
    }
}

pub fn write_curve_tsv(path: &Path, curve: &[EvalResult]) -> Result<()> {
    let mut out = String::from("threshold\taccuracy\tcoverage\tn_retained\tn_total\n");
    for p in curve.iter().filter_map(CurvePoint::from_result) {
        let acc = p.accuracy.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{}\t{acc}\t{}\t{}\t{}\n", p.threshold, p.coverage, p.n_retained, p.n_total));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_curve_tsv(path: &Path) -> Result<Vec<CurvePoint>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    reader(file)
        .deserialize::<CurvePoint>()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::parse(format!("{} row {}", path.display(), i + 1), e)))
        .collect()
}
