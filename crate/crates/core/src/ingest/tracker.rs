//! Reading tracker claim exports and non-target text sources.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::TargetLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActorType {
    City,
    Company,
    Country,
    Region,
}

impl FromStr for ActorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "city" | "cities" => Ok(ActorType::City),
            "company" | "companies" => Ok(ActorType::Company),
            "country" | "countries" => Ok(ActorType::Country),
            "region" | "regions" | "state" | "province" => Ok(ActorType::Region),
            other => Err(Error::parse("actor type", format!("unknown actor type {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawClaim {
    pub text: String,
    pub fine_label: String,
    pub actor_type: ActorType,
    pub source_id: String,
    /// Label decided by the reviewing team, when the export carries one.
    pub reviewed_label: Option<TargetLabel>,
}

/// Column names of a tracker export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub text: String,
    pub fine_label: String,
    pub actor_type: String,
    pub source_id: String,
    pub reviewed_label: Option<String>,
    pub delimiter: char,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            text: "text".into(),
            fine_label: "fine_label".into(),
            actor_type: "actor_type".into(),
            source_id: "source_id".into(),
            reviewed_label: None,
            delimiter: ',',
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Config(format!("column {name:?} not found in header")))
}

fn reader<R: std::io::Read>(input: R, delimiter: char) -> csv::Reader<R> {
    csv::ReaderBuilder::new().delimiter(delimiter as u8).flexible(false).from_reader(input)
}

pub fn parse_claims<R: std::io::Read>(input: R, columns: &ColumnMap) -> Result<Vec<RawClaim>> {
    let mut rdr = reader(input, columns.delimiter);
    let headers = rdr.headers().map_err(|e| Error::parse("claim export header", e))?.clone();
    let text_i = column(&headers, &columns.text)?;
    let fine_i = column(&headers, &columns.fine_label)?;
    let actor_i = column(&headers, &columns.actor_type)?;
    let source_i = column(&headers, &columns.source_id)?;
    let reviewed_i = columns.reviewed_label.as_deref().map(|c| column(&headers, c)).transpose()?;

    let mut claims = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let ctx = || format!("claim export row {}", row + 2);
        let rec = rec.map_err(|e| Error::parse(ctx(), e))?;
        let text = rec[text_i].to_string();
        if text.trim().is_empty() {
            return Err(Error::parse(ctx(), "empty claim text"));
        }
        let reviewed_label = match reviewed_i.map(|i| rec[i].trim()) {
            Some(v) if !v.is_empty() => Some(v.parse().map_err(|e: Error| Error::parse(ctx(), e))?),
            _ => None,
        };
        claims.push(RawClaim {
            text,
            fine_label: rec[fine_i].to_string(),
            actor_type: rec[actor_i].parse().map_err(|e: Error| Error::parse(ctx(), e))?,
            source_id: rec[source_i].trim().to_string(),
            reviewed_label,
        });
    }
    Ok(claims)
}

pub fn read_claims(path: &Path, columns: &ColumnMap) -> Result<Vec<RawClaim>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_claims(file, columns)
}

/// Non-target texts: a delimited file with a `text` column and an optional
/// `id` column.
pub fn parse_non_target<R: std::io::Read>(input: R, delimiter: char) -> Result<Vec<(Option<String>, String)>> {
    let mut rdr = reader(input, delimiter);
    let headers = rdr.headers().map_err(|e| Error::parse("non-target header", e))?.clone();
    let text_i = column(&headers, "text")?;
    let id_i = headers.iter().position(|h| h.trim() == "id");
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(format!("non-target row {}", row + 2), e))?;
        let id = id_i.map(|i| rec[i].trim().to_string()).filter(|s| !s.is_empty());
        out.push((id, rec[text_i].to_string()));
    }
    Ok(out)
}

pub fn read_non_target(path: &Path, delimiter: char) -> Result<Vec<(Option<String>, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_non_target(file, delimiter)
}

/// Makes ids unique by suffixing repeats with `-2`, `-3`, ... in order.
pub(crate) fn disambiguate(ids: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    ids.into_iter()
        .map(|id| {
            let n = seen.entry(id.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                id
            } else {
                format!("{id}-{n}")
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_export_with_custom_columns() {
        let csv = "claim;sub;actor;id;team\n\
                   We target net zero by 2050;Net zero;Country;C1;\n\
                   Cut emissions 40% by 2030;Emissions reduction target;companies;K9;REDUCTION\n";
        let cols = ColumnMap {
            text: "claim".into(),
            fine_label: "sub".into(),
            actor_type: "actor".into(),
            source_id: "id".into(),
            reviewed_label: Some("team".into()),
            delimiter: ';',
        };
        let claims = parse_claims(csv.as_bytes(), &cols).unwrap();
        assert_eq!(claims.len(), 2);
        assert_eq!(claims[0].actor_type, ActorType::Country);
        assert_eq!(claims[0].reviewed_label, None);
        assert_eq!(claims[1].actor_type, ActorType::Company);
        assert_eq!(claims[1].reviewed_label, Some(TargetLabel::Reduction));
    }

    #[test]
    fn missing_column_is_config_error() {
        let csv = "text,fine_label\nx,y\n";
        assert!(matches!(parse_claims(csv.as_bytes(), &ColumnMap::default()), Err(Error::Config(_))));
    }

    #[test]
    fn bad_actor_rejected() {
        let csv = "text,fine_label,actor_type,source_id\nsome claim,net zero,planet,1\n";
        assert!(parse_claims(csv.as_bytes(), &ColumnMap::default()).is_err());
    }

    #[test]
    fn disambiguates_repeats() {
        let ids = disambiguate(["a", "b", "a", "a"].map(String::from));
        assert_eq!(ids, ["a", "b", "a-2", "a-3"]);
    }
}
