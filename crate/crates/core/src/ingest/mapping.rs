use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::label::TargetLabel;

const DEFAULT_MAP: &str = include_str!("../../data/sublabel_map.toml");

#[derive(Debug, Deserialize)]
struct Section {
    sub_labels: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct MapFile {
    net_zero: Section,
    reduction: Section,
}

/// Fine-grained tracker sub-labels aggregated onto the two target classes.
///
/// Tracker claims are always targets, so the map never yields
/// [`TargetLabel::None`].
#[derive(Debug, Clone)]
pub struct SubLabelMap {
    entries: BTreeMap<String, TargetLabel>,
}

fn normalize(s: &str) -> String {
    s.trim().to_lowercase().replace(['-', '_'], " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

impl SubLabelMap {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: MapFile = toml::from_str(text).map_err(|e| Error::parse("sub-label map", e))?;
        let mut entries = BTreeMap::new();
        for (section, label) in [(&file.net_zero, TargetLabel::NetZero), (&file.reduction, TargetLabel::Reduction)] {
            for raw in &section.sub_labels {
                let key = normalize(raw);
                if let Some(prev) = entries.insert(key.clone(), label) {
                    if prev != label {
                        return Err(Error::Config(format!("sub-label {key:?} mapped to both {prev} and {label}")));
                    }
                }
            }
        }
        Ok(SubLabelMap { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn aggregate(&self, fine_label: &str) -> Result<TargetLabel> {
        self.entries.get(&normalize(fine_label)).copied().ok_or_else(|| Error::UnknownSubLabel(fine_label.to_string()))
    }

    pub fn sub_labels(&self) -> impl Iterator<Item = (&str, TargetLabel)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Default for SubLabelMap {
    fn default() -> Self {
        Self::from_toml(DEFAULT_MAP).expect("shipped sub-label map parses")
    }
}

/// Aggregates with the shipped mapping file.
pub fn aggregate_label(fine_label: &str) -> Result<TargetLabel> {
    SubLabelMap::default().aggregate(fine_label)
}
