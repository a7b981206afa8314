//! Label vocabularies for the three-class and binary target tasks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A closed, totally ordered label vocabulary usable as classifier output.
///
/// `ALL` fixes both the class index used by backends and the tie-break order
/// for argmax.
pub trait ClassLabel:
    Copy
    + Eq
    + Ord
    + std::hash::Hash
    + fmt::Debug
    + fmt::Display
    + FromStr<Err = Error>
    + Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    const ALL: &'static [Self];

    fn index(self) -> usize {
        Self::ALL.iter().position(|l| *l == self).expect("label in ALL")
    }

    fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    fn name(self) -> &'static str;

    /// True for the "no target" class.
    fn is_none(self) -> bool;
}

/// Three-class target label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TargetLabel {
    NetZero,
    Reduction,
    None,
}

impl ClassLabel for TargetLabel {
    const ALL: &'static [Self] = &[TargetLabel::NetZero, TargetLabel::Reduction, TargetLabel::None];

    fn name(self) -> &'static str {
        match self {
            TargetLabel::NetZero => "NET_ZERO",
            TargetLabel::Reduction => "REDUCTION",
            TargetLabel::None => "NONE",
        }
    }

    fn is_none(self) -> bool {
        self == TargetLabel::None
    }
}

impl TargetLabel {
    pub fn to_binary(self) -> BinaryLabel {
        match self {
            TargetLabel::NetZero | TargetLabel::Reduction => BinaryLabel::Target,
            TargetLabel::None => BinaryLabel::None,
        }
    }
}

/// Reduction-vs-none label: net-zero claims count as reduction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BinaryLabel {
    Target,
    None,
}

impl ClassLabel for BinaryLabel {
    const ALL: &'static [Self] = &[BinaryLabel::Target, BinaryLabel::None];

    fn name(self) -> &'static str {
        match self {
            BinaryLabel::Target => "TARGET",
            BinaryLabel::None => "NONE",
        }
    }

    fn is_none(self) -> bool {
        self == BinaryLabel::None
    }
}

/// Stage-one label of the corpus pipeline: is a sentence about climate at
/// all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClimateLabel {
    Climate,
    NotClimate,
}

impl ClassLabel for ClimateLabel {
    const ALL: &'static [Self] = &[ClimateLabel::Climate, ClimateLabel::NotClimate];

    fn name(self) -> &'static str {
        match self {
            ClimateLabel::Climate => "CLIMATE",
            ClimateLabel::NotClimate => "NOT_CLIMATE",
        }
    }

    fn is_none(self) -> bool {
        self == ClimateLabel::NotClimate
    }
}

macro_rules! label_text {
    ($ty:ty) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            /// Accepts the canonical names case-insensitively, with `-`, `_`
            /// and spaces treated alike.
            fn from_str(s: &str) -> Result<Self, Error> {
                let norm: String = s.trim().chars().map(|c| if c == '-' || c == ' ' { '_' } else { c.to_ascii_uppercase() }).collect();
                <$ty as ClassLabel>::ALL
                    .iter()
                    .copied()
                    .find(|l| l.name() == norm)
                    .ok_or_else(|| Error::parse("label", format!("unknown label {s:?}")))
            }
        }
    };
}

label_text!(TargetLabel);
label_text!(BinaryLabel);
label_text!(ClimateLabel);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_values_in_fixed_order() {
        assert_eq!(TargetLabel::ALL.len(), 3);
        let mut sorted = TargetLabel::ALL.to_vec();
        sorted.sort();
        assert_eq!(sorted, TargetLabel::ALL);
        for (i, l) in TargetLabel::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
    }

    #[test]
    fn parses_loose_spellings() {
        assert_eq!("net zero".parse::<TargetLabel>().unwrap(), TargetLabel::NetZero);
        assert_eq!("Net-Zero".parse::<TargetLabel>().unwrap(), TargetLabel::NetZero);
        assert_eq!("reduction".parse::<TargetLabel>().unwrap(), TargetLabel::Reduction);
        assert_eq!("TARGET".parse::<BinaryLabel>().unwrap(), BinaryLabel::Target);
        assert!("maybe".parse::<TargetLabel>().is_err());
    }

    #[test]
    fn serde_uses_canonical_names() {
        let s = serde_json::to_string(&TargetLabel::NetZero).unwrap();
        assert_eq!(s, "\"NET_ZERO\"");
        let back: TargetLabel = serde_json::from_str("\"REDUCTION\"").unwrap();
        assert_eq!(back, TargetLabel::Reduction);
    }
}
