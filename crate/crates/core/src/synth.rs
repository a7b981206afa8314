//! Seeded synthetic fixtures: labeled target texts, ambition claims with
//! known numbers, and transcript corpora with an injected trend.
//!
//! Nothing here is meant to resemble the statistics of real data beyond what
//! the harness checks need.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use chrono::NaiveDate;

use crate::ambition::AmbitionDimension;
use crate::corpus::Document;
use crate::ingest::{LabeledSample, Provenance};
use crate::label::{ClassLabel, ClimateLabel, TargetLabel};
use crate::seed;

const ACTORS: &[&str] = &[
    "The company",
    "We",
    "Our group",
    "The city",
    "The government",
    "The region",
    "Our organisation",
    "The municipality",
    "The bank",
    "The utility",
    "The state",
    "Our business",
];

const NZ_NOUNS: &[&str] = &[
    "net zero emissions",
    "net-zero greenhouse gas emissions",
    "carbon neutrality",
    "climate neutrality",
    "net zero carbon",
    "zero carbon operations",
    "net negative emissions",
    "a climate neutral footprint",
];

const NZ_VERBS: &[&str] =
    &["aims to reach", "is committed to achieving", "will achieve", "pledges to reach", "targets", "commits to reaching"];

const RED_VERBS: &[&str] = &["reduce", "cut", "lower", "decrease"];

const RED_OBJECTS: &[&str] = &[
    "absolute Scope 1 and 2 GHG emissions",
    "greenhouse gas emissions",
    "CO2 emissions",
    "operational emissions",
    "Scope 3 emissions intensity",
    "carbon emissions from buildings",
];

const CLIMATE_NONE: &[&str] = &[
    "Climate change poses physical risks to our facilities along the coast",
    "We installed solar panels on the roof of our headquarters last year",
    "Extreme weather events disrupted our supply chain in several regions",
    "The board discussed climate-related disclosures during the annual meeting",
    "Our sustainability report describes the governance of climate risks",
    "Investors increasingly ask about the transition risks of fossil fuel assets",
    "We reduced water consumption at our plants through recycling",
    "Waste sent to landfill was cut by a third through better sorting",
    "Emission allowance prices rose sharply during the trading period",
    "The heatwave increased electricity demand across the grid",
    "We joined an industry initiative on climate risk reporting",
    "Biodiversity loss and climate change are closely connected topics",
];

const GENERIC_NONE: &[&str] = &[
    "Revenue grew in the third quarter driven by strong demand",
    "We opened two new stores and expanded our online channel",
    "The company appointed a new chief financial officer in March",
    "Operating margins improved thanks to lower input costs",
    "Our customers responded well to the new product line",
    "The dividend will be paid to shareholders next month",
    "Inventory levels normalised after the holiday season",
    "We expect continued growth across all business segments",
    "The acquisition closed ahead of schedule and within budget",
    "Employee engagement scores reached a record level this year",
];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &'a [&'a str]) -> &'a str {
    xs.choose(rng).expect("non-empty list")
}

pub fn net_zero_sentence(rng: &mut ChaCha8Rng) -> String {
    let year = rng.gen_range(2030..=2060);
    match rng.gen_range(0..4) {
        0 => format!("{} {} {} by {}.", pick(rng, ACTORS), pick(rng, NZ_VERBS), pick(rng, NZ_NOUNS), year),
        1 => format!(
            "By {year}, {} will be {}.",
            pick(rng, ACTORS).to_lowercase(),
            pick(rng, &["net zero", "carbon neutral", "climate neutral"])
        ),
        2 => {
            let interim = rng.gen_range(20..60);
            format!(
                "{} {} {} by {year}, with an interim {interim}% reduction on the way.",
                pick(rng, ACTORS),
                pick(rng, NZ_VERBS),
                pick(rng, NZ_NOUNS)
            )
        }
        _ => format!("Our goal is {} across the value chain no later than {year}.", pick(rng, NZ_NOUNS)),
    }
}

pub fn reduction_sentence(rng: &mut ChaCha8Rng) -> String {
    let pct = rng.gen_range(10..=80);
    let base = rng.gen_range(1990..=2019);
    let target = rng.gen_range(2025..=2040);
    match rng.gen_range(0..4) {
        0 => format!(
            "{} will {} {} by {pct}% by {target} compared to {base} levels.",
            pick(rng, ACTORS),
            pick(rng, RED_VERBS),
            pick(rng, RED_OBJECTS)
        ),
        1 => format!("We aim to {} {} {pct} percent below {base} levels by {target}.", pick(rng, RED_VERBS), pick(rng, RED_OBJECTS)),
        2 => format!(
            "{} commits to a {pct}% reduction in {} from a {base} base year by {target}.",
            pick(rng, ACTORS),
            pick(rng, RED_OBJECTS)
        ),
        _ => format!("Our target is to {} {} by {pct}% against {base} by the year {target}.", pick(rng, RED_VERBS), pick(rng, RED_OBJECTS)),
    }
}

pub fn climate_none_sentence(rng: &mut ChaCha8Rng) -> String {
    format!("{}.", pick(rng, CLIMATE_NONE))
}

pub fn generic_sentence(rng: &mut ChaCha8Rng) -> String {
    format!("{}.", pick(rng, GENERIC_NONE))
}

/// A reduction or net-zero claim with its embedded ambition values, padded
/// with distracting numbers in awkward formats (thousands separators,
/// currency, dotted dates, comma lists, decimals).
#[derive(Debug, Clone, PartialEq)]
pub struct AmbitionClaim {
    pub text: String,
    pub values: Vec<(AmbitionDimension, f64)>,
}

fn distractor(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..7) {
        0 => format!("Revenue reached ${},{:03} million.", rng.gen_range(1..999), rng.gen_range(0..1000)),
        1 => format!("The plan was approved on {:02}.{:02}.{}.", rng.gen_range(1..29), rng.gen_range(1..13), rng.gen_range(2015..2024)),
        2 => format!("Reports for {},{} are published.", rng.gen_range(2015..2020), rng.gen_range(2020..2024)),
        3 => format!("We employ {} people in {} countries.", rng.gen_range(100..99999), rng.gen_range(2..80)),
        4 => format!("Capex was €{}.{} bn.", rng.gen_range(1..40), rng.gen_range(0..10)),
        5 => format!("Scope 3 covers {:.1}% of the footprint.", rng.gen_range(10.0..99.0)),
        _ => String::new(),
    }
}

pub fn ambition_claim(rng: &mut ChaCha8Rng) -> AmbitionClaim {
    let mut values = Vec::new();
    let core = if rng.gen_bool(0.4) {
        let year = rng.gen_range(2025..=2070);
        values.push((AmbitionDimension::NzTargetYear, year as f64));
        format!("{} {} {} by {year}.", pick(rng, ACTORS), pick(rng, NZ_VERBS), pick(rng, NZ_NOUNS))
    } else {
        let pct: f64 = if rng.gen_bool(0.3) { rng.gen_range(100..1000) as f64 / 10.0 } else { rng.gen_range(5..=100) as f64 };
        let target = rng.gen_range(2022..=2050);
        let base = rng.gen_range(1990..=2021);
        values.push((AmbitionDimension::RedPercentage, pct));
        values.push((AmbitionDimension::RedTargetYear, target as f64));
        values.push((AmbitionDimension::RedBaseYear, base as f64));
        let pct_text = match rng.gen_range(0..3) {
            0 => format!("{pct}%"),
            1 => format!("{pct} percent"),
            _ => format!("{pct} %"),
        };
        format!("{} will {} {} by {pct_text} by {target} against {base}.", pick(rng, ACTORS), pick(rng, RED_VERBS), pick(rng, RED_OBJECTS))
    };
    let (a, b) = (distractor(rng), distractor(rng));
    let text = [a.as_str(), core.as_str(), b.as_str()].iter().filter(|s| !s.is_empty()).copied().collect::<Vec<_>>().join(" ");
    AmbitionClaim { text, values }
}

/// A three-class dataset with `counts[label.index()]` samples per label.
/// Ids are `syn-{label}-{n}`; roughly half of the NONE samples are
/// climate-related.
pub fn target_dataset(counts: [usize; 3], seed: u64) -> Vec<LabeledSample> {
    let mut rng = seed::rng(seed);
    let mut out = Vec::new();
    for &label in TargetLabel::ALL {
        for i in 0..counts[label.index()] {
            let text = match label {
                TargetLabel::NetZero => net_zero_sentence(&mut rng),
                TargetLabel::Reduction => reduction_sentence(&mut rng),
                TargetLabel::None if rng.gen_bool(0.5) => climate_none_sentence(&mut rng),
                TargetLabel::None => generic_sentence(&mut rng),
            };
            let provenance = if label == TargetLabel::None { Provenance::NonTargetSource } else { Provenance::Tracker };
            out.push(LabeledSample::new(format!("syn-{}-{i:05}", label.name().to_lowercase()), text, label, provenance));
        }
    }
    out.shuffle(&mut rng);
    out
}

/// Stage-one training data: target and climate-related sentences versus
/// generic business talk.
pub fn climate_dataset(counts: [usize; 2], seed: u64) -> Vec<LabeledSample<ClimateLabel>> {
    let mut rng = seed::rng(seed);
    let mut out = Vec::new();
    for i in 0..counts[0] {
        let text = match i % 3 {
            0 => net_zero_sentence(&mut rng),
            1 => reduction_sentence(&mut rng),
            _ => climate_none_sentence(&mut rng),
        };
        out.push(LabeledSample::new(format!("clim-{i:05}"), text, ClimateLabel::Climate, Provenance::Tracker));
    }
    for i in 0..counts[1] {
        out.push(LabeledSample::new(
            format!("gen-{i:05}"),
            generic_sentence(&mut rng),
            ClimateLabel::NotClimate,
            Provenance::NonTargetSource,
        ));
    }
    out.shuffle(&mut rng);
    out
}

const SMALL_TALK: &[&str] = &[
    "Thank you, Mr. Smith. Next question, please.",
    "Margins were 3.5 percent in the quarter.",
    "Good morning, everyone, and welcome to the call.",
    "Let me hand over to our CFO, Dr. Jones.",
    "We see demand of approx. 4.2 million units.",
    "Operator, we can open the line for questions.",
];

/// Parameters of the synthetic transcript corpus.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub n_docs: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub sentences: (usize, usize),
    /// Probability that a sentence is a net-zero claim up to `trend_start`.
    pub net_zero_base: f64,
    /// Added to the net-zero probability per year after `trend_start`.
    pub net_zero_slope: f64,
    pub trend_start: i32,
    pub reduction_rate: f64,
    pub climate_rate: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            n_docs: 30,
            first_year: 2015,
            last_year: 2023,
            sentences: (60, 120),
            net_zero_base: 0.004,
            net_zero_slope: 0.02,
            trend_start: 2019,
            reduction_rate: 0.02,
            climate_rate: 0.05,
        }
    }
}

impl CorpusSpec {
    pub fn net_zero_rate(&self, year: i32) -> f64 {
        self.net_zero_base + self.net_zero_slope * f64::from((year - self.trend_start).max(0))
    }
}

/// Earnings-call style documents spread evenly over the years of `spec`,
/// with the net-zero sentence rate rising after `spec.trend_start`.
pub fn synthetic_corpus(spec: &CorpusSpec, seed: u64) -> Vec<Document> {
    let mut rng = seed::rng(seed);
    let years = (spec.last_year - spec.first_year + 1).max(1) as usize;
    let firms = ["ACME", "BOREAL", "CIRRUS", "DELTA", "EMBER", "FJORD"];
    (0..spec.n_docs)
        .map(|i| {
            let year = spec.first_year + (i % years) as i32;
            let q = ((i / years) % 4) as u32;
            let date = NaiveDate::from_ymd_opt(year, q * 3 + 2, 1 + (i % 27) as u32).expect("valid date");
            let firm = firms[i % firms.len()];
            let n = rng.gen_range(spec.sentences.0..=spec.sentences.1);
            let nz = spec.net_zero_rate(year);
            let mut body = String::new();
            for k in 0..n {
                let u: f64 = rng.gen();
                let sentence = if u < nz {
                    net_zero_sentence(&mut rng)
                } else if u < nz + spec.reduction_rate {
                    reduction_sentence(&mut rng)
                } else if u < nz + spec.reduction_rate + spec.climate_rate {
                    climate_none_sentence(&mut rng)
                } else if rng.gen_bool(0.15) {
                    pick(&mut rng, SMALL_TALK).to_string()
                } else {
                    generic_sentence(&mut rng)
                };
                body.push_str(&sentence);
                body.push_str(if k % 6 == 5 { "\n\n" } else { " " });
            }
            body.push('\n');
            Document::new(format!("{firm}-{year}Q{}-{i:03}", q + 1), firm, date, body)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::label_counts;

    #[test]
    fn dataset_has_requested_counts_and_is_deterministic() {
        let a = target_dataset([5, 6, 7], 1);
        let counts = label_counts(&a);
        assert_eq!(counts.values().copied().collect::<Vec<_>>(), [5, 6, 7]);
        assert_eq!(a, target_dataset([5, 6, 7], 1));
        crate::ingest::dataset::validate(&a).unwrap();
    }
}
