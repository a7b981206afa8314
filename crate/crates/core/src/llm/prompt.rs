use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::TargetLabel;

/// Zero-shot instruction for the three-class task. The text goes between
/// the `^^^` markers.
pub const DEFAULT_TEMPLATE: &str = "Your task is to classify a provided text whether it contains claims about Reduction or Net Zero targets or none of them. \n\
\n\
Reduction targets are claims that refer to an absolute or relative reduction of emissions, often accompanied by a baseline year to which the reduction target is compared.\n\
Net zero targets represent a special case of reduction targets where an institution states to bring its emissions balance down to no additional net emissions by a certain year.\n\
If both targets appear in the text, the main focus of the text is decisive. For instance, most reduction targets serve as intermediary steps for the final goal of net zero. Thus, the focus lies on net zero.\n\
\n\
As an answer to the provided text, please only respond with 'Reduction' for reduction targets, 'Net Zero' for Net Zero targets or 'None' if no category applies.\n\
\n\
Provided text: ^^^{text}^^^ ";

const SLOT: &str = "{text}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    template: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate { template: DEFAULT_TEMPLATE.to_string() }
    }
}

impl PromptTemplate {
    /// Requires exactly one `{text}` slot, written as `^^^{text}^^^`.
    pub fn new(template: impl Into<String>) -> Result<Self> {
        let template = template.into();
        if template.matches(SLOT).count() != 1 || !template.contains("^^^{text}^^^") {
            return Err(Error::Config("prompt template needs exactly one ^^^{text}^^^ slot".into()));
        }
        Ok(PromptTemplate { template })
    }

    pub fn as_str(&self) -> &str {
        &self.template
    }

    pub fn render(&self, text: &str) -> Result<String> {
        if text.trim().is_empty() {
            return Err(Error::Input("prompt text is empty".into()));
        }
        Ok(self.template.replacen(SLOT, text, 1))
    }

    /// Recovers the embedded text from a prompt rendered by this template.
    pub fn extract_text<'a>(&self, prompt: &'a str) -> Option<&'a str> {
        let (prefix, suffix) = self.template.split_once(SLOT)?;
        prompt.strip_prefix(prefix)?.strip_suffix(suffix)
    }
}

pub fn build_prompt(text: &str) -> Result<String> {
    PromptTemplate::default().render(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NetZero,
    Reduction,
    None,
    Unparseable,
}

impl Verdict {
    pub fn label(self) -> Option<TargetLabel> {
        match self {
            Verdict::NetZero => Some(TargetLabel::NetZero),
            Verdict::Reduction => Some(TargetLabel::Reduction),
            Verdict::None => Some(TargetLabel::None),
            Verdict::Unparseable => Option::None,
        }
    }
}

impl From<TargetLabel> for Verdict {
    fn from(l: TargetLabel) -> Self {
        match l {
            TargetLabel::NetZero => Verdict::NetZero,
            TargetLabel::Reduction => Verdict::Reduction,
            TargetLabel::None => Verdict::None,
        }
    }
}

/// The answer token the prompt asks for.
pub fn canonical_answer(label: TargetLabel) -> &'static str {
    match label {
        TargetLabel::NetZero => "Net Zero",
        TargetLabel::Reduction => "Reduction",
        TargetLabel::None => "None",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmVerdict {
    pub raw_response: String,
    pub parsed: Verdict,
}

fn token_patterns() -> &'static [(Verdict, Regex); 3] {
    static RE: OnceLock<[(Verdict, Regex); 3]> = OnceLock::new();
    RE.get_or_init(|| {
        [
            (Verdict::NetZero, Regex::new(r"(?i)\bnet[\s-]*zero\b").expect("regex")),
            (Verdict::Reduction, Regex::new(r"(?i)\breduction\b").expect("regex")),
            (Verdict::None, Regex::new(r"(?i)\bnone\b").expect("regex")),
        ]
    })
}

/// Maps a chat response onto a label.
///
/// After trimming whitespace and punctuation the response is compared
/// case-insensitively to the three answer tokens; failing that, a response
/// that mentions exactly one of the tokens gets that label. Anything else is
/// unparseable.
pub fn parse_response(raw: &str) -> LlmVerdict {
    let trimmed = raw.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation()).to_lowercase();
    let exact = match trimmed.as_str() {
        "net zero" => Some(Verdict::NetZero),
        "reduction" => Some(Verdict::Reduction),
        "none" => Some(Verdict::None),
        _ => Option::None,
    };
    let parsed = exact.unwrap_or_else(|| {
        let hits: Vec<Verdict> = token_patterns().iter().filter(|(_, re)| re.is_match(raw)).map(|(v, _)| *v).collect();
        match hits.as_slice() {
            [one] => *one,
            _ => Verdict::Unparseable,
        }
    });
    LlmVerdict { raw_response: raw.to_string(), parsed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::ClassLabel;
    use proptest::prelude::*;

    #[test]
    fn renders_between_markers() {
        let p = build_prompt("We aim for net zero by 2045.").unwrap();
        assert!(p.contains("Provided text: ^^^We aim for net zero by 2045.^^^"));
        for token in ["'Reduction'", "'Net Zero'", "'None'"] {
            assert!(p.contains(token), "{token}");
        }
        assert!(p.starts_with("Your task is to classify a provided text"));
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(build_prompt(""), Err(Error::Input(_))));
        assert!(matches!(build_prompt("   "), Err(Error::Input(_))));
    }

    #[test]
    fn template_validation() {
        assert!(PromptTemplate::new("no slot").is_err());
        assert!(PromptTemplate::new("^^^{text}^^^ and {text}").is_err());
        assert!(PromptTemplate::new("Classify: ^^^{text}^^^").is_ok());
    }

    #[test]
    fn parses_answers() {
        assert_eq!(parse_response("Net Zero").parsed, Verdict::NetZero);
        assert_eq!(parse_response("  reduction.").parsed, Verdict::Reduction);
        assert_eq!(parse_response("'None'").parsed, Verdict::None);
        assert_eq!(parse_response("The answer is: Net-Zero").parsed, Verdict::NetZero);
        assert_eq!(parse_response("It is both Reduction and Net Zero").parsed, Verdict::Unparseable);
        assert_eq!(parse_response("banana").parsed, Verdict::Unparseable);
        assert_eq!(parse_response("nonetheless unclear").parsed, Verdict::Unparseable);
        assert_eq!(parse_response("").parsed, Verdict::Unparseable);
    }

    #[test]
    fn canonical_answers_round_trip() {
        for &l in TargetLabel::ALL {
            assert_eq!(parse_response(canonical_answer(l)).parsed.label(), Some(l));
        }
    }

    proptest! {
        #[test]
        fn prompt_is_injective(a in "[a-zA-Z0-9 .,%^{}]{1,40}", b in "[a-zA-Z0-9 .,%^{}]{1,40}") {
            prop_assume!(a != b && !a.trim().is_empty() && !b.trim().is_empty());
            prop_assert_ne!(build_prompt(&a).unwrap(), build_prompt(&b).unwrap());
        }

        #[test]
        fn extract_inverts_render(text in "\\PC{1,60}") {
            prop_assume!(!text.trim().is_empty());
            let t = PromptTemplate::default();
            let prompt = t.render(&text).unwrap();
            prop_assert_eq!(t.extract_text(&prompt), Some(text.as_str()));
        }

        #[test]
        fn parse_is_total(raw in "\\PC{0,60}") {
            let v = parse_response(&raw);
            prop_assert_eq!(v.clone(), parse_response(&raw));
            prop_assert_eq!(v.raw_response, raw);
        }
    }
}
