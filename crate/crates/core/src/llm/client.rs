use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::label::TargetLabel;
use crate::llm::prompt::{canonical_answer, PromptTemplate};

/// A single-turn chat completion endpoint.
pub trait ChatClient: Send + Sync {
    fn model(&self) -> &str;

    /// Sends one user message and returns the assistant's reply text.
    fn complete(&self, prompt: &str) -> Result<String>;
}

/// Cache key: hex SHA-256 of the model name, a newline, and the prompt.
pub fn cache_key(model: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(model.as_bytes());
    h.update(b"\n");
    h.update(prompt.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub model: String,
    pub prompt: String,
    pub response: String,
}

/// Disk cache in front of another client. One `<key>.json` file per
/// completion. Without an inner client the cache replays only and a miss is
/// an error.
pub struct CachedClient<C> {
    dir: PathBuf,
    model: String,
    inner: Option<C>,
}

impl<C: ChatClient> CachedClient<C> {
    pub fn new(dir: impl Into<PathBuf>, inner: C) -> Self {
        let model = inner.model().to_string();
        CachedClient { dir: dir.into(), model, inner: Some(inner) }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, prompt: &str) -> PathBuf {
        self.dir.join(format!("{}.json", cache_key(&self.model, prompt)))
    }

    fn lookup(&self, prompt: &str) -> Result<Option<String>> {
        let path = self.path_for(prompt);
        if !path.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let entry: CacheEntry = serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
        Ok(Some(entry.response))
    }
}

impl CachedClient<NoClient> {
    /// Offline replay of a recorded cache.
    pub fn replay(dir: impl Into<PathBuf>, model: impl Into<String>) -> Self {
        CachedClient { dir: dir.into(), model: model.into(), inner: None }
    }
}

impl<C: ChatClient> ChatClient for CachedClient<C> {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        if let Some(hit) = self.lookup(prompt)? {
            return Ok(hit);
        }
        let Some(inner) = &self.inner else {
            return Err(Error::Input(format!("no cached completion for key {}", cache_key(&self.model, prompt))));
        };
        let response = inner.complete(prompt)?;
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let entry = CacheEntry { model: self.model.clone(), prompt: prompt.to_string(), response: response.clone() };
        let path = self.path_for(prompt);
        let text = serde_json::to_string_pretty(&entry).expect("serializable");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(response)
    }
}

/// Placeholder inner client for replay-only caches. Never called.
pub struct NoClient;

impl ChatClient for NoClient {
    fn model(&self) -> &str {
        ""
    }

    fn complete(&self, _prompt: &str) -> Result<String> {
        Err(Error::Input("replay-only client".into()))
    }
}

/// Answers with the gold label of whatever text the prompt embeds.
pub struct GoldEchoClient {
    template: PromptTemplate,
    gold: HashMap<String, TargetLabel>,
}

impl GoldEchoClient {
    pub fn new<'a>(pairs: impl IntoIterator<Item = (&'a str, TargetLabel)>) -> Self {
        GoldEchoClient { template: PromptTemplate::default(), gold: pairs.into_iter().map(|(t, l)| (t.to_string(), l)).collect() }
    }
}

impl ChatClient for GoldEchoClient {
    fn model(&self) -> &str {
        "gold-echo"
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        let text = self.template.extract_text(prompt).ok_or_else(|| Error::Input("prompt not built from template".into()))?;
        let label = self.gold.get(text).ok_or_else(|| Error::UnknownSample(text.to_string()))?;
        Ok(canonical_answer(*label).to_string())
    }
}

/// Always returns the same reply.
pub struct ConstantClient(pub String);

impl ChatClient for ConstantClient {
    fn model(&self) -> &str {
        "constant"
    }

    fn complete(&self, _prompt: &str) -> Result<String> {
        Ok(self.0.clone())
    }
}

#[cfg(feature = "http")]
pub use http::HttpChatClient;

#[cfg(feature = "http")]
mod http {
    use std::time::Duration;

    use serde_json::{json, Value};

    use super::ChatClient;
    use crate::error::{Error, Result};

    pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

    /// OpenAI-compatible chat completions over HTTPS, temperature 0.
    pub struct HttpChatClient {
        endpoint: String,
        model: String,
        api_key: String,
        agent: ureq::Agent,
    }

    impl HttpChatClient {
        pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>) -> Self {
            let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build();
            HttpChatClient { endpoint: endpoint.into(), model: model.into(), api_key: api_key.into(), agent }
        }

        /// Reads the key from `key_var`; a missing or empty variable is a
        /// config error.
        pub fn from_env(endpoint: Option<&str>, model: &str, key_var: &str) -> Result<Self> {
            let key = std::env::var(key_var).ok().filter(|k| !k.is_empty());
            let key = key.ok_or_else(|| Error::Config(format!("environment variable {key_var} is not set")))?;
            Ok(Self::new(endpoint.unwrap_or(DEFAULT_ENDPOINT), model, key))
        }
    }

    impl ChatClient for HttpChatClient {
        fn model(&self) -> &str {
            &self.model
        }

        fn complete(&self, prompt: &str) -> Result<String> {
            let body = json!({
                "model": self.model,
                "temperature": 0,
                "n": 1,
                "messages": [{"role": "user", "content": prompt}],
            });
            let resp = self
                .agent
                .post(&self.endpoint)
                .set("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(body)
                .map_err(|e| Error::Transport(e.to_string()))?;
            let value: Value = resp.into_json().map_err(|e| Error::Transport(e.to_string()))?;
            value["choices"][0]["message"]["content"]
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::parse("chat completion", "missing choices[0].message.content"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_key_matches_reference_digest() {
        // reference values from Python's hashlib
        assert_eq!(cache_key("m", "p"), "de175578803a8298acb0a6cd3de3d48cf36c8a97b33c96634e381cdba8313919");
        assert_eq!(cache_key("gpt-3.5-turbo", "x"), "1989c7a075378737a2cfd0a798b1699999b62e777271f20a4136d1a08cef508a");
    }

    #[test]
    fn cache_records_then_replays() {
        let dir = tempfile::tempdir().unwrap();
        let live = CachedClient::new(dir.path(), ConstantClient("Reduction".into()));
        assert_eq!(live.complete("hello").unwrap(), "Reduction");
        let replay = CachedClient::replay(dir.path(), "constant");
        assert_eq!(replay.complete("hello").unwrap(), "Reduction");
        assert!(matches!(replay.complete("other"), Err(Error::Input(_))));
        let other_model = CachedClient::replay(dir.path(), "gpt");
        assert!(other_model.complete("hello").is_err());
    }

    #[test]
    fn gold_echo_answers_gold() {
        let c = GoldEchoClient::new([("We aim for net zero.", TargetLabel::NetZero)]);
        let prompt = crate::llm::build_prompt("We aim for net zero.").unwrap();
        assert_eq!(c.complete(&prompt).unwrap(), "Net Zero");
        assert!(c.complete("free text").is_err());
    }
}
