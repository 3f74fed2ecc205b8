//! Chat-completion backends.

use std::collections::VecDeque;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use super::{ChatRole, Message};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("network error: {0}")]
    Network(String),
    #[error("HTTP status {status}: {body}")]
    HttpStatus { status: u16, body: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("scripted backend has no reply left")]
    Exhausted,
    #[error("invalid backend configuration: {0}")]
    Config(String),
}

pub trait ChatBackend {
    fn complete(&mut self, messages: &[Message]) -> Result<String, BackendError>;
}

/// Replies with the final user message verbatim.
#[derive(Debug, Default, Clone)]
pub struct EchoBackend;

impl ChatBackend for EchoBackend {
    fn complete(&mut self, messages: &[Message]) -> Result<String, BackendError> {
        messages
            .iter()
            .rev()
            .find(|m| m.role == ChatRole::User)
            .map(|m| m.content.clone())
            .ok_or_else(|| BackendError::MalformedResponse("no user message to echo".into()))
    }
}

/// Returns canned replies in order.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    replies: VecDeque<String>,
}

impl ScriptedBackend {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            replies: replies.into_iter().map(Into::into).collect(),
        }
    }

    /// Accepts `["a", "b"]` or `{"replies": ["a", "b"]}`.
    pub fn from_json(text: &str) -> Result<Self, BackendError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| BackendError::Config(format!("invalid stub script: {e}")))?;
        let list = match &value {
            Value::Array(a) => a,
            Value::Object(o) => o
                .get("replies")
                .and_then(Value::as_array)
                .ok_or_else(|| BackendError::Config("stub script object needs a `replies` array".into()))?,
            _ => return Err(BackendError::Config("stub script must be an array or object".into())),
        };
        let replies = list
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| BackendError::Config("stub replies must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(replies))
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&mut self, _messages: &[Message]) -> Result<String, BackendError> {
        self.replies.pop_front().ok_or(BackendError::Exhausted)
    }
}

/// OpenAI-compatible `chat/completions` endpoint with bearer auth.
#[derive(Debug, Clone)]
pub struct HttpChatBackend {
    pub endpoint: String,
    pub model: String,
    api_key: Option<String>,
    pub temperature: f64,
    pub timeout: Duration,
}

pub const DEFAULT_MODEL: &str = "llama3-8b-8192";

pub fn http_chat_backend(endpoint: &str, model: &str, api_key: Option<&str>) -> Result<HttpChatBackend, BackendError> {
    if !(endpoint.starts_with("http://") || endpoint.starts_with("https://")) {
        return Err(BackendError::Config(format!("endpoint must be an http(s) URL, got {endpoint:?}")));
    }
    Ok(HttpChatBackend {
        endpoint: endpoint.to_string(),
        model: model.to_string(),
        api_key: api_key.map(str::to_string),
        temperature: 0.0,
        timeout: Duration::from_secs(60),
    })
}

impl HttpChatBackend {
    pub fn request_body(&self, messages: &[Message]) -> Value {
        json!({
            "model": self.model,
            "messages": messages
                .iter()
                .map(|m| json!({"role": m.role.as_str(), "content": m.content}))
                .collect::<Vec<_>>(),
            "temperature": self.temperature,
        })
    }
}

/// Content of the first choice of a chat-completions response.
pub fn parse_completion(body: &str) -> Result<String, BackendError> {
    let value: Value =
        serde_json::from_str(body).map_err(|e| BackendError::MalformedResponse(format!("invalid JSON: {e}")))?;
    value
        .get("choices")
        .and_then(Value::as_array)
        .and_then(|c| c.first())
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::MalformedResponse("missing choices[0].message.content".into()))
}

impl ChatBackend for HttpChatBackend {
    fn complete(&mut self, messages: &[Message]) -> Result<String, BackendError> {
        let agent = ureq::AgentBuilder::new().timeout(self.timeout).build();
        let mut request = agent.post(&self.endpoint).set("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            request = request.set("Authorization", &format!("Bearer {key}"));
        }
        let body = self.request_body(messages).to_string();
        match request.send_string(&body) {
            Ok(resp) => {
                let text = resp
                    .into_string()
                    .map_err(|e| BackendError::Network(e.to_string()))?;
                parse_completion(&text)
            }
            Err(ureq::Error::Status(status, resp)) => Err(BackendError::HttpStatus {
                status,
                body: resp.into_string().unwrap_or_default(),
            }),
            Err(ureq::Error::Transport(t)) => Err(BackendError::Network(t.to_string())),
        }
    }
}
