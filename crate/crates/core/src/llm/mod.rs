//! Chat-completion backends.
//!
//! The engines talk to an [`LlmBackend`]: either the HTTP client for an
//! OpenAI-style chat-completions endpoint or a [`ScriptedBackend`] that
//! replays canned responses for offline tests and deterministic replays.

mod http;
mod scripted;

pub use http::{HttpBackend, HttpConfig, RetryPolicy};
pub use scripted::{load_script, ScriptEntry, ScriptedBackend, TranscriptEntry};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: ChatRole::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: ChatRole::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: ChatRole::Assistant, content: content.into() }
    }
}

/// Model, temperature and token budget applied to every request an engine makes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationSettings {
    pub model: String,
    pub temperature: f32,
    pub max_tokens: u32,
}

impl GenerationSettings {
    pub const PLAY_TEMPERATURE: f32 = 0.7;
    pub const TEST_TEMPERATURE: f32 = 0.0;

    /// Settings for live play.
    pub fn play(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            temperature: Self::PLAY_TEMPERATURE,
            max_tokens: 1024,
        }
    }

    /// Settings for deterministic runs.
    pub fn deterministic() -> Self {
        Self {
            model: "scripted".into(),
            temperature: Self::TEST_TEMPERATURE,
            max_tokens: 1024,
        }
    }
}

impl Default for GenerationSettings {
    fn default() -> Self {
        Self::deterministic()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub model: String,
    pub temperature: f32,
    pub stop_sequences: Vec<String>,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn new(messages: Vec<ChatMessage>, settings: &GenerationSettings) -> Self {
        Self {
            messages,
            model: settings.model.clone(),
            temperature: settings.temperature,
            stop_sequences: Vec::new(),
            max_tokens: settings.max_tokens,
        }
    }

    pub fn with_stop_sequences<I, S>(mut self, stops: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.stop_sequences = stops.into_iter().map(Into::into).collect();
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.messages.is_empty() {
            return Err(LlmError::InvalidRequest("request has no messages".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.max_tokens == 0 {
            return Err(LlmError::InvalidRequest("maxTokens must be positive".into()));
        }
        Ok(())
    }

    pub fn last_user_message(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == ChatRole::User)
            .map(|m| m.content.as_str())
    }

    /// Total characters of message content.
    pub fn content_len(&self) -> usize {
        self.messages.iter().map(|m| m.content.chars().count()).sum()
    }
}

/// Assistant text plus the stop sequence that ended it, when one did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub stop: Option<String>,
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("the provider's content filter refused the request: {0}")]
    ContentFiltered(String),
    #[error("script exhausted after {served} responses")]
    ScriptExhausted { served: usize },
    #[error("script parse error at line {line}, column {column}: {message}")]
    ScriptParse { line: usize, column: usize, message: String },
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
}

impl LlmError {
    /// Errors worth another attempt: network failures, rate limits, 5xx.
    pub fn is_retryable(&self) -> bool {
        match self {
            LlmError::Transport(_) => true,
            LlmError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait LlmBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<Completion, LlmError>;
}

impl<T: LlmBackend + ?Sized> LlmBackend for std::sync::Arc<T> {
    fn complete(&self, request: &ChatRequest) -> Result<Completion, LlmError> {
        (**self).complete(request)
    }
}

/// Cuts `text` before the earliest occurrence of any stop sequence.
pub fn truncate_at_stop(text: &str, stops: &[String]) -> Completion {
    let earliest = stops
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| text.find(s.as_str()).map(|i| (i, s)))
        .min_by_key(|(i, _)| *i);
    match earliest {
        Some((i, s)) => Completion {
            text: text[..i].to_string(),
            stop: Some(s.clone()),
        },
        None => Completion {
            text: text.to_string(),
            stop: None,
        },
    }
}
