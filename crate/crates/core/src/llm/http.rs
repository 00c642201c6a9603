use serde::Deserialize;
use serde_json::json;
use std::fmt;
use std::sync::OnceLock;
use std::time::Duration;

use super::{truncate_at_stop, ChatRequest, Completion, LlmBackend, LlmError};

pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-4";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl RetryPolicy {
    fn delay_after(&self, attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1 << attempt.saturating_sub(1).min(16))
    }
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(500),
        }
    }
}

#[derive(Clone)]
pub struct HttpConfig {
    pub api_base: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl HttpConfig {
    pub fn new(api_base: impl Into<String>, api_key: Option<String>, model: impl Into<String>) -> Self {
        Self {
            api_base: api_base.into(),
            api_key,
            model: model.into(),
            timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
        }
    }

    /// Reads `GM_API_KEY`, `GM_API_BASE` and `GM_MODEL`.
    pub fn from_env() -> Result<Self, LlmError> {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.trim().is_empty());
        let api_base = var("GM_API_BASE").unwrap_or_else(|| DEFAULT_API_BASE.to_string());
        let api_key = var("GM_API_KEY");
        if api_key.is_none() && api_base == DEFAULT_API_BASE {
            return Err(LlmError::Config(
                "GM_API_KEY is not set (set it, or point GM_API_BASE at a local server)".into(),
            ));
        }
        let model = var("GM_MODEL").unwrap_or_else(|| DEFAULT_MODEL.to_string());
        Ok(Self::new(api_base, api_key, model))
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.api_base.trim_end_matches('/'))
    }
}

impl fmt::Debug for HttpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpConfig")
            .field("api_base", &self.api_base)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("model", &self.model)
            .field("timeout", &self.timeout)
            .field("retry", &self.retry)
            .finish()
    }
}

/// Client for an OpenAI-compatible chat-completions endpoint.
///
/// Blocking by design; async callers should run it on a blocking thread.
pub struct HttpBackend {
    config: HttpConfig,
    client: OnceLock<reqwest::blocking::Client>,
}

impl fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpBackend").field("config", &self.config).finish()
    }
}

#[derive(Deserialize)]
struct ApiResponse {
    choices: Vec<ApiChoice>,
}

#[derive(Deserialize)]
struct ApiChoice {
    message: Option<ApiMessage>,
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ApiMessage {
    content: Option<String>,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        Self {
            config,
            client: OnceLock::new(),
        }
    }

    pub fn from_env() -> Result<Self, LlmError> {
        HttpConfig::from_env().map(Self::new)
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    fn client(&self) -> Result<&reqwest::blocking::Client, LlmError> {
        if let Some(c) = self.client.get() {
            return Ok(c);
        }
        let c = reqwest::blocking::Client::builder()
            .timeout(self.config.timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(self.client.get_or_init(|| c))
    }

    fn body(&self, request: &ChatRequest) -> serde_json::Value {
        let model = if request.model.is_empty() || request.model == "scripted" {
            &self.config.model
        } else {
            &request.model
        };
        let mut body = json!({
            "model": model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        if !request.stop_sequences.is_empty() {
            // the API accepts at most four
            let stops: Vec<&String> = request.stop_sequences.iter().take(4).collect();
            body["stop"] = json!(stops);
        }
        body
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<String, LlmError> {
        let mut call = self.client()?.post(self.config.endpoint()).json(body);
        if let Some(key) = &self.config.api_key {
            call = call.bearer_auth(key);
        }
        let response = call.send().map_err(|e| LlmError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.text().map_err(|e| LlmError::Transport(e.to_string()))?;
        if status != 200 {
            if is_content_filter_error(&text) {
                return Err(LlmError::ContentFiltered(text));
            }
            return Err(LlmError::Http { status, body: text });
        }
        let parsed: ApiResponse =
            serde_json::from_str(&text).map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| LlmError::MalformedResponse("no choices".into()))?;
        if choice.finish_reason.as_deref() == Some("content_filter") {
            return Err(LlmError::ContentFiltered("completion stopped by content filter".into()));
        }
        choice
            .message
            .and_then(|m| m.content)
            .ok_or_else(|| LlmError::MalformedResponse("choice has no content".into()))
    }
}

fn is_content_filter_error(body: &str) -> bool {
    let Ok(v) = serde_json::from_str::<serde_json::Value>(body) else {
        return false;
    };
    let err = &v["error"];
    err["code"].as_str() == Some("content_filter")
        || err["innererror"]["code"].as_str() == Some("ResponsibleAIPolicyViolation")
}

impl LlmBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<Completion, LlmError> {
        request.validate()?;
        let body = self.body(request);
        let attempts = self.config.retry.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            match self.attempt(&body) {
                Ok(text) => return Ok(truncate_at_stop(&text, &request.stop_sequences)),
                Err(e) if e.is_retryable() && attempt < attempts => {
                    let delay = self.config.retry.delay_after(attempt);
                    tracing::warn!(attempt, ?delay, error = %e, "retrying chat completion");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{ChatMessage, GenerationSettings};
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Serves the given (status, body) pairs, one per connection.
    fn fake_server(replies: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = calls.clone();
        std::thread::spawn(move || {
            for (status, body) in replies {
                let Ok((stream, _)) = listener.accept() else { return };
                counter.fetch_add(1, Ordering::SeqCst);
                let mut reader = BufReader::new(stream);
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                let mut stream = reader.into_inner();
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        (format!("http://{addr}/v1"), calls)
    }

    fn backend(base: String) -> HttpBackend {
        let mut config = HttpConfig::new(base, Some("sk-secret".into()), "test-model");
        config.retry.base_delay = Duration::from_millis(5);
        HttpBackend::new(config)
    }

    fn request() -> ChatRequest {
        ChatRequest::new(vec![ChatMessage::user("hi")], &GenerationSettings::deterministic())
            .with_stop_sequences(["[END]"])
    }

    fn ok_body(text: &str) -> String {
        json!({"choices": [{"message": {"role": "assistant", "content": text}, "finish_reason": "stop"}]}).to_string()
    }

    #[test]
    fn retries_rate_limits_then_succeeds() {
        let (base, calls) = fake_server(vec![
            (429, "{}".into()),
            (429, "{}".into()),
            (200, ok_body("Final Answer: fine [END] junk")),
        ]);
        let c = backend(base).complete(&request()).unwrap();
        assert_eq!(c.text, "Final Answer: fine ");
        assert_eq!(calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn gives_up_after_three_attempts() {
        let (base, calls) = fake_server(vec![(503, "{}".into()); 3]);
        let err = backend(base).complete(&request()).unwrap_err();
        assert!(matches!(err, LlmError::Http { status: 503, .. }));
        assert_eq!(calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn content_filter_is_distinct_and_not_retried() {
        let body = json!({"error": {"code": "content_filter", "message": "filtered"}}).to_string();
        let (base, calls) = fake_server(vec![(400, body)]);
        let err = backend(base).complete(&request()).unwrap_err();
        assert!(matches!(err, LlmError::ContentFiltered(_)));
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn debug_output_redacts_key() {
        let b = backend("http://localhost/v1".into());
        let shown = format!("{b:?}");
        assert!(!shown.contains("sk-secret"));
        assert!(shown.contains("redacted"));
    }

    #[test]
    fn request_body_uses_configured_model_and_stops() {
        let b = backend("http://localhost/v1".into());
        let body = b.body(&request());
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["stop"], json!(["[END]"]));
        assert_eq!(body["messages"][0]["role"], "user");
    }
}
