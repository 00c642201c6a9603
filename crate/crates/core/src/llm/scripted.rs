use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Mutex;

use super::{truncate_at_stop, ChatRequest, Completion, LlmBackend, LlmError};

/// One canned response. Entries with a matcher are served only when the last
/// user message contains the matcher text; entries without one are served in
/// file order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matcher: Option<String>,
    pub response: String,
}

impl ScriptEntry {
    pub fn new(response: impl Into<String>) -> Self {
        Self { matcher: None, response: response.into() }
    }

    pub fn matching(matcher: impl Into<String>, response: impl Into<String>) -> Self {
        Self { matcher: Some(matcher.into()), response: response.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TranscriptEntry {
    pub request: ChatRequest,
    /// `None` when the script had nothing left to serve.
    pub response: Option<String>,
}

#[derive(Debug, Default)]
struct ScriptState {
    entries: Vec<ScriptEntry>,
    consumed: Vec<bool>,
    served: usize,
    transcript: Vec<TranscriptEntry>,
}

/// Deterministic stand-in for a chat model.
///
/// Selection: the first unconsumed entry whose matcher occurs in the last
/// user message wins; otherwise the first unconsumed entry without a matcher.
/// Consumption is serialized so entry order holds under concurrent callers.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    state: Mutex<ScriptState>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        let consumed = vec![false; entries.len()];
        Self {
            state: Mutex::new(ScriptState {
                entries,
                consumed,
                ..Default::default()
            }),
        }
    }

    /// Plain responses served in order.
    pub fn from_responses<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(responses.into_iter().map(ScriptEntry::new).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, LlmError> {
        let entries: Vec<ScriptEntry> =
            serde_json::from_str(text).map_err(|e| LlmError::ScriptParse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        Ok(Self::new(entries))
    }

    pub fn transcript(&self) -> Vec<TranscriptEntry> {
        self.lock().transcript.clone()
    }

    pub fn remaining(&self) -> usize {
        self.lock().consumed.iter().filter(|c| !**c).count()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, ScriptState> {
        self.state.lock().expect("script state poisoned")
    }
}

/// Loads a script file: a JSON array of `{"matcher"?, "response"}` objects.
pub fn load_script(path: impl AsRef<Path>) -> Result<ScriptedBackend, LlmError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| LlmError::Config(format!("cannot read script {}: {e}", path.display())))?;
    ScriptedBackend::from_json(&text)
}

impl LlmBackend for ScriptedBackend {
    fn complete(&self, request: &ChatRequest) -> Result<Completion, LlmError> {
        request.validate()?;
        let mut state = self.lock();
        let last_user = request.last_user_message().unwrap_or("");
        let matched = (0..state.entries.len()).find(|&i| {
            !state.consumed[i]
                && state.entries[i]
                    .matcher
                    .as_deref()
                    .is_some_and(|m| last_user.contains(m))
        });
        let pick = matched.or_else(|| {
            (0..state.entries.len()).find(|&i| !state.consumed[i] && state.entries[i].matcher.is_none())
        });
        let Some(i) = pick else {
            state.transcript.push(TranscriptEntry {
                request: request.clone(),
                response: None,
            });
            return Err(LlmError::ScriptExhausted { served: state.served });
        };
        state.consumed[i] = true;
        state.served += 1;
        let completion = truncate_at_stop(&state.entries[i].response, &request.stop_sequences);
        state.transcript.push(TranscriptEntry {
            request: request.clone(),
            response: Some(completion.text.clone()),
        });
        Ok(completion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{ChatMessage, GenerationSettings};

    fn req(text: &str) -> ChatRequest {
        ChatRequest::new(vec![ChatMessage::user(text)], &GenerationSettings::deterministic())
    }

    #[test]
    fn single_entry_is_returned_verbatim() {
        let b = ScriptedBackend::from_responses(["hello there"]);
        assert_eq!(b.complete(&req("x")).unwrap().text, "hello there");
    }

    #[test]
    fn empty_script_is_exhausted() {
        let b = ScriptedBackend::from_json("[]").unwrap();
        assert!(matches!(b.complete(&req("x")), Err(LlmError::ScriptExhausted { served: 0 })));
        assert_eq!(b.transcript().len(), 1);
    }

    #[test]
    fn entries_served_in_order() {
        let b = ScriptedBackend::from_responses(["one", "two"]);
        assert_eq!(b.complete(&req("x")).unwrap().text, "one");
        assert_eq!(b.complete(&req("x")).unwrap().text, "two");
        assert!(b.complete(&req("x")).is_err());
    }

    #[test]
    fn stop_sequences_are_honored() {
        let b = ScriptedBackend::from_responses(["...Final Answer: ok [END] trailing"]);
        let c = b.complete(&req("x").with_stop_sequences(["[END]"])).unwrap();
        assert_eq!(c.text, "...Final Answer: ok ");
        assert!(!c.text.contains("[END] trailing"));
    }

    #[test]
    fn matcher_entries_wait_for_their_input() {
        let b = ScriptedBackend::new(vec![
            ScriptEntry::matching("I drink a healing potion", "healed"),
            ScriptEntry::new("plain"),
        ]);
        assert_eq!(b.complete(&req("I open the door")).unwrap().text, "plain");
        assert!(b.complete(&req("I open the door")).is_err());
        assert_eq!(b.complete(&req("I drink a healing potion.")).unwrap().text, "healed");
    }

    #[test]
    fn parse_error_reports_line() {
        let err = ScriptedBackend::from_json("[\n {\"response\": \"a\"},\n {\"response\": }\n]").unwrap_err();
        match err {
            LlmError::ScriptParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identical_runs_give_identical_transcripts() {
        let run = || {
            let b = ScriptedBackend::from_responses(["a", "b"]);
            b.complete(&req("1")).unwrap();
            b.complete(&req("2")).unwrap();
            serde_json::to_string(&b.transcript()).unwrap()
        };
        assert_eq!(run(), run());
    }
}
