//! The Thought / Action / Action Input / Observation / Final Answer grammar.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ReactStep;

pub const END_MARKER: &str = "[END]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Marker {
    Thought,
    ActionInput,
    Action,
    Observation,
    FinalAnswer,
}

impl Marker {
    // "Action Input:" must be tried before its prefix "Action:".
    const ORDER: [Marker; 5] = [
        Marker::Thought,
        Marker::ActionInput,
        Marker::Action,
        Marker::Observation,
        Marker::FinalAnswer,
    ];

    fn label(self) -> &'static str {
        match self {
            Marker::Thought => "Thought:",
            Marker::ActionInput => "Action Input:",
            Marker::Action => "Action:",
            Marker::Observation => "Observation:",
            Marker::FinalAnswer => "Final Answer:",
        }
    }
}

/// A marker and the text that follows it up to the next marker.
#[derive(Debug)]
struct Segment<'a> {
    marker: Marker,
    body: &'a str,
}

/// Splits text into marker segments. Markers count only at the start of a
/// line (after indentation); text before the first marker is ignored.
fn segments(text: &str) -> Vec<Segment<'_>> {
    let mut found: Vec<(usize, usize, Marker)> = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let indent = line.len() - line.trim_start().len();
        let rest = &line[indent..];
        if let Some(m) = Marker::ORDER.iter().find(|m| rest.starts_with(m.label())) {
            let start = offset + indent;
            found.push((start, start + m.label().len(), *m));
        }
        offset += line.len();
    }
    found
        .iter()
        .enumerate()
        .map(|(i, &(_, body_start, marker))| {
            let end = found.get(i + 1).map_or(text.len(), |n| n.0);
            Segment {
                marker,
                body: &text[body_start..end],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ModelOutput {
    #[serde(rename_all = "camelCase")]
    ToolCall {
        thought: String,
        action: String,
        action_input: String,
    },
    #[serde(rename_all = "camelCase")]
    Final {
        thought: String,
        answer: String,
        /// The answer was not followed by the end marker.
        missing_end: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{reason}")]
pub struct ParseError {
    pub reason: String,
    pub raw: String,
}

impl ParseError {
    fn new(reason: impl Into<String>, raw: &str) -> Self {
        Self {
            reason: reason.into(),
            raw: raw.to_string(),
        }
    }
}

/// Splits `Battle[{...}]` into the tool name and the bracketed input.
fn split_bracket_form(action: &str) -> Option<(&str, &str)> {
    let open = action.find('[')?;
    let close = action.rfind(']')?;
    let name = action[..open].trim();
    if close < open || name.is_empty() || name.contains(char::is_whitespace) {
        return None;
    }
    Some((name, action[open + 1..close].trim()))
}

fn clean_tool_name(name: &str) -> String {
    name.trim().trim_matches(|c| c == '`' || c == '"' || c == '\'').trim().to_string()
}

/// Parses one model completion.
///
/// Text after `[END]` or after a model-written `Observation:` is discarded.
/// When both an Action and a Final Answer appear, whichever comes first wins.
pub fn parse_model_output(text: &str) -> Result<ModelOutput, ParseError> {
    let (body, end_seen) = match text.find(END_MARKER) {
        Some(i) => (&text[..i], true),
        None => (text, false),
    };
    let segs = segments(body);
    let cut = segs
        .iter()
        .position(|s| s.marker == Marker::Observation)
        .unwrap_or(segs.len());
    let segs = &segs[..cut];

    let thought = segs
        .iter()
        .find(|s| s.marker == Marker::Thought)
        .map(|s| s.body.trim().to_string())
        .unwrap_or_default();
    let decisive = segs
        .iter()
        .position(|s| matches!(s.marker, Marker::Action | Marker::FinalAnswer));
    let Some(i) = decisive else {
        return Err(ParseError::new("no Action or Final Answer found", text));
    };

    if segs[i].marker == Marker::FinalAnswer {
        let answer = segs[i].body.trim().to_string();
        if answer.is_empty() {
            return Err(ParseError::new("Final Answer is empty", text));
        }
        return Ok(ModelOutput::Final {
            thought,
            answer,
            missing_end: !end_seen,
        });
    }

    let action_body = segs[i].body.trim();
    if let Some((name, input)) = split_bracket_form(action_body) {
        return Ok(ModelOutput::ToolCall {
            thought,
            action: clean_tool_name(name),
            action_input: input.to_string(),
        });
    }
    let action = clean_tool_name(action_body.lines().next().unwrap_or(""));
    if action.is_empty() {
        return Err(ParseError::new("Action names no tool", text));
    }
    let input = segs[i + 1..]
        .iter()
        .take_while(|s| s.marker != Marker::Action && s.marker != Marker::FinalAnswer)
        .find(|s| s.marker == Marker::ActionInput);
    match input {
        Some(s) => Ok(ModelOutput::ToolCall {
            thought,
            action,
            action_input: s.body.trim().to_string(),
        }),
        None => Err(ParseError::new(format!("Action {action} has no Action Input"), text)),
    }
}

/// Serializes steps in the same grammar the model is asked to emit.
pub fn render_history(steps: &[ReactStep]) -> String {
    let mut out = String::new();
    for step in steps {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str("Thought: ");
        out.push_str(&step.thought);
        if let Some(action) = &step.action {
            out.push_str("\nAction: ");
            out.push_str(action);
            out.push_str("\nAction Input: ");
            out.push_str(step.action_input.as_deref().unwrap_or(""));
        }
        if let Some(obs) = &step.observation {
            out.push_str("\nObservation: ");
            out.push_str(obs);
        }
    }
    out
}

/// Inverse of [`render_history`].
pub fn parse_history(text: &str) -> Result<Vec<ReactStep>, ParseError> {
    let mut steps: Vec<ReactStep> = Vec::new();
    for seg in segments(text) {
        let body = seg.body.trim().to_string();
        match seg.marker {
            Marker::Thought => steps.push(ReactStep {
                thought: body,
                action: None,
                action_input: None,
                observation: None,
            }),
            Marker::FinalAnswer => {
                return Err(ParseError::new("history cannot contain a Final Answer", text))
            }
            other => {
                let Some(step) = steps.last_mut() else {
                    return Err(ParseError::new(format!("{} before any Thought", other.label()), text));
                };
                let slot = match other {
                    Marker::Action => &mut step.action,
                    Marker::ActionInput => &mut step.action_input,
                    _ => &mut step.observation,
                };
                if slot.is_some() {
                    return Err(ParseError::new(format!("repeated {}", other.label()), text));
                }
                *slot = Some(body);
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tool_call_lines() {
        let out = parse_model_output(
            "Thought: Do I need to use a tool? Yes\nAction: Battle\nAction Input: {\"a\": 1}",
        )
        .unwrap();
        assert_eq!(
            out,
            ModelOutput::ToolCall {
                thought: "Do I need to use a tool? Yes".into(),
                action: "Battle".into(),
                action_input: "{\"a\": 1}".into(),
            }
        );
    }

    #[test]
    fn final_answer_strips_end() {
        let out = parse_model_output("Thought: Do I need to use a tool? No\nFinal Answer: You strike true. [END]")
            .unwrap();
        assert_eq!(
            out,
            ModelOutput::Final {
                thought: "Do I need to use a tool? No".into(),
                answer: "You strike true.".into(),
                missing_end: false,
            }
        );
    }

    #[test]
    fn missing_end_is_flagged() {
        match parse_model_output("  Thought: No\n  Final Answer: ok  ").unwrap() {
            ModelOutput::Final { answer, missing_end, .. } => {
                assert_eq!(answer, "ok");
                assert!(missing_end);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unmarked_text_is_an_error() {
        let err = parse_model_output("I attack the guard.").unwrap_err();
        assert_eq!(err.raw, "I attack the guard.");
    }

    #[test]
    fn bracket_form_spans_lines() {
        let text = "Thought: Do I need to use a tool? Yes.\nAction: Battle[{\n  \"x\": [1, 2]\n}]";
        match parse_model_output(text).unwrap() {
            ModelOutput::ToolCall { action, action_input, .. } => {
                assert_eq!(action, "Battle");
                assert_eq!(action_input, "{\n  \"x\": [1, 2]\n}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hallucinated_observation_is_dropped() {
        let text = "Thought: Yes\nAction: Heal\nAction Input: {}\nObservation: healed!\nThought: No\nFinal Answer: done";
        assert!(matches!(parse_model_output(text).unwrap(), ModelOutput::ToolCall { .. }));
    }

    #[test]
    fn action_without_input_is_an_error() {
        assert!(parse_model_output("Thought: Yes\nAction: Battle").is_err());
    }

    #[test]
    fn history_round_trip() {
        let steps = vec![
            ReactStep::tool("Yes", "Battle", "{\"a\": 1}", "line one.\nline two."),
            ReactStep::tool("Yes again", "HealCharacter", "{}", "ok"),
        ];
        assert_eq!(parse_history(&render_history(&steps)).unwrap(), steps);
    }
}
