//! ReAct agent runtime: trajectory grammar, prompt templates, tool registry
//! and the loop that drives a model through Thought, Action and Observation
//! steps until it gives a Final Answer.

mod parse;
mod registry;
mod template;

pub use parse::{parse_history, parse_model_output, render_history, ModelOutput, ParseError, END_MARKER};
pub use registry::{Registry, RegistryError, Tool, ToolCatalog};
pub use template::{Bindings, PromptTemplate, TemplateError};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{ChatMessage, ChatRequest, GenerationSettings, LlmBackend, LlmError};
use crate::state::Clock;

pub const DEFAULT_MAX_STEPS: usize = 8;
pub const STOP_SEQUENCES: [&str; 2] = ["Observation:", END_MARKER];
pub const CORRECTION: &str =
    "Your response was malformed. Follow the Thought/Action/Action Input format or give a Final Answer.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReactStep {
    pub thought: String,
    pub action: Option<String>,
    pub action_input: Option<String>,
    pub observation: Option<String>,
}

impl ReactStep {
    pub fn tool(
        thought: impl Into<String>,
        action: impl Into<String>,
        input: impl Into<String>,
        observation: impl Into<String>,
    ) -> Self {
        Self {
            thought: thought.into(),
            action: Some(action.into()),
            action_input: Some(input.into()),
            observation: Some(observation.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    FinalAnswer,
    StepLimit,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParseFailure {
    /// Index of the step the model was trying to produce.
    pub step: usize,
    pub reason: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReactTrajectory {
    pub steps: Vec<ReactStep>,
    pub final_thought: Option<String>,
    pub final_answer: Option<String>,
    pub terminated: Termination,
    pub parse_failures: Vec<ParseFailure>,
    /// The final answer arrived without the end marker.
    pub missing_end_marker: bool,
    pub error: Option<String>,
    pub model_calls: usize,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl ReactTrajectory {
    fn begin(at: DateTime<Utc>) -> Self {
        Self {
            steps: Vec::new(),
            final_thought: None,
            final_answer: None,
            terminated: Termination::Error,
            parse_failures: Vec::new(),
            missing_end_marker: false,
            error: None,
            model_calls: 0,
            started_at: at,
            finished_at: at,
        }
    }

    pub fn actions(&self) -> Vec<&str> {
        self.steps.iter().filter_map(|s| s.action.as_deref()).collect()
    }
}

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("invalid loop setup: {0}")]
    Setup(String),
    #[error("model call failed after {} steps: {source}", trajectory.steps.len())]
    Backend {
        source: LlmError,
        trajectory: Box<ReactTrajectory>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    pub max_steps: usize,
    pub generation: GenerationSettings,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            generation: GenerationSettings::default(),
        }
    }
}

/// One agent: its prompt and its tools.
pub struct Agent<'a, C: ?Sized> {
    pub template: &'a PromptTemplate,
    pub registry: &'a Registry<C>,
}

/// Runs the ReAct loop.
///
/// `bindings` supplies every placeholder except `{tools}`, `{tool_names}`
/// and `{history}`, which the loop fills. The tool catalog is rendered once
/// at the start. Each call sends the whole rendered prompt as one user
/// message. A malformed completion gets one corrective retry per step; a
/// second malformed completion ends the trajectory with `Error`.
pub fn run_loop<C: ?Sized>(
    agent: &Agent<'_, C>,
    bindings: &Bindings,
    ctx: &mut C,
    backend: &dyn LlmBackend,
    config: &LoopConfig,
    clock: &dyn Clock,
) -> Result<ReactTrajectory, LoopError> {
    if config.max_steps == 0 {
        return Err(LoopError::Setup("maxSteps must be at least 1".into()));
    }
    let catalog = agent
        .registry
        .render_catalog(ctx)
        .map_err(|e| LoopError::Setup(e.to_string()))?;
    let mut bindings = bindings.clone();
    bindings.insert("tools".into(), catalog.tools);
    bindings.insert("tool_names".into(), catalog.tool_names.clone());

    let mut traj = ReactTrajectory::begin(clock.now());
    let mut correction: Option<String> = None;
    while traj.steps.len() < config.max_steps {
        let mut history = render_history(&traj.steps);
        if let Some(note) = &correction {
            if !history.is_empty() {
                history.push('\n');
            }
            history.push_str(note);
        }
        bindings.insert("history".into(), history);
        let prompt = agent
            .template
            .render(&bindings)
            .map_err(|e| LoopError::Setup(e.to_string()))?;
        let request = ChatRequest::new(vec![ChatMessage::user(prompt)], &config.generation)
            .with_stop_sequences(STOP_SEQUENCES);
        traj.model_calls += 1;
        let completion = match backend.complete(&request) {
            Ok(c) => c,
            Err(source) => {
                traj.error = Some(source.to_string());
                traj.finished_at = clock.now();
                return Err(LoopError::Backend {
                    source,
                    trajectory: Box::new(traj),
                });
            }
        };
        match parse_model_output(&completion.text) {
            Ok(ModelOutput::Final {
                thought,
                answer,
                missing_end,
            }) => {
                traj.final_thought = Some(thought);
                traj.final_answer = Some(answer);
                traj.missing_end_marker = missing_end && completion.stop.as_deref() != Some(END_MARKER);
                traj.terminated = Termination::FinalAnswer;
                traj.finished_at = clock.now();
                return Ok(traj);
            }
            Ok(ModelOutput::ToolCall {
                thought,
                action,
                action_input,
            }) => {
                correction = None;
                let observation = match agent.registry.get(&action) {
                    Some(tool) => tool.run(ctx, &action_input),
                    None => format!("Unknown tool {action}; available: {}", catalog.tool_names),
                };
                traj.steps.push(ReactStep {
                    thought,
                    action: Some(action),
                    action_input: Some(action_input),
                    observation: Some(observation),
                });
            }
            Err(e) => {
                traj.parse_failures.push(ParseFailure {
                    step: traj.steps.len(),
                    reason: e.reason.clone(),
                    raw: e.raw.clone(),
                });
                if correction.is_some() {
                    traj.error = Some(format!("model output malformed twice: {}", e.reason));
                    traj.terminated = Termination::Error;
                    traj.finished_at = clock.now();
                    return Ok(traj);
                }
                correction = Some(format!("{}\nObservation: {CORRECTION}", e.raw.trim()));
            }
        }
    }
    traj.terminated = Termination::StepLimit;
    traj.finished_at = clock.now();
    Ok(traj)
}
