//! The two-agent engine.
//!
//! The Narrator answers the player, rolling dice through its combat tools.
//! Once its narrative exists the Archivist reads it and records new or changed
//! characters and places. The context sent to both agents is bounded: a
//! rolling summary plus a window of recent messages.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::archivist::{self, roster_bindings, ArchivistContext};
use crate::combat::GameRng;
use crate::engine::{opening_text, EngineConfig, MatcherStrategy, StateDelta, TurnError};
use crate::llm::{ChatMessage, ChatRequest, GenerationSettings, LlmBackend, LlmError};
use crate::narrator::{CharacterMatcher, DeterministicMatcher, LlmMatcher};
use crate::narrator::{self, NarratorContext, TurnCombatLedger};
use crate::prompts::{self, SUMMARIZE};
use crate::react::{run_loop, Agent, Bindings, LoopConfig, LoopError, PromptTemplate, ReactTrajectory, Termination};
use crate::state::{ActionKind, Campaign, Clock, Message, MessageRole};

/// Bounds on the memory rendered into the agents' prompts, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemoryPolicy {
    /// Budget for the verbatim recent messages.
    pub raw_window: usize,
    /// Unsummarized text beyond this is folded into the summary.
    pub summary_trigger: usize,
    /// Budget for the summary.
    pub summary_cap: usize,
}

impl Default for MemoryPolicy {
    fn default() -> Self {
        Self {
            raw_window: 6000,
            summary_trigger: 8000,
            summary_cap: 2000,
        }
    }
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn head(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

fn tail(s: &str, n: usize) -> String {
    let len = char_len(s);
    s.chars().skip(len.saturating_sub(n)).collect()
}

/// One message as it appears in memory, or `None` for log entries.
fn memory_line(m: &Message) -> Option<String> {
    match (m.role, m.action_kind) {
        (MessageRole::Player, kind) => Some(format!("Player ({}): {}", kind_label(kind), m.text)),
        (MessageRole::GameMaster, _) => Some(format!("Game master: {}", m.text)),
        (MessageRole::System, ActionKind::GameStart) => Some(format!("Opening: {}", m.text)),
        (MessageRole::System, _) => None,
    }
}

fn kind_label(kind: ActionKind) -> &'static str {
    match kind {
        ActionKind::Do => "do",
        ActionKind::Say => "say",
        ActionKind::Attack => "attack",
        ActionKind::GameStart => "start",
        ActionKind::None => "none",
    }
}

fn pending(campaign: &Campaign) -> Vec<(u64, String)> {
    campaign
        .messages
        .iter()
        .filter(|m| m.seq > campaign.summarized_through)
        .filter_map(|m| memory_line(m).map(|l| (m.seq, l)))
        .collect()
}

/// The summary followed by as many recent messages as fit the window.
///
/// The result never exceeds `raw_window + summary_cap` characters.
pub fn render_memory(campaign: &Campaign, policy: &MemoryPolicy) -> String {
    let summary = if campaign.summary.trim().is_empty() {
        String::new()
    } else {
        head(&format!("Summary of earlier events: {}", campaign.summary.trim()), policy.summary_cap)
    };
    // the header and the separator from the summary count against the window
    let header = if summary.is_empty() { "Recent events:" } else { "\n\nRecent events:" };
    let mut budget = policy.raw_window.saturating_sub(char_len(header));
    let mut lines = Vec::new();
    for (_, line) in pending(campaign).into_iter().rev() {
        let cost = char_len(&line) + 1;
        if cost <= budget {
            budget -= cost;
            lines.push(line);
        } else {
            if lines.is_empty() && budget > 1 {
                lines.push(tail(&line, budget - 1));
            }
            break;
        }
    }
    if lines.is_empty() {
        return summary;
    }
    lines.reverse();
    let mut out = summary;
    out.push_str(header);
    for line in lines {
        out.push('\n');
        out.push_str(&line);
    }
    out
}

/// Folds the oldest unsummarized messages into the summary once they exceed
/// the trigger. Folds enough that the rest fits both half of what was pending
/// and the raw window, so calling again without new messages does nothing.
///
/// Returns whether the summary changed. On error nothing changes.
pub fn refresh_summary(
    campaign: &mut Campaign,
    backend: &dyn LlmBackend,
    policy: &MemoryPolicy,
    generation: &GenerationSettings,
) -> Result<bool, LlmError> {
    let lines = pending(campaign);
    let total: usize = lines.iter().map(|(_, l)| char_len(l) + 1).sum();
    if total <= policy.summary_trigger {
        return Ok(false);
    }
    let keep_at_most = (total / 2).min(policy.raw_window);
    let mut remaining = total;
    let mut folded = 0;
    while folded < lines.len() && remaining > keep_at_most {
        remaining -= char_len(&lines[folded].1) + 1;
        folded += 1;
    }
    let events: Vec<&str> = lines[..folded].iter().map(|(_, l)| l.as_str()).collect();
    let previous = if campaign.summary.trim().is_empty() { "none" } else { campaign.summary.trim() };
    let prompt = format!("{SUMMARIZE}\n\nSummary so far: {previous}\n\nEvents:\n{}", events.join("\n"));
    let request = ChatRequest::new(vec![ChatMessage::user(prompt)], generation);
    let reply = backend.complete(&request)?;
    let text = reply.text.trim();
    if text.is_empty() {
        return Err(LlmError::MalformedResponse("empty summary".into()));
    }
    campaign.summary = head(text, policy.summary_cap);
    campaign.summarized_through = lines[folded - 1].0;
    Ok(true)
}

/// Everything that happened during one turn of the two-agent engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnRecord {
    pub turn: u64,
    pub action_kind: ActionKind,
    pub player_input: String,
    pub narrator: ReactTrajectory,
    pub archivist: Option<ReactTrajectory>,
    pub narrative: String,
    pub combat: TurnCombatLedger,
    pub state_delta: StateDelta,
    /// Why the Archivist failed, if it did. The narrative stands regardless.
    pub archivist_error: Option<String>,
    pub summary_refreshed: bool,
    pub summary_error: Option<String>,
    /// Characters of memory rendered into the prompts.
    pub memory_chars: usize,
    pub started_at: DateTime<Utc>,
    pub narrative_ready_at: DateTime<Utc>,
    pub archivist_started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

fn action_prompt(kind: ActionKind) -> &'static str {
    match kind {
        ActionKind::GameStart => prompts::v2::INITIAL_GAME_START,
        ActionKind::Say => prompts::v2::SAY_ACTION,
        _ => prompts::v2::DO_ACTION,
    }
}

fn bindings(pairs: impl IntoIterator<Item = (&'static str, String)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Plays one turn on `campaign`. The caller commits or discards the result.
///
/// Attacks are played as actions: the Narrator decides when to fight.
#[allow(clippy::too_many_arguments)]
pub fn run_turn(
    campaign: &mut Campaign,
    kind: ActionKind,
    text: &str,
    backend: &dyn LlmBackend,
    rng: &mut GameRng,
    config: &EngineConfig,
    clock: &dyn Clock,
    on_narrative: &mut dyn FnMut(&str),
) -> Result<TurnRecord, TurnError> {
    let started_at = clock.now();
    let before = campaign.clone();
    let kind = if kind == ActionKind::Attack { ActionKind::Do } else { kind };
    let input = if kind == ActionKind::GameStart { opening_text(campaign) } else { text.to_string() };
    let memory = render_memory(campaign, &config.memory);
    let loop_config = LoopConfig {
        max_steps: config.max_steps,
        generation: config.generation.clone(),
    };

    let llm_matcher;
    let matcher: &dyn CharacterMatcher = match config.matcher {
        MatcherStrategy::Deterministic => &DeterministicMatcher,
        MatcherStrategy::Llm => {
            llm_matcher = LlmMatcher {
                backend,
                generation: config.generation.clone(),
            };
            &llm_matcher
        }
    };
    let template = PromptTemplate::new(prompts::v2::NARRATOR_REACT);
    let narrator_bindings = bindings([
        ("summary", memory.clone()),
        ("action", action_prompt(kind).to_string()),
        ("input", input.clone()),
    ]);
    let (trajectory, combat) = {
        let registry = narrator::registry();
        let mut ctx = NarratorContext::new(campaign, rng, matcher);
        let agent = Agent {
            template: &template,
            registry: &registry,
        };
        let trajectory = match run_loop(&agent, &narrator_bindings, &mut ctx, backend, &loop_config, clock) {
            Ok(t) => t,
            Err(LoopError::Backend { source, .. }) => return Err(TurnError::Llm(source)),
            Err(LoopError::Setup(reason)) => return Err(TurnError::Llm(LlmError::InvalidRequest(reason))),
        };
        (trajectory, ctx.ledger)
    };
    let narrative = match (&trajectory.terminated, &trajectory.final_answer) {
        (Termination::FinalAnswer, Some(answer)) if !answer.trim().is_empty() => answer.trim().to_string(),
        (terminated, _) => {
            return Err(TurnError::NarratorFailed {
                reason: trajectory.error.clone().unwrap_or_else(|| format!("{terminated:?}")),
                trajectory: Box::new(trajectory),
            })
        }
    };
    if kind == ActionKind::GameStart {
        campaign.push_message(MessageRole::System, ActionKind::GameStart, input.clone(), clock)?;
    } else {
        campaign.push_message(MessageRole::Player, kind, input.clone(), clock)?;
    }
    campaign.push_message(MessageRole::GameMaster, ActionKind::None, narrative.clone(), clock)?;
    let narrative_ready_at = clock.now();
    on_narrative(&narrative);

    let archivist_started_at = clock.now();
    let template = PromptTemplate::new(prompts::v2::ARCHIVIST_REACT);
    let mut archivist_bindings = roster_bindings(campaign);
    archivist_bindings.insert("summary".into(), memory.clone());
    archivist_bindings.insert("input".into(), format!("Player input: {input} Narrator: {narrative}"));
    let (archivist, archivist_error) = {
        let registry = archivist::registry();
        let agent = Agent {
            template: &template,
            registry: &registry,
        };
        let mut ctx = ArchivistContext::new(campaign);
        match run_loop(&agent, &archivist_bindings, &mut ctx, backend, &loop_config, clock) {
            Ok(t) if t.terminated == Termination::FinalAnswer => (Some(t), None),
            Ok(t) => {
                let reason = t.error.clone().unwrap_or_else(|| format!("{:?}", t.terminated));
                (Some(t), Some(reason))
            }
            Err(LoopError::Backend { source, trajectory }) => (Some(*trajectory), Some(source.to_string())),
            Err(LoopError::Setup(reason)) => (None, Some(reason)),
        }
    };
    if let Some(reason) = &archivist_error {
        tracing::warn!(%reason, "state update failed; the narrative stands");
    }

    let (summary_refreshed, summary_error) =
        match refresh_summary(campaign, backend, &config.memory, &config.generation) {
            Ok(changed) => (changed, None),
            Err(e) => {
                tracing::warn!(error = %e, "summary refresh failed; keeping the previous summary");
                (false, Some(e.to_string()))
            }
        };

    Ok(TurnRecord {
        turn: before.turn_count,
        action_kind: kind,
        player_input: text.to_string(),
        narrator: trajectory,
        archivist,
        narrative,
        combat,
        state_delta: StateDelta::between(&before, campaign),
        archivist_error,
        summary_refreshed,
        summary_error,
        memory_chars: char_len(&memory),
        started_at,
        narrative_ready_at,
        archivist_started_at,
        finished_at: clock.now(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::ScriptedBackend;
    use crate::state::{Engine, NewCampaign, StepClock};

    fn campaign() -> Campaign {
        Campaign::create(
            NewCampaign {
                id: None,
                setting: "fantasy".into(),
                start_scenario: "s".into(),
                player_name: "Ivan".into(),
                player_description: "d".into(),
                engine: Engine::V2,
                rng_seed: 5,
            },
            &StepClock::fixed(),
        )
        .unwrap()
    }

    fn fill(c: &mut Campaign, n: usize, len: usize) {
        let clock = StepClock::fixed();
        for i in 0..n {
            let text = format!("{i:04}{}", "x".repeat(len));
            let (role, kind) = if i % 2 == 0 {
                (MessageRole::Player, ActionKind::Do)
            } else {
                (MessageRole::GameMaster, ActionKind::None)
            };
            c.push_message(role, kind, text, &clock).unwrap();
        }
    }

    #[test]
    fn memory_keeps_the_newest_messages_within_budget() {
        let mut c = campaign();
        fill(&mut c, 30, 500);
        let policy = MemoryPolicy::default();
        let m = render_memory(&c, &policy);
        assert!(char_len(&m) <= policy.raw_window);
        assert!(m.contains("0029xxx"));
        assert!(!m.contains("0001xxx"));
        c.summary = "s".repeat(5000);
        let m = render_memory(&c, &policy);
        assert!(char_len(&m) <= policy.raw_window + policy.summary_cap);
    }

    #[test]
    fn oversized_single_message_is_cut_to_fit() {
        let mut c = campaign();
        fill(&mut c, 1, 10_000);
        let policy = MemoryPolicy::default();
        assert!(char_len(&render_memory(&c, &policy)) <= policy.raw_window);
    }

    #[test]
    fn summary_folds_old_messages_once() {
        let mut c = campaign();
        fill(&mut c, 20, 500);
        let backend = ScriptedBackend::from_responses(["They fought a lot."]);
        let policy = MemoryPolicy::default();
        let gen = GenerationSettings::default();
        assert!(refresh_summary(&mut c, &backend, &policy, &gen).unwrap());
        assert_eq!(c.summary, "They fought a lot.");
        assert!(c.summarized_through >= 10);
        let request = &backend.transcript()[0].request;
        assert!(request.messages[0].content.starts_with(SUMMARIZE));
        assert!(request.messages[0].content.contains("0000xxx"));
        // nothing new to fold: no request is made
        assert!(!refresh_summary(&mut c, &backend, &policy, &gen).unwrap());
        assert_eq!(backend.transcript().len(), 1);
    }

    #[test]
    fn failed_summary_changes_nothing() {
        let mut c = campaign();
        fill(&mut c, 20, 500);
        let before = c.clone();
        let backend = ScriptedBackend::from_responses(Vec::<String>::new());
        assert!(refresh_summary(&mut c, &backend, &MemoryPolicy::default(), &GenerationSettings::default()).is_err());
        assert_eq!(c, before);
    }

    #[test]
    fn below_trigger_nothing_happens() {
        let mut c = campaign();
        fill(&mut c, 4, 100);
        let backend = ScriptedBackend::from_responses(Vec::<String>::new());
        assert!(!refresh_summary(&mut c, &backend, &MemoryPolicy::default(), &GenerationSettings::default()).unwrap());
    }
}
