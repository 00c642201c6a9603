//! Turn dispatch shared by both game-master engines.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;
use thiserror::Error;

use crate::combat::GameRng;
use crate::llm::{GenerationSettings, LlmBackend, LlmError};
use crate::react::{ReactTrajectory, DEFAULT_MAX_STEPS};
use crate::state::{
    ActionKind, Campaign, Clock, Engine, HealthState, MessageRole, NewCampaign, StateError,
};
use crate::v1::V1TurnTrace;
use crate::v2::{MemoryPolicy, TurnRecord};

/// How the Narrator's tools resolve character references.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MatcherStrategy {
    /// Rule-based and deterministic.
    #[default]
    Deterministic,
    /// Ask the model, falling back to the rules.
    Llm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub generation: GenerationSettings,
    pub max_steps: usize,
    pub memory: MemoryPolicy,
    pub matcher: MatcherStrategy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            generation: GenerationSettings::default(),
            max_steps: DEFAULT_MAX_STEPS,
            memory: MemoryPolicy::default(),
            matcher: MatcherStrategy::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum TurnError {
    #[error("action kind {0:?} cannot be played")]
    InvalidAction(ActionKind),
    #[error("player input must not be empty")]
    EmptyInput,
    #[error("the campaign has already started")]
    AlreadyStarted,
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("the narrator did not produce a narrative ({reason})")]
    NarratorFailed {
        reason: String,
        trajectory: Box<ReactTrajectory>,
    },
    #[error("the model's reply could not be parsed: {reason}")]
    Unparseable { reason: String, raw: String },
    #[error("could not determine who the player is attacking")]
    NoOpponent,
    #[error(transparent)]
    State(#[from] StateError),
}

impl TurnError {
    pub fn is_content_filtered(&self) -> bool {
        matches!(self, TurnError::Llm(LlmError::ContentFiltered(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HpChange {
    pub name: String,
    pub from: i64,
    pub to: i64,
    pub max_hp: i64,
    pub health_state: HealthState,
}

/// What a turn changed in the world.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateDelta {
    pub created_characters: Vec<String>,
    pub updated_characters: Vec<String>,
    pub hp_changes: Vec<HpChange>,
    pub created_environments: Vec<String>,
    pub updated_environments: Vec<String>,
    /// Set when the player's location changed.
    pub player_location: Option<String>,
}

impl StateDelta {
    pub fn between(before: &Campaign, after: &Campaign) -> Self {
        let mut d = StateDelta::default();
        for c in &after.characters {
            match before.characters.iter().find(|b| b.id == c.id) {
                None => d.created_characters.push(c.name.clone()),
                Some(b) => {
                    if b.description != c.description || b.char_type != c.char_type || b.health_state != c.health_state {
                        d.updated_characters.push(c.name.clone());
                    }
                    if b.current_hp != c.current_hp {
                        d.hp_changes.push(HpChange {
                            name: c.name.clone(),
                            from: b.current_hp,
                            to: c.current_hp,
                            max_hp: c.max_hp,
                            health_state: c.health_state,
                        });
                    }
                }
            }
        }
        for e in &after.environments {
            match before.environments.iter().find(|b| b.id == e.id) {
                None => d.created_environments.push(e.name.clone()),
                Some(b) if b.description != e.description || b.is_player_here != e.is_player_here => {
                    d.updated_environments.push(e.name.clone())
                }
                Some(_) => {}
            }
        }
        let here = |c: &Campaign| c.player_location().map(|e| e.id);
        if here(before) != here(after) {
            d.player_location = after.player_location().map(|e| e.name.clone());
        }
        d
    }

    pub fn is_empty(&self) -> bool {
        *self == StateDelta::default()
    }
}

/// Per-turn debugging record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "lowercase")]
pub enum TurnTrace {
    V1(Box<V1TurnTrace>),
    V2(Box<TurnRecord>),
}

impl TurnTrace {
    pub fn state_delta(&self) -> &StateDelta {
        match self {
            TurnTrace::V1(t) => &t.state_delta,
            TurnTrace::V2(t) => &t.state_delta,
        }
    }
}

/// All turn traces of one campaign, in play order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignTrace {
    pub turns: Vec<TurnTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnOutcome {
    pub narrative: String,
    pub state_delta: StateDelta,
    pub trace: TurnTrace,
}

/// The text that opens a campaign: setting, scenario and player character.
pub fn opening_text(campaign: &Campaign) -> String {
    let p = campaign.player();
    let mut text = format!(
        "Setting: {}. Scenario: {} The player character is {}.",
        campaign.setting.trim(),
        campaign.start_scenario.trim(),
        p.name
    );
    if !p.description.trim().is_empty() {
        text.push_str(&format!(" Description: {}", p.description.trim()));
    }
    text
}

/// Hex SHA-256 over the campaign's transcript: messages without timestamps,
/// characters, environments and summary.
pub fn transcript_hash(campaign: &Campaign) -> String {
    let messages: Vec<_> = campaign
        .messages
        .iter()
        .map(|m| serde_json::json!([m.seq, m.role, m.action_kind, m.text]))
        .collect();
    let doc = serde_json::json!({
        "messages": messages,
        "characters": campaign.characters,
        "environments": campaign.environments,
        "summary": campaign.summary,
    });
    let digest = Sha256::digest(doc.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Plays turns for campaigns of either engine.
///
/// A turn runs on a copy of the campaign that replaces the original only when
/// the turn succeeds, so a failed turn leaves no partial state behind. Each
/// turn draws from its own random stream selected by the turn number.
#[derive(Clone)]
pub struct GameMaster {
    backend: Arc<dyn LlmBackend>,
    clock: Arc<dyn Clock>,
    config: EngineConfig,
}

impl GameMaster {
    pub fn new(backend: Arc<dyn LlmBackend>, clock: Arc<dyn Clock>, config: EngineConfig) -> Self {
        Self { backend, clock, config }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn backend(&self) -> &dyn LlmBackend {
        self.backend.as_ref()
    }

    pub fn clock(&self) -> &dyn Clock {
        self.clock.as_ref()
    }

    pub fn create_campaign(&self, params: NewCampaign) -> Result<Campaign, StateError> {
        Campaign::create(params, self.clock.as_ref())
    }

    /// Plays the opening turn.
    pub fn start(&self, campaign: &mut Campaign) -> Result<TurnOutcome, TurnError> {
        self.turn(campaign, ActionKind::GameStart, "")
    }

    pub fn turn(&self, campaign: &mut Campaign, kind: ActionKind, text: &str) -> Result<TurnOutcome, TurnError> {
        self.turn_with(campaign, kind, text, &mut |_| {})
    }

    /// Plays one turn. `on_narrative` receives the narrative as soon as it
    /// exists, before the two-agent engine updates the world state.
    pub fn turn_with(
        &self,
        campaign: &mut Campaign,
        kind: ActionKind,
        text: &str,
        on_narrative: &mut dyn FnMut(&str),
    ) -> Result<TurnOutcome, TurnError> {
        let mut rng = GameRng::for_turn(campaign.rng_seed, campaign.turn_count);
        self.turn_with_rng(campaign, kind, text, &mut rng, on_narrative)
    }

    /// Like [`GameMaster::turn_with`] but draws from the given generator, for
    /// forcing dice outcomes.
    pub fn turn_with_rng(
        &self,
        campaign: &mut Campaign,
        kind: ActionKind,
        text: &str,
        rng: &mut GameRng,
        on_narrative: &mut dyn FnMut(&str),
    ) -> Result<TurnOutcome, TurnError> {
        match kind {
            ActionKind::GameStart if campaign.turn_count > 0 || !campaign.messages.is_empty() => {
                return Err(TurnError::AlreadyStarted)
            }
            ActionKind::GameStart => {}
            ActionKind::Do | ActionKind::Say | ActionKind::Attack if text.trim().is_empty() => {
                return Err(TurnError::EmptyInput)
            }
            ActionKind::Do | ActionKind::Say | ActionKind::Attack => {}
            ActionKind::None => return Err(TurnError::InvalidAction(kind)),
        }
        let text = text.trim();
        let mut work = campaign.clone();
        let result = match campaign.engine {
            Engine::V1 => crate::v1::run_turn(
                &mut work,
                kind,
                text,
                self.backend.as_ref(),
                rng,
                &self.config,
                self.clock.as_ref(),
            )
            .map(|t| {
                on_narrative(&t.narrative);
                (t.narrative.clone(), TurnTrace::V1(Box::new(t)))
            }),
            Engine::V2 => crate::v2::run_turn(
                &mut work,
                kind,
                text,
                self.backend.as_ref(),
                rng,
                &self.config,
                self.clock.as_ref(),
                on_narrative,
            )
            .map(|t| (t.narrative.clone(), TurnTrace::V2(Box::new(t)))),
        };
        match result {
            Ok((narrative, trace)) => {
                work.turn_count += 1;
                *campaign = work;
                Ok(TurnOutcome {
                    narrative,
                    state_delta: trace.state_delta().clone(),
                    trace,
                })
            }
            Err(e) => {
                if let TurnError::Unparseable { raw, .. } = &e {
                    // keep the unusable reply in the log for inspection
                    campaign.push_message(
                        MessageRole::System,
                        ActionKind::None,
                        format!("Unparseable game master reply: {raw}"),
                        self.clock.as_ref(),
                    )?;
                }
                Err(e)
            }
        }
    }
}
