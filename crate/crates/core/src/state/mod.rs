//! Campaign world state: characters, environments and the message log.
//!
//! [`Campaign`] is the single writer of world state for both game-master
//! engines. All hit-point changes go through [`Campaign::apply_hp_delta`] or
//! the state-driven snap inside [`Campaign::upsert_character`], so the
//! `0 <= current_hp <= max_hp` and health-banding invariants hold after every
//! operation.

mod clock;
mod health;
mod store;

pub use clock::{Clock, StepClock, SystemClock};
pub use health::{CharacterType, HealthState};
pub use store::{CampaignStore, StoreError, SCHEMA_VERSION};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CampaignId(pub String);

impl CampaignId {
    pub fn random() -> Self {
        CampaignId(uuid::Uuid::new_v4().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CampaignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnvironmentId(pub u32);

/// Which game-master architecture drives a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    V1,
    V2,
}

impl FromStr for Engine {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v1" => Ok(Engine::V1),
            "v2" => Ok(Engine::V2),
            _ => Err(ParseTokenError::new("engine", s)),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::V1 => "v1",
            Engine::V2 => "v2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {kind} {value:?}")]
pub struct ParseTokenError {
    pub kind: &'static str,
    pub value: String,
}

impl ParseTokenError {
    pub fn new(kind: &'static str, value: &str) -> Self {
        Self {
            kind,
            value: value.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Character {
    pub id: CharacterId,
    pub name: String,
    pub description: String,
    pub char_type: CharacterType,
    pub max_hp: i64,
    pub current_hp: i64,
    pub health_state: HealthState,
    pub is_player: bool,
}

impl Character {
    fn rederive_state(&mut self) {
        self.health_state = HealthState::from_hp(self.current_hp, self.max_hp, self.is_player);
    }

    pub fn is_dead(&self) -> bool {
        self.health_state == HealthState::Dead
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Environment {
    pub id: EnvironmentId,
    pub name: String,
    pub description: String,
    pub is_player_here: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageRole {
    Player,
    GameMaster,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Do,
    Say,
    Attack,
    GameStart,
    None,
}

impl FromStr for ActionKind {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "do" => Ok(ActionKind::Do),
            "say" => Ok(ActionKind::Say),
            "attack" => Ok(ActionKind::Attack),
            "gamestart" | "game_start" | "start" => Ok(ActionKind::GameStart),
            _ => Err(ParseTokenError::new("action kind", s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Message {
    pub seq: u64,
    pub role: MessageRole,
    pub action_kind: ActionKind,
    pub text: String,
    pub timestamp: DateTime<Utc>,
}

/// Name and description the player chose at creation time. Kept apart from
/// the live player character, whose description the Archivist may rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayerOrigin {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Campaign {
    pub id: CampaignId,
    pub setting: String,
    pub start_scenario: String,
    pub engine: Engine,
    pub player_character_id: CharacterId,
    pub characters: Vec<Character>,
    pub environments: Vec<Environment>,
    pub messages: Vec<Message>,
    pub summary: String,
    pub rng_seed: u64,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub player_origin: PlayerOrigin,
    /// Number of completed turns; selects the per-turn random stream.
    pub turn_count: u64,
    /// Messages with `seq <= summarized_through` are folded into `summary`.
    pub summarized_through: u64,
    /// Opponent named by the static engine's last response, if any.
    #[serde(default)]
    pub current_opponent_id: Option<CharacterId>,
    next_entity_id: u32,
}

#[derive(Debug, Clone)]
pub struct NewCampaign {
    pub id: Option<CampaignId>,
    pub setting: String,
    pub start_scenario: String,
    pub player_name: String,
    pub player_description: String,
    pub engine: Engine,
    pub rng_seed: u64,
}

/// Arguments to [`Campaign::upsert_character`].
#[derive(Debug, Clone)]
pub struct CharacterUpsert {
    pub name: String,
    pub description: String,
    pub char_type: CharacterType,
    pub health_state: HealthState,
    /// `None` leaves the flag alone; `Some` must agree with the stored flag.
    pub is_player: Option<bool>,
}

impl CharacterUpsert {
    pub fn npc(
        name: impl Into<String>,
        description: impl Into<String>,
        char_type: CharacterType,
        health_state: HealthState,
    ) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            char_type,
            health_state,
            is_player: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Upserted {
    Created,
    Updated,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("player name must not be empty")]
    EmptyPlayerName,
    #[error("entity name must not be empty")]
    EmptyName,
    #[error("unknown character id {0:?}")]
    UnknownCharacter(CharacterId),
    #[error("the player flag of {0:?} cannot be changed")]
    PlayerFlagChange(String),
    #[error("{role:?} messages cannot carry action kind {kind:?}")]
    InvalidMessageKind { role: MessageRole, kind: ActionKind },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Identity key for names: whitespace collapsed, case folded.
pub fn name_key(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

const STORY_PROMPTS: &[(&str, &[&str])] = &[
    (
        "fantasy",
        &[
            "Bandits have kidnapped a child from a nearby village, and the village elder begs you to bring her home.",
            "A dragon has been sighted over the northern mountains, and the king offers a reward to whoever discovers its lair.",
            "The old wizard's tower has gone silent, and strange lights now dance in its windows at night.",
        ],
    ),
    (
        "mystery",
        &[
            "A wealthy merchant is found dead in a locked study, and every guest at the manor has something to hide.",
            "Paintings are vanishing from the city museum one by one, each replaced by a perfect forgery.",
        ],
    ),
    (
        "post-apocalyptic",
        &[
            "The last working water purifier in the settlement has been sabotaged, and the culprit is still inside the walls.",
            "A radio signal repeats the same coordinates every night, promising shelter beyond the wasteland.",
        ],
    ),
];

const GENERIC_STORY_PROMPTS: &[&str] = &[
    "A stranger arrives with a sealed letter addressed to you, and a warning not to open it before nightfall.",
    "You wake in an unfamiliar place with no memory of how you arrived, clutching a map marked with a single cross.",
];

/// Picks a pre-written opening for the setting, deterministically from the seed.
pub fn pregenerated_story(setting: &str, seed: u64) -> &'static str {
    let key = setting.trim().to_lowercase();
    let pool = STORY_PROMPTS
        .iter()
        .find(|(s, _)| *s == key)
        .map(|(_, p)| *p)
        .unwrap_or(GENERIC_STORY_PROMPTS);
    pool[(seed % pool.len() as u64) as usize]
}

impl Campaign {
    /// Creates a campaign holding only the player character, at full health.
    /// An empty start scenario is replaced with a pre-generated story prompt.
    pub fn create(params: NewCampaign, clock: &dyn Clock) -> Result<Campaign, StateError> {
        let player_name = params.player_name.trim();
        if player_name.is_empty() {
            return Err(StateError::EmptyPlayerName);
        }
        let start_scenario = if params.start_scenario.trim().is_empty() {
            pregenerated_story(&params.setting, params.rng_seed).to_string()
        } else {
            params.start_scenario.clone()
        };
        let char_type = CharacterType::Humanoid;
        let player = Character {
            id: CharacterId(1),
            name: player_name.to_string(),
            description: params.player_description.clone(),
            char_type,
            max_hp: char_type.max_hp(),
            current_hp: char_type.max_hp(),
            health_state: HealthState::Healthy,
            is_player: true,
        };
        let now = clock.now();
        Ok(Campaign {
            id: params.id.unwrap_or_else(CampaignId::random),
            setting: params.setting,
            start_scenario,
            engine: params.engine,
            player_character_id: player.id,
            characters: vec![player],
            environments: Vec::new(),
            messages: Vec::new(),
            summary: String::new(),
            rng_seed: params.rng_seed,
            created_at: now,
            updated_at: now,
            player_origin: PlayerOrigin {
                name: player_name.to_string(),
                description: params.player_description,
            },
            turn_count: 0,
            summarized_through: 0,
            current_opponent_id: None,
            next_entity_id: 2,
        })
    }

    fn allocate_id(&mut self) -> u32 {
        let id = self.next_entity_id;
        self.next_entity_id += 1;
        id
    }

    pub fn player(&self) -> &Character {
        self.character(self.player_character_id)
            .expect("campaign always holds its player character")
    }

    pub fn character(&self, id: CharacterId) -> Option<&Character> {
        self.characters.iter().find(|c| c.id == id)
    }

    pub fn character_by_name(&self, name: &str) -> Option<&Character> {
        let key = name_key(name);
        self.characters.iter().find(|c| name_key(&c.name) == key)
    }

    pub fn environment_by_name(&self, name: &str) -> Option<&Environment> {
        let key = name_key(name);
        self.environments.iter().find(|e| name_key(&e.name) == key)
    }

    /// The environment the player is currently in, if known.
    pub fn player_location(&self) -> Option<&Environment> {
        self.environments.iter().find(|e| e.is_player_here)
    }

    /// Creates or updates a character keyed by case-folded name.
    ///
    /// A state that differs from the one the current hit points imply snaps
    /// hit points to the middle of the requested band. Dead characters keep
    /// zero hit points whatever state is requested.
    pub fn upsert_character(
        &mut self,
        upsert: CharacterUpsert,
    ) -> Result<(CharacterId, Upserted), StateError> {
        let name = upsert.name.trim();
        if name.is_empty() {
            return Err(StateError::EmptyName);
        }
        let key = name_key(name);
        if let Some(existing) = self.characters.iter_mut().find(|c| name_key(&c.name) == key) {
            if let Some(flag) = upsert.is_player {
                if flag != existing.is_player {
                    return Err(StateError::PlayerFlagChange(existing.name.clone()));
                }
            }
            existing.description = upsert.description;
            if existing.char_type != upsert.char_type {
                let new_max = upsert.char_type.max_hp();
                // keep the hit-point fraction across the type change
                existing.current_hp =
                    (2 * existing.current_hp * new_max + existing.max_hp) / (2 * existing.max_hp);
                existing.max_hp = new_max;
                existing.char_type = upsert.char_type;
            }
            if !existing.is_dead() {
                existing.rederive_state();
                if existing.health_state != upsert.health_state {
                    existing.current_hp = upsert.health_state.band_midpoint(existing.max_hp);
                }
                existing.rederive_state();
            } else {
                existing.current_hp = 0;
            }
            return Ok((existing.id, Upserted::Updated));
        }
        if upsert.is_player == Some(true) {
            return Err(StateError::PlayerFlagChange(name.to_string()));
        }
        let id = CharacterId(self.allocate_id());
        let max_hp = upsert.char_type.max_hp();
        let mut character = Character {
            id,
            name: name.to_string(),
            description: upsert.description,
            char_type: upsert.char_type,
            max_hp,
            current_hp: max_hp,
            health_state: HealthState::Healthy,
            is_player: false,
        };
        if upsert.health_state != HealthState::Healthy {
            character.current_hp = upsert.health_state.band_midpoint(max_hp);
        }
        character.rederive_state();
        self.characters.push(character);
        Ok((id, Upserted::Created))
    }

    /// Creates or updates an environment keyed by case-folded name. Marking
    /// it as the player's location clears the flag everywhere else.
    pub fn upsert_environment(
        &mut self,
        name: &str,
        description: &str,
        is_player_here: bool,
    ) -> Result<(EnvironmentId, Upserted), StateError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(StateError::EmptyName);
        }
        let key = name_key(name);
        let (id, outcome) = match self.environments.iter_mut().find(|e| name_key(&e.name) == key) {
            Some(env) => {
                env.description = description.to_string();
                env.is_player_here = is_player_here;
                (env.id, Upserted::Updated)
            }
            None => {
                let id = EnvironmentId(self.allocate_id());
                self.environments.push(Environment {
                    id,
                    name: name.to_string(),
                    description: description.to_string(),
                    is_player_here,
                });
                (id, Upserted::Created)
            }
        };
        if is_player_here {
            for env in &mut self.environments {
                env.is_player_here = env.id == id;
            }
        }
        Ok((id, outcome))
    }

    /// The single choke point for hit-point changes. Clamps to `[0, max_hp]`
    /// and re-derives the health state. Dead characters are unaffected.
    pub fn apply_hp_delta(&mut self, id: CharacterId, delta: i64) -> Result<&Character, StateError> {
        let character = self
            .characters
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or(StateError::UnknownCharacter(id))?;
        if !character.is_dead() {
            character.current_hp = character
                .current_hp
                .saturating_add(delta)
                .clamp(0, character.max_hp);
            character.rederive_state();
        }
        Ok(character)
    }

    pub fn push_message(
        &mut self,
        role: MessageRole,
        action_kind: ActionKind,
        text: impl Into<String>,
        clock: &dyn Clock,
    ) -> Result<u64, StateError> {
        let allowed = match role {
            MessageRole::Player => {
                matches!(action_kind, ActionKind::Do | ActionKind::Say | ActionKind::Attack)
            }
            MessageRole::GameMaster => action_kind == ActionKind::None,
            MessageRole::System => matches!(action_kind, ActionKind::GameStart | ActionKind::None),
        };
        if !allowed {
            return Err(StateError::InvalidMessageKind {
                role,
                kind: action_kind,
            });
        }
        let seq = self.messages.last().map_or(1, |m| m.seq + 1);
        let timestamp = clock.now();
        self.messages.push(Message {
            seq,
            role,
            action_kind,
            text: text.into(),
            timestamp,
        });
        self.updated_at = timestamp;
        Ok(seq)
    }

    /// Highest message sequence number whose text mentions `name`.
    pub fn last_mention(&self, name: &str) -> Option<u64> {
        let needle = name.to_lowercase();
        if needle.is_empty() {
            return None;
        }
        self.messages
            .iter()
            .rev()
            .find(|m| m.text.to_lowercase().contains(&needle))
            .map(|m| m.seq)
    }

    /// Checks every structural invariant. Used after loading and by tests.
    pub fn check_invariants(&self) -> Result<(), StateError> {
        let fail = |msg: String| Err(StateError::Invariant(msg));
        let players: Vec<_> = self.characters.iter().filter(|c| c.is_player).collect();
        if players.len() != 1 || players[0].id != self.player_character_id {
            return fail("exactly one player character must exist and be referenced".into());
        }
        for c in &self.characters {
            if c.name.trim().is_empty() {
                return fail(format!("character {:?} has an empty name", c.id));
            }
            if c.max_hp < 1 || c.current_hp < 0 || c.current_hp > c.max_hp {
                return fail(format!("{} has {}/{} hp", c.name, c.current_hp, c.max_hp));
            }
            if c.health_state != HealthState::from_hp(c.current_hp, c.max_hp, c.is_player) {
                return fail(format!("{} has inconsistent state {}", c.name, c.health_state));
            }
        }
        let mut keys: Vec<_> = self.characters.iter().map(|c| name_key(&c.name)).collect();
        keys.sort();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return fail("character names are not unique".into());
        }
        let mut env_keys: Vec<_> = self.environments.iter().map(|e| name_key(&e.name)).collect();
        env_keys.sort();
        if env_keys.windows(2).any(|w| w[0] == w[1]) {
            return fail("environment names are not unique".into());
        }
        if self.environments.iter().filter(|e| e.is_player_here).count() > 1 {
            return fail("more than one environment holds the player".into());
        }
        for (i, m) in self.messages.iter().enumerate() {
            if m.seq != i as u64 + 1 {
                return fail(format!("message sequence gap at index {i}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn campaign() -> Campaign {
        Campaign::create(
            NewCampaign {
                id: Some(CampaignId("t".into())),
                setting: "fantasy".into(),
                start_scenario: "bandits have kidnapped a child".into(),
                player_name: "Ivan".into(),
                player_description: "A wielder of earth, wind, and fire.".into(),
                engine: Engine::V2,
                rng_seed: 42,
            },
            &StepClock::fixed(),
        )
        .unwrap()
    }

    #[test]
    fn create_gives_full_hp_humanoid_player() {
        let c = campaign();
        let p = c.player();
        assert_eq!(p.name, "Ivan");
        assert_eq!((p.current_hp, p.max_hp), (40, 40));
        assert_eq!(p.char_type, CharacterType::Humanoid);
        assert!(c.environments.is_empty() && c.messages.is_empty());
        c.check_invariants().unwrap();
    }

    #[test]
    fn empty_scenario_selects_pregenerated_story() {
        let c = Campaign::create(
            NewCampaign {
                id: None,
                setting: "mystery".into(),
                start_scenario: String::new(),
                player_name: "X".into(),
                player_description: String::new(),
                engine: Engine::V1,
                rng_seed: 0,
            },
            &SystemClock,
        )
        .unwrap();
        assert_eq!(c.start_scenario, pregenerated_story("mystery", 0));
        assert!(!c.start_scenario.is_empty());
    }

    #[test]
    fn empty_player_name_is_rejected() {
        let err = Campaign::create(
            NewCampaign {
                id: None,
                setting: "fantasy".into(),
                start_scenario: "s".into(),
                player_name: "  ".into(),
                player_description: String::new(),
                engine: Engine::V1,
                rng_seed: 0,
            },
            &SystemClock,
        )
        .unwrap_err();
        assert_eq!(err, StateError::EmptyPlayerName);
    }

    #[test]
    fn upsert_character_is_idempotent() {
        let mut c = campaign();
        let up = CharacterUpsert::npc(
            "Castle Guard",
            "A vigilant guard...",
            CharacterType::Humanoid,
            HealthState::Healthy,
        );
        let (id, first) = c.upsert_character(up.clone()).unwrap();
        let snapshot = c.clone();
        let (id2, second) = c.upsert_character(up).unwrap();
        assert_eq!((first, second), (Upserted::Created, Upserted::Updated));
        assert_eq!(id, id2);
        assert_eq!(c.characters, snapshot.characters);
        assert_eq!(c.character(id).unwrap().current_hp, 40);
    }

    #[test]
    fn upsert_matches_case_folded_and_collapsed_names() {
        let mut c = campaign();
        c.upsert_character(CharacterUpsert::npc("Castle Guard", "a", CharacterType::Humanoid, HealthState::Healthy))
            .unwrap();
        let (_, outcome) = c
            .upsert_character(CharacterUpsert::npc("  castle   GUARD ", "b", CharacterType::Humanoid, HealthState::Healthy))
            .unwrap();
        assert_eq!(outcome, Upserted::Updated);
        assert_eq!(c.characters.len(), 2);
        assert_eq!(c.character_by_name("Castle Guard").unwrap().description, "b");
    }

    #[test]
    fn new_wounded_character_lands_on_band_midpoint() {
        let mut c = campaign();
        let (id, _) = c
            .upsert_character(CharacterUpsert::npc(
                "Nyanko, the Swift",
                "A nimble and agile rogue.",
                CharacterType::Humanoid,
                HealthState::LightlyWounded,
            ))
            .unwrap();
        let ch = c.character(id).unwrap();
        assert_eq!(ch.current_hp, 23);
        assert_eq!(ch.health_state, HealthState::LightlyWounded);
    }

    #[test]
    fn setting_player_state_moves_hp_to_band() {
        let mut c = campaign();
        c.upsert_character(CharacterUpsert::npc(
            "Ivan",
            "A wielder of earth, wind, and fire.",
            CharacterType::Humanoid,
            HealthState::HeavilyWounded,
        ))
        .unwrap();
        assert_eq!(c.player().current_hp, 8);
        assert_eq!(c.player().health_state, HealthState::HeavilyWounded);
    }

    #[test]
    fn player_flag_cannot_change() {
        let mut c = campaign();
        let mut up = CharacterUpsert::npc("Ivan", "x", CharacterType::Humanoid, HealthState::Healthy);
        up.is_player = Some(false);
        assert!(matches!(c.upsert_character(up), Err(StateError::PlayerFlagChange(_))));
        let mut up = CharacterUpsert::npc("Goblin", "x", CharacterType::SmallMonster, HealthState::Healthy);
        up.is_player = Some(true);
        assert!(matches!(c.upsert_character(up), Err(StateError::PlayerFlagChange(_))));
        assert_eq!(c.characters.len(), 1);
    }

    #[test]
    fn environment_upsert_keeps_single_player_location() {
        let mut c = campaign();
        let (_, o) = c
            .upsert_environment(
                "Encampment Barracks",
                "A wooden makeshift shelter for the encampment's soldiers. The door is locked.",
                true,
            )
            .unwrap();
        assert_eq!(o, Upserted::Created);
        let (_, o) = c
            .upsert_environment(
                "Encampment Barracks",
                "A wooden makeshift shelter for the encampment's soldiers. The door is locked.",
                true,
            )
            .unwrap();
        assert_eq!(o, Upserted::Updated);
        assert_eq!(c.environments.len(), 1);
        c.upsert_environment("Ancient Tower", "...", true).unwrap();
        assert!(!c.environment_by_name("Encampment Barracks").unwrap().is_player_here);
        assert_eq!(c.player_location().unwrap().name, "Ancient Tower");
    }

    #[test]
    fn hp_delta_clamps_and_bands() {
        let mut c = campaign();
        let (guard, _) = c
            .upsert_character(CharacterUpsert::npc("Castle Guard", "", CharacterType::Humanoid, HealthState::Healthy))
            .unwrap();
        assert_eq!(c.apply_hp_delta(guard, -12).unwrap().current_hp, 28);
        let ch = c.apply_hp_delta(guard, -(28 + 100)).unwrap();
        assert_eq!((ch.current_hp, ch.health_state), (0, HealthState::Dead));
        let pid = c.player_character_id;
        let p = c.apply_hp_delta(pid, -1000).unwrap();
        assert_eq!((p.current_hp, p.health_state), (0, HealthState::Unconscious));
        assert_eq!(c.apply_hp_delta(pid, 1000).unwrap().current_hp, 40);
        assert!(matches!(
            c.apply_hp_delta(CharacterId(99), 1),
            Err(StateError::UnknownCharacter(_))
        ));
    }

    #[test]
    fn dead_is_absorbing() {
        let mut c = campaign();
        let (g, _) = c
            .upsert_character(CharacterUpsert::npc("Guard", "", CharacterType::Humanoid, HealthState::Dead))
            .unwrap();
        assert!(c.character(g).unwrap().is_dead());
        c.apply_hp_delta(g, 10).unwrap();
        c.upsert_character(CharacterUpsert::npc("Guard", "", CharacterType::Humanoid, HealthState::Healthy))
            .unwrap();
        let g = c.character(g).unwrap();
        assert_eq!((g.current_hp, g.health_state), (0, HealthState::Dead));
    }

    #[test]
    fn message_kinds_are_validated() {
        let mut c = campaign();
        let clock = StepClock::fixed();
        assert!(c.push_message(MessageRole::Player, ActionKind::None, "x", &clock).is_err());
        assert!(c.push_message(MessageRole::GameMaster, ActionKind::Do, "x", &clock).is_err());
        assert_eq!(c.push_message(MessageRole::Player, ActionKind::Do, "x", &clock).unwrap(), 1);
        assert_eq!(c.push_message(MessageRole::GameMaster, ActionKind::None, "y", &clock).unwrap(), 2);
        c.check_invariants().unwrap();
    }
}
