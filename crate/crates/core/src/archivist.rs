//! The Archivist's tools: UpdateCharacter and UpdateEnvironment.

use serde::Deserialize;
use serde_json::json;
use std::collections::BTreeSet;

use crate::narrator::parse_input;
use crate::prompts::tools;
use crate::react::{Bindings, Registry, Tool};
use crate::state::{name_key, Campaign, CharacterType, CharacterUpsert, HealthState, Upserted};

pub const UPDATE_CHARACTER: &str = "UpdateCharacter";
pub const UPDATE_ENVIRONMENT: &str = "UpdateEnvironment";

/// State the Archivist's tools work on during one trajectory.
pub struct ArchivistContext<'a> {
    pub campaign: &'a mut Campaign,
    characters_done: BTreeSet<String>,
    environments_done: BTreeSet<String>,
}

impl<'a> ArchivistContext<'a> {
    pub fn new(campaign: &'a mut Campaign) -> Self {
        Self {
            campaign,
            characters_done: BTreeSet::new(),
            environments_done: BTreeSet::new(),
        }
    }
}

/// The Archivist's registry: UpdateCharacter, UpdateEnvironment.
pub fn registry<'a>() -> Registry<ArchivistContext<'a>> {
    let mut r = Registry::new();
    r.register(UpdateCharacterTool).expect("unique tool names");
    r.register(UpdateEnvironmentTool).expect("unique tool names");
    r
}

fn token_list<T: Copy>(all: &[T], f: impl Fn(T) -> &'static str) -> String {
    all.iter().map(|t| f(*t)).collect::<Vec<_>>().join(", ")
}

/// Compact JSON bindings for `{characters}`, `{player_character}` and
/// `{environments}`.
pub fn roster_bindings(campaign: &Campaign) -> Bindings {
    let character = |c: &crate::state::Character| {
        json!({
            "name": c.name,
            "description": c.description,
            "type": c.char_type.as_str(),
            "state": c.health_state.as_str(),
        })
    };
    let characters: Vec<_> = campaign.characters.iter().map(character).collect();
    let environments: Vec<_> = campaign
        .environments
        .iter()
        .map(|e| json!({"name": e.name, "description": e.description, "isPlayerHere": e.is_player_here}))
        .collect();
    [
        ("characters", serde_json::Value::from(characters).to_string()),
        ("player_character", character(campaign.player()).to_string()),
        ("environments", serde_json::Value::from(environments).to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Debug, Deserialize)]
struct CharacterInput {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(rename = "type")]
    char_type: String,
    state: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EnvironmentInput {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    is_player_here: bool,
}

/// Creates or updates a character.
pub struct UpdateCharacterTool;

impl Tool<ArchivistContext<'_>> for UpdateCharacterTool {
    fn name(&self) -> &str {
        UPDATE_CHARACTER
    }

    fn description(&self, ctx: &ArchivistContext<'_>) -> String {
        let roster: Vec<&str> = ctx.campaign.characters.iter().map(|c| c.name.as_str()).collect();
        let list = format!(
            "{{{}}} (characters already tracked: {})",
            token_list(&CharacterType::ALL, CharacterType::as_str),
            roster.join(", ")
        );
        tools::UPDATE_CHARACTER.replace(&format!("{{{}}}", tools::DYNAMIC_CHARACTER_LIST), &list)
    }

    fn run(&self, ctx: &mut ArchivistContext<'_>, input: &str) -> String {
        let input: CharacterInput = match parse_input(
            input,
            r#"{"name": "...", "description": "...", "type": "...", "state": "..."}"#,
        ) {
            Ok(v) => v,
            Err(obs) => return obs,
        };
        let Some(char_type) = CharacterType::from_v1_label(&input.char_type) else {
            return format!(
                "Invalid character type \"{}\". Type must be one of the following: {{{}}}.",
                input.char_type,
                token_list(&CharacterType::ALL, CharacterType::as_str)
            );
        };
        let Ok(state) = input.state.parse::<HealthState>() else {
            return format!(
                "Invalid character state \"{}\". State must be one of the following: {{{}}}.",
                input.state,
                token_list(&HealthState::ALL, HealthState::as_str)
            );
        };
        let key = name_key(&input.name);
        if ctx.characters_done.contains(&key) {
            return format!(
                "The character {} has already been updated during this turn. The tool should only be used once per character.",
                input.name.trim()
            );
        }
        let upsert = CharacterUpsert {
            name: input.name.clone(),
            description: input.description.clone(),
            char_type,
            health_state: state,
            is_player: None,
        };
        match ctx.campaign.upsert_character(upsert) {
            Ok((id, outcome)) => {
                ctx.characters_done.insert(key);
                let c = ctx.campaign.character(id).expect("just upserted");
                match outcome {
                    Upserted::Created => format!(
                        "A new character {} has been created with the following description: {}",
                        c.name, c.description
                    ),
                    Upserted::Updated => format!(
                        "The character {} has been updated with the following description: {}",
                        c.name, c.description
                    ),
                }
            }
            Err(e) => format!("The character could not be updated: {e}."),
        }
    }
}

/// Creates or updates an environment.
pub struct UpdateEnvironmentTool;

impl Tool<ArchivistContext<'_>> for UpdateEnvironmentTool {
    fn name(&self) -> &str {
        UPDATE_ENVIRONMENT
    }

    fn description(&self, _: &ArchivistContext<'_>) -> String {
        tools::UPDATE_ENVIRONMENT.to_string()
    }

    fn run(&self, ctx: &mut ArchivistContext<'_>, input: &str) -> String {
        let input: EnvironmentInput = match parse_input(
            input,
            r#"{"name": "...", "description": "...", "isPlayerHere": true}"#,
        ) {
            Ok(v) => v,
            Err(obs) => return obs,
        };
        let key = name_key(&input.name);
        if ctx.environments_done.contains(&key) {
            return format!(
                "The environment {} has already been updated during this turn. The tool should only be used once per environment.",
                input.name.trim()
            );
        }
        match ctx
            .campaign
            .upsert_environment(&input.name, &input.description, input.is_player_here)
        {
            Ok((id, outcome)) => {
                ctx.environments_done.insert(key);
                let e = ctx
                    .campaign
                    .environments
                    .iter()
                    .find(|e| e.id == id)
                    .expect("just upserted");
                match outcome {
                    Upserted::Created => format!(
                        "A new environment {} has been created with the following description: {}",
                        e.name, e.description
                    ),
                    Upserted::Updated => format!(
                        "The environment {} has been updated with the following description: {}",
                        e.name, e.description
                    ),
                }
            }
            Err(e) => format!("The environment could not be updated: {e}."),
        }
    }
}
