//! The static prompt-pipeline engine.
//!
//! Every turn is a fixed sequence of single-shot requests. Each request holds
//! one system prompt, the whole conversation so far and the player's text, so
//! the context grows with every turn. The model answers in JSON, which is
//! merged into the world state.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::combat::GameRng;
use crate::engine::{opening_text, EngineConfig, StateDelta, TurnError};
use crate::llm::{ChatMessage, ChatRequest, LlmBackend};
use crate::prompts::{self, V1_CORRECTION};
use crate::state::{
    name_key, ActionKind, Campaign, CharacterId, CharacterType, CharacterUpsert, Clock, HealthState, MessageRole,
};

/// Hit points a hurting or healing action moves.
pub const HURT_HEAL_AMOUNT: i64 = 8;
/// Chance that the player's attack lands.
pub const PLAYER_HIT_CHANCE: f64 = 0.7;
/// Chance that the opponent's counterattack lands.
pub const OPPONENT_HIT_CHANCE: f64 = 0.5;
/// Base damage of every attack.
pub const BASE_DAMAGE: i64 = 8;

/// Damage an attacker of this type deals: large creatures hit half again as hard.
pub fn attack_damage(attacker: CharacterType) -> i64 {
    match attacker {
        CharacterType::LargeMonster | CharacterType::Boss => BASE_DAMAGE * 3 / 2,
        _ => BASE_DAMAGE,
    }
}

/// The combat prompt for a pre-rolled pair of outcomes.
pub fn combat_prompt(player_hit: bool, opponent_hit: bool) -> (&'static str, &'static str) {
    match (player_hit, opponent_hit) {
        (true, true) => ("combatHitHit", prompts::v1::COMBAT_HIT_HIT),
        (true, false) => ("combatHitMiss", prompts::v1::COMBAT_HIT_MISS),
        (false, true) => ("combatMissHit", prompts::v1::COMBAT_MISS_HIT),
        (false, false) => ("combatMissMiss", prompts::v1::COMBAT_MISS_MISS),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct V1Character {
    pub name: String,
    pub description: String,
    pub char_type: CharacterType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct V1Environment {
    pub name: String,
    pub description: String,
}

/// A narrative reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct V1Response {
    pub narrative: String,
    pub characters: Vec<V1Character>,
    pub environment: Option<V1Environment>,
    pub opponent: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurtHealVerdict {
    pub hurt: bool,
    pub heal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpponentReply {
    pub opponent: Option<String>,
    pub characters: Vec<V1Character>,
}

/// The first JSON object in `text`, tolerating prose or fences around it.
fn json_object(text: &str) -> Result<serde_json::Map<String, Value>, String> {
    let start = text.find('{').ok_or("no JSON object found")?;
    let end = text.rfind('}').ok_or("no JSON object found")?;
    if end < start {
        return Err("no JSON object found".into());
    }
    match serde_json::from_str::<Value>(&text[start..=end]) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err("not a JSON object".into()),
        Err(e) => Err(format!("invalid JSON: {e}")),
    }
}

fn str_field<'a>(map: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a str> {
    map.get(key).and_then(Value::as_str).map(str::trim).filter(|s| !s.is_empty())
}

/// The opponent slot, ignoring empty values and the format's own filler text.
fn opponent_field(map: &serde_json::Map<String, Value>) -> Option<String> {
    let name = str_field(map, "opponent")?;
    let lower = name.to_ascii_lowercase();
    let filler = ["none", "null", "n/a", "nobody", "no one"].contains(&lower.as_str())
        || lower.starts_with("name of current opponent");
    (!filler).then(|| name.to_string())
}

fn characters_field(map: &serde_json::Map<String, Value>) -> Vec<V1Character> {
    let Some(Value::Array(items)) = map.get("characters") else {
        return Vec::new();
    };
    items
        .iter()
        .filter_map(Value::as_object)
        .filter_map(|c| {
            Some(V1Character {
                name: str_field(c, "name")?.to_string(),
                description: str_field(c, "description").unwrap_or_default().to_string(),
                char_type: str_field(c, "type")
                    .and_then(CharacterType::from_v1_label)
                    .unwrap_or(CharacterType::Humanoid),
            })
        })
        .collect()
}

pub fn parse_response(text: &str) -> Result<V1Response, String> {
    let map = json_object(text)?;
    let narrative = str_field(&map, "narrative").ok_or("missing narrative")?.to_string();
    let environment = map.get("environment").and_then(Value::as_object).and_then(|e| {
        Some(V1Environment {
            name: str_field(e, "name")?.to_string(),
            description: str_field(e, "description").unwrap_or_default().to_string(),
        })
    });
    Ok(V1Response {
        narrative,
        characters: characters_field(&map),
        environment,
        opponent: opponent_field(&map),
    })
}

pub fn parse_verdict(text: &str) -> Result<HurtHealVerdict, String> {
    let map = json_object(text)?;
    let flag = |k: &str| match map.get(k) {
        Some(Value::Bool(b)) => Ok(*b),
        Some(Value::String(s)) if s.eq_ignore_ascii_case("true") => Ok(true),
        Some(Value::String(s)) if s.eq_ignore_ascii_case("false") => Ok(false),
        None => Ok(false),
        Some(v) => Err(format!("{k} is not a boolean: {v}")),
    };
    Ok(HurtHealVerdict {
        hurt: flag("hurt")?,
        heal: flag("heal")?,
    })
}

pub fn parse_opponent(text: &str) -> Result<OpponentReply, String> {
    let map = json_object(text)?;
    Ok(OpponentReply {
        opponent: opponent_field(&map),
        characters: characters_field(&map),
    })
}

/// System prompt, then the conversation so far, then the player's text.
///
/// Player and opening messages go out as user turns and game-master messages
/// as assistant turns. Log entries are left out.
pub fn build_request(system_prompt: &str, campaign: &Campaign, player_text: &str, config: &EngineConfig) -> ChatRequest {
    let mut messages = vec![ChatMessage::system(system_prompt)];
    for m in &campaign.messages {
        match (m.role, m.action_kind) {
            (MessageRole::GameMaster, _) => messages.push(ChatMessage::assistant(m.text.clone())),
            (MessageRole::Player, _) | (MessageRole::System, ActionKind::GameStart) => {
                messages.push(ChatMessage::user(m.text.clone()))
            }
            (MessageRole::System, _) => {}
        }
    }
    messages.push(ChatMessage::user(player_text));
    ChatRequest::new(messages, &config.generation)
}

/// One model call in a turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct V1Call {
    /// Which system prompt was used.
    pub prompt: String,
    /// Characters sent, summed over all messages.
    pub request_chars: usize,
    pub message_count: usize,
    pub raw: String,
    pub corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CombatRoll {
    pub opponent: String,
    pub player_hit: bool,
    pub opponent_hit: bool,
    pub player_damage: i64,
    pub opponent_damage: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct V1TurnTrace {
    pub turn: u64,
    pub action_kind: ActionKind,
    pub player_input: String,
    pub calls: Vec<V1Call>,
    pub verdict: Option<HurtHealVerdict>,
    pub combat: Option<CombatRoll>,
    pub narrative: String,
    pub state_delta: StateDelta,
}

impl V1TurnTrace {
    /// Size of the request that produced the narrative.
    pub fn narrative_request_chars(&self) -> usize {
        self.calls.last().map_or(0, |c| c.request_chars)
    }
}

/// Sends a request and parses the reply, re-asking once with a corrective
/// note when the reply does not parse.
fn ask<T>(
    backend: &dyn LlmBackend,
    prompt_name: &str,
    request: ChatRequest,
    parse: fn(&str) -> Result<T, String>,
    calls: &mut Vec<V1Call>,
) -> Result<T, TurnError> {
    let mut call = V1Call {
        prompt: prompt_name.to_string(),
        request_chars: request.content_len(),
        message_count: request.messages.len(),
        raw: String::new(),
        corrected: false,
    };
    let first = backend.complete(&request)?.text;
    call.raw = first.clone();
    let reason = match parse(&first) {
        Ok(v) => {
            calls.push(call);
            return Ok(v);
        }
        Err(reason) => reason,
    };
    tracing::warn!(prompt = prompt_name, %reason, "unparseable reply, asking again");
    let mut retry = request;
    retry.messages.push(ChatMessage::assistant(first));
    retry.messages.push(ChatMessage::system(V1_CORRECTION));
    let second = backend.complete(&retry)?.text;
    call.raw = second.clone();
    call.corrected = true;
    calls.push(call);
    parse(&second).map_err(|reason| TurnError::Unparseable { reason, raw: second })
}

fn upsert_new(campaign: &mut Campaign, c: &V1Character) -> Result<CharacterId, TurnError> {
    if let Some(existing) = campaign.character_by_name(&c.name) {
        let upsert = CharacterUpsert {
            name: existing.name.clone(),
            description: if c.description.is_empty() {
                existing.description.clone()
            } else {
                c.description.clone()
            },
            char_type: existing.char_type,
            health_state: existing.health_state,
            is_player: None,
        };
        return Ok(campaign.upsert_character(upsert)?.0);
    }
    let upsert = CharacterUpsert::npc(&c.name, &c.description, c.char_type, HealthState::Healthy);
    Ok(campaign.upsert_character(upsert)?.0)
}

/// Finds a character the model referred to by name: an exact match, then the
/// name without a leading article, then the most recent non-player character
/// whose name contains the reference or is contained in it.
pub fn find_by_name(campaign: &Campaign, name: &str) -> Option<CharacterId> {
    let key = name_key(name);
    let bare = ["the ", "a ", "an "]
        .iter()
        .find_map(|a| key.strip_prefix(a))
        .unwrap_or(&key)
        .to_string();
    if bare.is_empty() {
        return None;
    }
    let exact = |k: &str| campaign.characters.iter().find(|c| name_key(&c.name) == k).map(|c| c.id);
    exact(&key).or_else(|| exact(&bare)).or_else(|| {
        campaign
            .characters
            .iter()
            .rev()
            .filter(|c| !c.is_player)
            .find(|c| {
                let n = name_key(&c.name);
                n.contains(&bare) || bare.contains(&n)
            })
            .map(|c| c.id)
    })
}

fn alive_opponent(campaign: &Campaign, id: Option<CharacterId>) -> Option<CharacterId> {
    id.filter(|id| campaign.character(*id).is_some_and(|c| !c.is_dead() && !c.is_player))
}

/// Folds a narrative reply into the world state.
fn merge(campaign: &mut Campaign, reply: &V1Response) -> Result<(), TurnError> {
    for c in &reply.characters {
        upsert_new(campaign, c)?;
    }
    if let Some(env) = &reply.environment {
        campaign.upsert_environment(&env.name, &env.description, true)?;
    }
    if let Some(name) = &reply.opponent {
        let found = find_by_name(campaign, name);
        campaign.current_opponent_id = alive_opponent(campaign, found).or(campaign.current_opponent_id);
    }
    campaign.current_opponent_id = alive_opponent(campaign, campaign.current_opponent_id);
    Ok(())
}

fn status(campaign: &Campaign, id: CharacterId) -> String {
    let c = campaign.character(id).expect("combatant exists");
    format!("{} has {} of {} health points", c.name, c.current_hp, c.max_hp)
}

/// Plays one turn on `campaign`. The caller commits or discards the result.
pub fn run_turn(
    campaign: &mut Campaign,
    kind: ActionKind,
    text: &str,
    backend: &dyn LlmBackend,
    rng: &mut GameRng,
    config: &EngineConfig,
    clock: &dyn Clock,
) -> Result<V1TurnTrace, TurnError> {
    let before = campaign.clone();
    let mut calls = Vec::new();
    let mut verdict = None;
    let mut combat = None;
    let reply = match kind {
        ActionKind::GameStart => {
            let opening = opening_text(campaign);
            let request = build_request(prompts::v1::INITIAL_GAME_START, campaign, &opening, config);
            let reply = ask(backend, "initialGameStart", request, parse_response, &mut calls)?;
            campaign.push_message(MessageRole::System, ActionKind::GameStart, opening, clock)?;
            reply
        }
        ActionKind::Say => {
            let request = build_request(prompts::v1::SAY_ACTION, campaign, text, config);
            let reply = ask(backend, "sayAction", request, parse_response, &mut calls)?;
            campaign.push_message(MessageRole::Player, ActionKind::Say, text, clock)?;
            reply
        }
        ActionKind::Do => {
            let request = build_request(prompts::v1::DO_ACTION_HURT_OR_HEAL, campaign, text, config);
            let v = ask(backend, "doActionHurtOrHeal", request, parse_verdict, &mut calls)?;
            let pid = campaign.player_character_id;
            if v.hurt {
                campaign.apply_hp_delta(pid, -HURT_HEAL_AMOUNT)?;
            }
            if v.heal {
                campaign.apply_hp_delta(pid, HURT_HEAL_AMOUNT)?;
            }
            verdict = Some(v);
            let request = build_request(prompts::v1::DO_ACTION, campaign, text, config);
            let reply = ask(backend, "doAction", request, parse_response, &mut calls)?;
            campaign.push_message(MessageRole::Player, ActionKind::Do, text, clock)?;
            reply
        }
        ActionKind::Attack => {
            let request = build_request(prompts::v1::COMBAT_OPPONENT_DESCRIPTION, campaign, text, config);
            let found = ask(backend, "combatOpponentDescription", request, parse_opponent, &mut calls)?;
            for c in &found.characters {
                upsert_new(campaign, c)?;
            }
            let named = match &found.opponent {
                Some(name) => match find_by_name(campaign, name) {
                    Some(id) => Some(id),
                    None => Some(upsert_new(
                        campaign,
                        &V1Character {
                            name: name.clone(),
                            description: String::new(),
                            char_type: CharacterType::Humanoid,
                        },
                    )?),
                },
                None => None,
            };
            let opponent = named
                .filter(|id| *id != campaign.player_character_id)
                .or(campaign.current_opponent_id)
                .ok_or(TurnError::NoOpponent)?;
            campaign.current_opponent_id = Some(opponent);

            // both outcomes are drawn up front so the flavor prompt can be chosen
            let player_hit = rng.chance(PLAYER_HIT_CHANCE);
            let opponent_rolled = rng.chance(OPPONENT_HIT_CHANCE);
            let pid = campaign.player_character_id;
            let player_damage = attack_damage(campaign.player().char_type);
            let opponent_damage = attack_damage(campaign.character(opponent).expect("resolved").char_type);
            let mut facts = Vec::new();
            if player_hit {
                campaign.apply_hp_delta(opponent, -player_damage)?;
                facts.push(format!(
                    "The player's attack deals {player_damage} damage. {}.",
                    status(campaign, opponent)
                ));
            } else {
                facts.push(format!("The player's attack misses. {}.", status(campaign, opponent)));
            }
            // an opponent knocked out by the player's blow cannot strike back
            let opponent_hit = opponent_rolled && campaign.character(opponent).is_some_and(|c| c.current_hp > 0);
            if opponent_hit {
                campaign.apply_hp_delta(pid, -opponent_damage)?;
                facts.push(format!(
                    "The opponent's attack deals {opponent_damage} damage. {}.",
                    status(campaign, pid)
                ));
            } else {
                facts.push(format!("The opponent's attack misses. {}.", status(campaign, pid)));
            }
            let opp = campaign.character(opponent).expect("resolved");
            if opp.is_dead() {
                facts.push(format!("{} has died.", opp.name));
            }
            combat = Some(CombatRoll {
                opponent: opp.name.clone(),
                player_hit,
                opponent_hit,
                player_damage: if player_hit { player_damage } else { 0 },
                opponent_damage: if opponent_hit { opponent_damage } else { 0 },
            });
            let (name, prompt) = combat_prompt(player_hit, opponent_hit);
            let content = format!("{text}\n\nAttack details: {}", facts.join(" "));
            let request = build_request(prompt, campaign, &content, config);
            let reply = ask(backend, name, request, parse_response, &mut calls)?;
            campaign.push_message(MessageRole::Player, ActionKind::Attack, text, clock)?;
            reply
        }
        ActionKind::None => return Err(TurnError::InvalidAction(kind)),
    };
    merge(campaign, &reply)?;
    campaign.push_message(MessageRole::GameMaster, ActionKind::None, reply.narrative.clone(), clock)?;
    Ok(V1TurnTrace {
        turn: before.turn_count,
        action_kind: kind,
        player_input: text.to_string(),
        calls,
        verdict,
        combat,
        narrative: reply.narrative,
        state_delta: StateDelta::between(&before, campaign),
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
                start_scenario: "A goblin blocks the road.".into(),
                player_name: "Ivan".into(),
                player_description: "A wanderer.".into(),
                engine: Engine::V1,
                rng_seed: 3,
            },
            &StepClock::fixed(),
        )
        .unwrap()
    }

    fn narrative(text: &str) -> String {
        serde_json::json!({"narrative": text, "characters": [], "environment": {}, "opponent": ""}).to_string()
    }

    #[test]
    fn parses_the_documented_structure() {
        let r = parse_response(
            r#"Here you go: { "narrative": "You wake.", "characters": [{"name": "Rat", "description": "Small", "type": "SmallCreature"}, {"description": "nameless"}], "environment": {"name": "Cellar", "description": "Damp"}, "opponent": "name of current opponent, if any" }"#,
        )
        .unwrap();
        assert_eq!(r.narrative, "You wake.");
        assert_eq!(r.characters.len(), 1);
        assert_eq!(r.characters[0].char_type, CharacterType::SmallMonster);
        assert_eq!(r.environment.unwrap().name, "Cellar");
        assert_eq!(r.opponent, None);
        assert!(parse_response(r#"{"characters": []}"#).is_err());
        assert!(parse_response("no json").is_err());
        assert_eq!(parse_response(&narrative("x")).unwrap().environment, None);
    }

    #[test]
    fn creature_labels_map_onto_types() {
        for (label, t) in [
            ("Humanoid", CharacterType::Humanoid),
            ("SmallCreature", CharacterType::SmallMonster),
            ("LargeCreature", CharacterType::LargeMonster),
            ("Monster", CharacterType::Boss),
            ("Eldritch", CharacterType::Humanoid),
        ] {
            let r = parse_opponent(&format!(
                r#"{{"opponent": "X", "characters": [{{"name": "X", "description": "", "type": "{label}"}}]}}"#
            ))
            .unwrap();
            assert_eq!(r.characters[0].char_type, t, "{label}");
        }
    }

    #[test]
    fn request_is_prompt_history_then_input() {
        let mut c = campaign();
        let clock = StepClock::fixed();
        c.push_message(MessageRole::System, ActionKind::GameStart, "open", &clock).unwrap();
        c.push_message(MessageRole::GameMaster, ActionKind::None, "intro", &clock).unwrap();
        c.push_message(MessageRole::Player, ActionKind::Do, "look", &clock).unwrap();
        c.push_message(MessageRole::GameMaster, ActionKind::None, "dark", &clock).unwrap();
        c.push_message(MessageRole::System, ActionKind::None, "log entry", &clock).unwrap();
        let r = build_request("SYS", &c, "run", &EngineConfig::default());
        let roles: Vec<_> = r.messages.iter().map(|m| format!("{:?}:{}", m.role, m.content)).collect();
        assert_eq!(
            roles,
            ["System:SYS", "User:open", "Assistant:intro", "User:look", "Assistant:dark", "User:run"]
        );
    }

    #[test]
    fn do_turn_applies_hurt_before_narrating() {
        let mut c = campaign();
        let backend = ScriptedBackend::from_responses([r#"{"hurt": true, "heal": false}"#.to_string(), narrative("Ouch.")]);
        let t = run_turn(
            &mut c,
            ActionKind::Do,
            "I stab my own hand",
            &backend,
            &mut GameRng::from_seed(1),
            &EngineConfig::default(),
            &StepClock::fixed(),
        )
        .unwrap();
        assert_eq!(c.player().current_hp, 32);
        assert_eq!(t.verdict, Some(HurtHealVerdict { hurt: true, heal: false }));
        assert_eq!(t.calls.iter().map(|c| c.prompt.as_str()).collect::<Vec<_>>(), ["doActionHurtOrHeal", "doAction"]);
        assert_eq!(c.messages.len(), 2);
        assert_eq!(c.messages[1].text, "Ouch.");
    }

    #[test]
    fn one_corrective_retry_then_failure() {
        let mut c = campaign();
        let backend = ScriptedBackend::from_responses(["oops".to_string(), narrative("Fine.")]);
        let cfg = EngineConfig::default();
        let clock = StepClock::fixed();
        let t = run_turn(&mut c, ActionKind::Say, "hello", &backend, &mut GameRng::from_seed(1), &cfg, &clock).unwrap();
        assert!(t.calls[0].corrected);
        let second = &backend.transcript()[1].request;
        assert_eq!(second.messages.last().unwrap().content, V1_CORRECTION);

        let backend = ScriptedBackend::from_responses(["oops".to_string(), "still oops".to_string()]);
        let err = run_turn(&mut c, ActionKind::Say, "hello", &backend, &mut GameRng::from_seed(1), &cfg, &clock)
            .unwrap_err();
        assert!(matches!(err, TurnError::Unparseable { ref raw, .. } if raw == "still oops"));
    }

    #[test]
    fn attack_selects_prompt_from_prerolled_outcomes() {
        for (ph, oh) in [(true, true), (true, false), (false, true), (false, false)] {
            let mut c = campaign();
            let backend = ScriptedBackend::from_responses([
                r#"{"opponent": "Goblin", "characters": [{"name": "Goblin", "description": "Sneaky", "type": "SmallCreature"}]}"#.to_string(),
                narrative("Clash."),
            ]);
            let t = run_turn(
                &mut c,
                ActionKind::Attack,
                "I swing at the goblin",
                &backend,
                &mut GameRng::forced_hits(&[ph, oh]),
                &EngineConfig::default(),
                &StepClock::fixed(),
            )
            .unwrap();
            let sent = &backend.transcript()[1].request.messages[0].content;
            assert_eq!(sent, combat_prompt(ph, oh).1);
            let goblin = c.character_by_name("Goblin").unwrap();
            assert_eq!(goblin.current_hp, if ph { 12 } else { 20 });
            assert_eq!(c.player().current_hp, if oh { 32 } else { 40 });
            assert_eq!(c.current_opponent_id, Some(goblin.id));
            assert_eq!(t.combat.unwrap().player_hit, ph);
        }
    }

    #[test]
    fn names_resolve_loosely() {
        let mut c = campaign();
        let (gid, _) = c
            .upsert_character(CharacterUpsert::npc("Goblin Chief", "", CharacterType::Boss, HealthState::Healthy))
            .unwrap();
        assert_eq!(find_by_name(&c, "goblin chief"), Some(gid));
        assert_eq!(find_by_name(&c, "the Goblin Chief"), Some(gid));
        assert_eq!(find_by_name(&c, "Chief"), Some(gid));
        assert_eq!(find_by_name(&c, "Ivan"), Some(c.player_character_id));
        assert_eq!(find_by_name(&c, "Dragon"), None);
        assert_eq!(find_by_name(&c, "the"), None);
    }

    #[test]
    fn large_attackers_deal_more() {
        assert_eq!(attack_damage(CharacterType::Humanoid), 8);
        assert_eq!(attack_damage(CharacterType::LargeMonster), 12);
        assert_eq!(attack_damage(CharacterType::Boss), 12);
    }

    #[test]
    fn attack_without_any_opponent_fails() {
        let mut c = campaign();
        let backend = ScriptedBackend::from_responses([r#"{"opponent": "", "characters": []}"#.to_string()]);
        let err = run_turn(
            &mut c,
            ActionKind::Attack,
            "I swing wildly",
            &backend,
            &mut GameRng::from_seed(1),
            &EngineConfig::default(),
            &StepClock::fixed(),
        )
        .unwrap_err();
        assert!(matches!(err, TurnError::NoOpponent));
    }
}
