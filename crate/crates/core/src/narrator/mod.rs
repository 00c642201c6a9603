//! The Narrator's tools: Battle, WoundCharacter and HealCharacter.

mod matcher;

pub use matcher::{CharacterMatcher, DeterministicMatcher, LlmMatcher, MatchPurpose};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::combat::{
    magnitude_healing, roll_hit, severity_damage, DamageSeverity, GameRng, HealMagnitude, HitChance,
};
use crate::prompts::tools;
use crate::react::{Registry, Tool};
use crate::state::{Campaign, CharacterId, CharacterType, CharacterUpsert, HealthState};

pub const BATTLE: &str = "Battle";
pub const WOUND_CHARACTER: &str = "WoundCharacter";
pub const HEAL_CHARACTER: &str = "HealCharacter";

pub const NO_MARKDOWN: &str = "Do not use markdown, only raw JSON as input.";

/// Per-turn record of what the combat tools have already done.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnCombatLedger {
    /// Unordered pairs, stored smaller id first.
    pub resolved_pairs: BTreeSet<(CharacterId, CharacterId)>,
    #[serde(with = "id_pairs")]
    pub hits_by_character: BTreeMap<CharacterId, u32>,
    pub wounded: BTreeSet<CharacterId>,
    pub healed: BTreeSet<CharacterId>,
}

/// Writes an id-keyed map as `[[id, value], ...]`. JSON object keys are
/// strings, which do not survive a round trip through tagged enums.
mod id_pairs {
    use super::CharacterId;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<CharacterId, u32>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<CharacterId, u32>, D::Error> {
        Ok(Vec::<(CharacterId, u32)>::deserialize(d)?.into_iter().collect())
    }
}

impl TurnCombatLedger {
    fn pair(a: CharacterId, b: CharacterId) -> (CharacterId, CharacterId) {
        (a.min(b), a.max(b))
    }

    pub fn is_resolved(&self, a: CharacterId, b: CharacterId) -> bool {
        self.resolved_pairs.contains(&Self::pair(a, b))
    }

    pub fn in_battle(&self, id: CharacterId) -> bool {
        self.resolved_pairs.iter().any(|(a, b)| *a == id || *b == id)
    }

    pub fn hits(&self, id: CharacterId) -> u32 {
        self.hits_by_character.get(&id).copied().unwrap_or(0)
    }
}

/// Everything the Narrator's tools can touch during one turn.
pub struct NarratorContext<'a> {
    pub campaign: &'a mut Campaign,
    pub rng: &'a mut GameRng,
    pub matcher: &'a dyn CharacterMatcher,
    pub ledger: TurnCombatLedger,
}

impl<'a> NarratorContext<'a> {
    pub fn new(campaign: &'a mut Campaign, rng: &'a mut GameRng, matcher: &'a dyn CharacterMatcher) -> Self {
        Self {
            campaign,
            rng,
            matcher,
            ledger: TurnCombatLedger::default(),
        }
    }
}

/// The Narrator's registry: Battle, WoundCharacter, HealCharacter.
pub fn registry<'a>() -> Registry<NarratorContext<'a>> {
    let mut r = Registry::new();
    r.register(BattleTool).expect("unique tool names");
    r.register(WoundCharacterTool).expect("unique tool names");
    r.register(HealCharacterTool).expect("unique tool names");
    r
}

fn is_fenced(input: &str) -> bool {
    input.trim_start().starts_with("```")
}

/// Parses raw JSON tool input, turning failures into observation text.
pub(crate) fn parse_input<T: DeserializeOwned>(input: &str, format_hint: &str) -> Result<T, String> {
    if is_fenced(input) {
        return Err(NO_MARKDOWN.to_string());
    }
    serde_json::from_str(input.trim())
        .map_err(|e| format!("Invalid input: {e}. Input to this tool must be in the following RAW JSON format: {format_hint}"))
}

fn hp_sentence(campaign: &Campaign, id: CharacterId) -> String {
    let c = campaign.character(id).expect("resolved character exists");
    format!(
        "They have {} health points out of {} remaining.",
        c.current_hp, c.max_hp
    )
}

fn downed_sentence(campaign: &Campaign, id: CharacterId) -> Option<String> {
    let c = campaign.character(id)?;
    match c.health_state {
        HealthState::Dead => Some(format!("{} has died.", c.name)),
        HealthState::Unconscious => Some(format!("{} falls unconscious.", c.name)),
        _ => None,
    }
}

#[derive(Debug, Deserialize)]
struct Participant {
    name: String,
    #[serde(default)]
    description: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct BattleInput {
    participant1: Participant,
    participant2: Participant,
    participant1_hit_chance: HitChance,
    participant2_hit_chance: HitChance,
    participant1_damage_severity: DamageSeverity,
    participant2_damage_severity: DamageSeverity,
}

const BATTLE_FORMAT: &str = r#"{"participant1": {"name": "...", "description": "..."}, "participant2": {"name": "...", "description": "..."}, "participant1HitChance": "...", "participant2HitChance": "...", "participant1DamageSeverity": "...", "participant2DamageSeverity": "..."}"#;

/// Resolves one exchange of attacks between two characters.
pub struct BattleTool;

impl BattleTool {
    fn resolve_participant(ctx: &mut NarratorContext<'_>, p: &Participant) -> Result<CharacterId, String> {
        if let Some(id) = ctx.matcher.match_character(ctx.campaign, &p.name, &p.description) {
            return Ok(id);
        }
        ctx.campaign
            .upsert_character(CharacterUpsert::npc(
                p.name.clone(),
                p.description.clone(),
                CharacterType::Humanoid,
                HealthState::Healthy,
            ))
            .map(|(id, _)| id)
            .map_err(|e| format!("Could not add participant {:?}: {e}.", p.name))
    }

    /// One attack. Returns the sentences describing it.
    fn attack(
        ctx: &mut NarratorContext<'_>,
        attacker: CharacterId,
        defender: CharacterId,
        chance: HitChance,
        severity: DamageSeverity,
    ) -> Vec<String> {
        let a_name = ctx.campaign.character(attacker).expect("exists").name.clone();
        let d_name = ctx.campaign.character(defender).expect("exists").name.clone();
        let prior = ctx.ledger.hits(attacker);
        if !roll_hit(ctx.rng, chance, prior) {
            return vec![format!("{a_name} misses their attack on {d_name}.")];
        }
        *ctx.ledger.hits_by_character.entry(attacker).or_default() += 1;
        let damage = severity_damage(severity);
        ctx.campaign.apply_hp_delta(defender, -damage).expect("exists");
        let mut out = vec![format!(
            "{a_name} deals {damage} damage to {d_name}. {}",
            hp_sentence(ctx.campaign, defender)
        )];
        out.extend(downed_sentence(ctx.campaign, defender));
        out
    }
}

fn trim_period(s: &str) -> &str {
    let s = s.trim();
    s.strip_suffix('.').unwrap_or(s)
}

impl Tool<NarratorContext<'_>> for BattleTool {
    fn name(&self) -> &str {
        BATTLE
    }

    fn description(&self, _: &NarratorContext<'_>) -> String {
        tools::BATTLE.to_string()
    }

    fn run(&self, ctx: &mut NarratorContext<'_>, input: &str) -> String {
        let input: BattleInput = match parse_input(input, BATTLE_FORMAT) {
            Ok(v) => v,
            Err(obs) => return obs,
        };
        let p1 = match Self::resolve_participant(ctx, &input.participant1) {
            Ok(id) => id,
            Err(obs) => return obs,
        };
        let p2 = match Self::resolve_participant(ctx, &input.participant2) {
            Ok(id) => id,
            Err(obs) => return obs,
        };
        let n1 = ctx.campaign.character(p1).expect("exists").name.clone();
        let n2 = ctx.campaign.character(p2).expect("exists").name.clone();
        if p1 == p2 {
            return format!(
                "Both participants refer to the same character, {n1}. A battle needs two different characters."
            );
        }
        if ctx.ledger.is_resolved(p1, p2) {
            return format!("{n1} and {n2}'s battle has been resolved and this pair can not be used for the battle tool again.");
        }
        for (id, name) in [(p1, &n1), (p2, &n2)] {
            if ctx.campaign.character(id).expect("exists").is_dead() {
                return format!("{name} is dead and cannot take part in a battle.");
            }
        }
        if ctx.campaign.character(p1).expect("exists").current_hp == 0 {
            return format!("{n1} is unconscious and cannot attack.");
        }

        let header = format!(
            "{n1} described as \"{}\" fights {n2} described as \"{}\".",
            trim_period(&input.participant1.description),
            trim_period(&input.participant2.description)
        );
        let mut sentences = Self::attack(
            ctx,
            p1,
            p2,
            input.participant1_hit_chance,
            input.participant1_damage_severity,
        );
        if ctx.campaign.character(p2).expect("exists").current_hp == 0 {
            sentences.push(format!("{n2} is unable to retaliate."));
        } else {
            sentences.extend(Self::attack(
                ctx,
                p2,
                p1,
                input.participant2_hit_chance,
                input.participant2_damage_severity,
            ));
        }
        ctx.ledger.resolved_pairs.insert(TurnCombatLedger::pair(p1, p2));
        sentences.push(format!(
            "{n1} and {n2}'s battle has been resolved and this pair can not be used for the battle tool again."
        ));
        format!("{header}\n{}", sentences.join(" "))
    }
}

#[derive(Debug, Deserialize)]
struct WoundInput {
    input: String,
    severity: DamageSeverity,
}

#[derive(Debug, Deserialize)]
struct HealInput {
    input: String,
    magnitude: HealMagnitude,
}

fn target_not_found(what: &str) -> String {
    format!("Could not determine which character is {what} from the input. Name the character in the input.")
}

/// Injures a character outside of battle.
pub struct WoundCharacterTool;

impl Tool<NarratorContext<'_>> for WoundCharacterTool {
    fn name(&self) -> &str {
        WOUND_CHARACTER
    }

    fn description(&self, _: &NarratorContext<'_>) -> String {
        tools::WOUND_CHARACTER.to_string()
    }

    fn run(&self, ctx: &mut NarratorContext<'_>, input: &str) -> String {
        let input: WoundInput = match parse_input(input, r#"{"input": "...", "severity": "..."}"#) {
            Ok(v) => v,
            Err(obs) => return obs,
        };
        if input.severity == DamageSeverity::Harmless {
            return "Invalid severity harmless. Severity must be one of {low, medium, high, extraordinary}.".into();
        }
        let Some(id) = ctx.matcher.find_target(ctx.campaign, MatchPurpose::Wound, &input.input) else {
            return target_not_found("hurt");
        };
        let name = ctx.campaign.character(id).expect("exists").name.clone();
        if ctx.campaign.character(id).expect("exists").is_dead() {
            return format!("{name} is dead and cannot be wounded.");
        }
        if ctx.ledger.wounded.contains(&id) {
            return format!("{name} has already been wounded this turn. This tool can only be used once per character.");
        }
        if ctx.ledger.in_battle(id) {
            return format!("{name} is engaged in battle this turn and cannot be wounded by this tool.");
        }
        let damage = severity_damage(input.severity);
        ctx.campaign.apply_hp_delta(id, -damage).expect("exists");
        ctx.ledger.wounded.insert(id);
        let mut out = format!("{name} is wounded and takes {damage} damage. {}", hp_sentence(ctx.campaign, id));
        if let Some(s) = downed_sentence(ctx.campaign, id) {
            out.push(' ');
            out.push_str(&s);
        }
        out
    }
}

/// Restores a character's health.
pub struct HealCharacterTool;

impl Tool<NarratorContext<'_>> for HealCharacterTool {
    fn name(&self) -> &str {
        HEAL_CHARACTER
    }

    fn description(&self, _: &NarratorContext<'_>) -> String {
        tools::HEAL_CHARACTER.to_string()
    }

    fn run(&self, ctx: &mut NarratorContext<'_>, input: &str) -> String {
        let input: HealInput = match parse_input(input, r#"{"input": "...", "magnitude": "..."}"#) {
            Ok(v) => v,
            Err(obs) => return obs,
        };
        let Some(id) = ctx.matcher.find_target(ctx.campaign, MatchPurpose::Heal, &input.input) else {
            return target_not_found("healed");
        };
        let c = ctx.campaign.character(id).expect("exists");
        let (name, before, max_hp) = (c.name.clone(), c.current_hp, c.max_hp);
        if c.is_dead() {
            return format!("{name} is dead and cannot be healed.");
        }
        if ctx.ledger.healed.contains(&id) {
            return format!("{name} has already been healed this turn. This tool can only be used once per character.");
        }
        let amount = magnitude_healing(input.magnitude, max_hp);
        let after = ctx.campaign.apply_hp_delta(id, amount).expect("exists").current_hp;
        ctx.ledger.healed.insert(id);
        format!(
            "{name} is healed and regains {} health points. {}",
            after - before,
            hp_sentence(ctx.campaign, id)
        )
    }
}
