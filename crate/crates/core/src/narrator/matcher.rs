//! Resolving names and free-text inputs to characters in the roster.

use serde::Deserialize;
use std::collections::BTreeSet;

use crate::llm::{ChatMessage, ChatRequest, GenerationSettings, LlmBackend};
use crate::prompts::utility;
use crate::react::{Bindings, PromptTemplate};
use crate::state::{name_key, Campaign, Character, CharacterId};

const STOPWORDS: [&str; 4] = ["the", "a", "an", "of"];
const FIRST_PERSON: [&str; 5] = ["i", "me", "my", "myself", "mine"];
const DESCRIPTION_JACCARD: f64 = 0.5;

/// Why a character is being looked up; selects the lookup instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchPurpose {
    Battle,
    Wound,
    Heal,
}

pub trait CharacterMatcher: Send + Sync {
    /// Finds the roster character a `{name, description}` pair refers to.
    fn match_character(&self, campaign: &Campaign, name: &str, description: &str) -> Option<CharacterId>;

    /// Finds the character a player's input affects (the one hurt or healed).
    fn find_target(&self, campaign: &Campaign, purpose: MatchPurpose, input: &str) -> Option<CharacterId>;
}

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric() && c != '\'' && c != '\u{2019}')
        .map(|w| w.trim_matches(['\'', '\u{2019}']).to_lowercase())
        // possessives name the same character
        .map(|w| match w.strip_suffix("'s").or_else(|| w.strip_suffix("\u{2019}s")) {
            Some(stem) => stem.to_string(),
            None => w,
        })
        .filter(|w| !w.is_empty())
        .collect()
}

fn content_tokens(text: &str) -> BTreeSet<String> {
    words(text)
        .into_iter()
        .filter(|w| !STOPWORDS.contains(&w.as_str()))
        .collect()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count() as f64;
    let union = a.union(b).count() as f64;
    inter / union
}

/// Rule-based matcher.
///
/// `match_character` tries, in order: case-folded exact name; one name's
/// tokens being a subset of the other's; description token Jaccard of at
/// least one half. Within the first tier that has candidates, the most
/// recently mentioned character wins, then the earliest created.
///
/// `find_target` picks the character whose name is mentioned earliest in the
/// input; failing that, a first-person pronoun means the player.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterministicMatcher;

/// Sort key for wound/heal targets; the greatest wins.
type TargetRank = (usize, std::cmp::Reverse<usize>, std::cmp::Reverse<u64>, usize, CharacterId);

fn best<'c>(campaign: &Campaign, candidates: Vec<&'c Character>) -> Option<&'c Character> {
    // max_by_key keeps the last maximum, so iterate in reverse insertion order
    candidates
        .into_iter()
        .rev()
        .max_by_key(|c| campaign.last_mention(&c.name).unwrap_or(0))
}

impl CharacterMatcher for DeterministicMatcher {
    fn match_character(&self, campaign: &Campaign, name: &str, description: &str) -> Option<CharacterId> {
        let key = name_key(name);
        if key.is_empty() && description.trim().is_empty() {
            return None;
        }
        let exact: Vec<_> = campaign.characters.iter().filter(|c| name_key(&c.name) == key).collect();
        if let Some(c) = best(campaign, exact) {
            return Some(c.id);
        }
        let query = content_tokens(name);
        if !query.is_empty() {
            let partial: Vec<_> = campaign
                .characters
                .iter()
                .filter(|c| {
                    let t = content_tokens(&c.name);
                    !t.is_empty() && (query.is_subset(&t) || t.is_subset(&query))
                })
                .collect();
            if let Some(c) = best(campaign, partial) {
                return Some(c.id);
            }
        }
        let desc = content_tokens(description);
        let similar: Vec<_> = campaign
            .characters
            .iter()
            .filter(|c| jaccard(&desc, &content_tokens(&c.description)) >= DESCRIPTION_JACCARD)
            .collect();
        best(campaign, similar).map(|c| c.id)
    }

    fn find_target(&self, campaign: &Campaign, _purpose: MatchPurpose, input: &str) -> Option<CharacterId> {
        let input_words = words(input);
        let mut best_hit: Option<TargetRank> = None;
        for (order, c) in campaign.characters.iter().enumerate() {
            let name_tokens: BTreeSet<String> = content_tokens(&c.name)
                .into_iter()
                .filter(|t| t.chars().count() >= 3)
                .collect();
            let first = input_words.iter().position(|w| name_tokens.contains(w));
            let Some(pos) = first else { continue };
            let matched = name_tokens.iter().filter(|t| input_words.contains(t)).count();
            let mention = campaign.last_mention(&c.name).unwrap_or(0);
            // earliest position, then most tokens, then most recent mention, then insertion order
            let key = (pos, std::cmp::Reverse(matched), std::cmp::Reverse(mention), order, c.id);
            if best_hit.as_ref().is_none_or(|b| key < *b) {
                best_hit = Some(key);
            }
        }
        if let Some(hit) = best_hit {
            return Some(hit.4);
        }
        input_words
            .iter()
            .any(|w| FIRST_PERSON.contains(&w.as_str()))
            .then_some(campaign.player_character_id)
    }
}

/// Matcher that asks the model, through the character-finding prompt, and
/// falls back to [`DeterministicMatcher`] when the reply names no roster
/// character or the call fails.
pub struct LlmMatcher<'a> {
    pub backend: &'a dyn LlmBackend,
    pub generation: GenerationSettings,
}

#[derive(Deserialize)]
struct FoundCharacter {
    name: Option<String>,
}

fn roster_json(campaign: &Campaign) -> String {
    let characters: Vec<_> = campaign
        .characters
        .iter()
        .map(|c| serde_json::json!({"name": c.name, "description": c.description, "type": c.char_type.as_str()}))
        .collect();
    serde_json::json!({ "characters": characters }).to_string()
}

impl LlmMatcher<'_> {
    fn ask(&self, campaign: &Campaign, instruction: String) -> Option<CharacterId> {
        let template = PromptTemplate::new(utility::FIND_CHARACTER);
        let bindings: Bindings = [("instruction".to_string(), instruction)].into();
        let prompt = template.render(&bindings).ok()?;
        let request = ChatRequest::new(vec![ChatMessage::user(prompt)], &self.generation);
        let reply = self.backend.complete(&request).ok()?;
        let text = reply.text.trim();
        let json = &text[text.find('{')?..=text.rfind('}')?];
        let found: FoundCharacter = serde_json::from_str(json).ok()?;
        campaign.character_by_name(found.name?.as_str()).map(|c| c.id)
    }

    fn context(campaign: &Campaign) -> String {
        format!(
            "Existing characters: {}. The player character is {}. First-person pronouns refer to them.",
            roster_json(campaign),
            campaign.player().name
        )
    }
}

impl CharacterMatcher for LlmMatcher<'_> {
    fn match_character(&self, campaign: &Campaign, name: &str, description: &str) -> Option<CharacterId> {
        let query = serde_json::json!({"name": name, "description": description});
        let instruction = format!(
            "{} Find the character corresponding to the following JSON description: {}. {}",
            utility::BATTLE_INSTRUCTION,
            query,
            Self::context(campaign)
        );
        self.ask(campaign, instruction)
            .or_else(|| DeterministicMatcher.match_character(campaign, name, description))
    }

    fn find_target(&self, campaign: &Campaign, purpose: MatchPurpose, input: &str) -> Option<CharacterId> {
        let base = match purpose {
            MatchPurpose::Heal => utility::HEAL_CHARACTER_INSTRUCTION,
            MatchPurpose::Wound | MatchPurpose::Battle => utility::WOUND_CHARACTER_INSTRUCTION,
        };
        let instruction = format!(
            "{base} Find the character corresponding to the following content: {input:?}. {}",
            Self::context(campaign)
        );
        self.ask(campaign, instruction)
            .or_else(|| DeterministicMatcher.find_target(campaign, purpose, input))
    }
}
