//! Prompt texts shipped with the engines, embedded from `assets/prompts`.

macro_rules! asset {
    ($path:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/prompts/", $path))
    };
}

/// System prompts of the static pipeline engine.
pub mod v1 {
    pub const INITIAL_GAME_START: &str = asset!("v1/initial_game_start.txt");
    pub const DO_ACTION: &str = asset!("v1/do_action.txt");
    pub const SAY_ACTION: &str = asset!("v1/say_action.txt");
    pub const DO_ACTION_HURT_OR_HEAL: &str = asset!("v1/do_action_hurt_or_heal.txt");
    pub const COMBAT_OPPONENT_DESCRIPTION: &str = asset!("v1/combat_opponent_description.txt");
    pub const COMBAT_HIT_HIT: &str = asset!("v1/combat_hit_hit.txt");
    pub const COMBAT_HIT_MISS: &str = asset!("v1/combat_hit_miss.txt");
    pub const COMBAT_MISS_HIT: &str = asset!("v1/combat_miss_hit.txt");
    pub const COMBAT_MISS_MISS: &str = asset!("v1/combat_miss_miss.txt");
}

/// Agent prompts and action prompts of the two-agent engine.
pub mod v2 {
    pub const NARRATOR_REACT: &str = asset!("v2/narrator_react.txt");
    pub const ARCHIVIST_REACT: &str = asset!("v2/archivist_react.txt");
    pub const INITIAL_GAME_START: &str = asset!("v2/initial_game_start.txt");
    pub const DO_ACTION: &str = asset!("v2/do_action.txt");
    pub const SAY_ACTION: &str = asset!("v2/say_action.txt");
}

/// Tool descriptions shown to the agents.
pub mod tools {
    pub const BATTLE: &str = asset!("tools/battle.txt");
    pub const WOUND_CHARACTER: &str = asset!("tools/wound_character.txt");
    pub const HEAL_CHARACTER: &str = asset!("tools/heal_character.txt");
    pub const UPDATE_CHARACTER: &str = asset!("tools/update_character.txt");
    pub const UPDATE_ENVIRONMENT: &str = asset!("tools/update_environment.txt");

    /// Slot in [`UPDATE_CHARACTER`] replaced by the valid type tokens.
    pub const DYNAMIC_CHARACTER_LIST: &str = "[Dynamically updated list of characters]";
}

/// Prompts for the model-backed character matcher.
pub mod utility {
    pub const FIND_CHARACTER: &str = asset!("utility/find_character.txt");
    pub const BATTLE_INSTRUCTION: &str = asset!("utility/battle_instruction.txt");
    pub const WOUND_CHARACTER_INSTRUCTION: &str = asset!("utility/wound_character_instruction.txt");
    pub const HEAL_CHARACTER_INSTRUCTION: &str = asset!("utility/heal_character_instruction.txt");
}

/// Instruction used to fold old messages into the running summary.
pub const SUMMARIZE: &str = "Summarize the following role-playing game events, preserving named characters, locations, goals, and unresolved threads:";

/// Corrective note appended when a v1 response is not valid JSON.
pub const V1_CORRECTION: &str = "Your previous reply was not valid JSON in the required structure. Reply again with only the JSON object.";

/// Every embedded asset with its path below `assets/prompts`.
pub fn all() -> Vec<(&'static str, &'static str)> {
    vec![
        ("v1/initial_game_start.txt", v1::INITIAL_GAME_START),
        ("v1/do_action.txt", v1::DO_ACTION),
        ("v1/say_action.txt", v1::SAY_ACTION),
        ("v1/do_action_hurt_or_heal.txt", v1::DO_ACTION_HURT_OR_HEAL),
        ("v1/combat_opponent_description.txt", v1::COMBAT_OPPONENT_DESCRIPTION),
        ("v1/combat_hit_hit.txt", v1::COMBAT_HIT_HIT),
        ("v1/combat_hit_miss.txt", v1::COMBAT_HIT_MISS),
        ("v1/combat_miss_hit.txt", v1::COMBAT_MISS_HIT),
        ("v1/combat_miss_miss.txt", v1::COMBAT_MISS_MISS),
        ("v2/narrator_react.txt", v2::NARRATOR_REACT),
        ("v2/archivist_react.txt", v2::ARCHIVIST_REACT),
        ("v2/initial_game_start.txt", v2::INITIAL_GAME_START),
        ("v2/do_action.txt", v2::DO_ACTION),
        ("v2/say_action.txt", v2::SAY_ACTION),
        ("tools/battle.txt", tools::BATTLE),
        ("tools/wound_character.txt", tools::WOUND_CHARACTER),
        ("tools/heal_character.txt", tools::HEAL_CHARACTER),
        ("tools/update_character.txt", tools::UPDATE_CHARACTER),
        ("tools/update_environment.txt", tools::UPDATE_ENVIRONMENT),
        ("utility/find_character.txt", utility::FIND_CHARACTER),
        ("utility/battle_instruction.txt", utility::BATTLE_INSTRUCTION),
        ("utility/wound_character_instruction.txt", utility::WOUND_CHARACTER_INSTRUCTION),
        ("utility/heal_character_instruction.txt", utility::HEAL_CHARACTER_INSTRUCTION),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::react::PromptTemplate;

    #[test]
    fn agent_prompts_expose_expected_placeholders() {
        let n = PromptTemplate::new(v2::NARRATOR_REACT);
        assert_eq!(n.placeholders(), vec!["tools", "tool_names", "summary", "action", "input", "history"]);
        let a = PromptTemplate::new(v2::ARCHIVIST_REACT);
        assert_eq!(
            a.placeholders(),
            vec!["tools", "tool_names", "summary", "input", "characters", "player_character", "environments", "history"]
        );
        assert_eq!(PromptTemplate::new(utility::FIND_CHARACTER).placeholders(), vec!["instruction"]);
    }

    #[test]
    fn static_prompts_have_no_placeholders() {
        for (path, text) in all() {
            if path.ends_with("_react.txt") || path == "utility/find_character.txt" {
                continue;
            }
            assert!(PromptTemplate::new(text).placeholders().is_empty(), "{path}");
        }
        assert!(tools::UPDATE_CHARACTER.contains(tools::DYNAMIC_CHARACTER_LIST));
    }
}
