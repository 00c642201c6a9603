//! Health banding: maps hit points onto the five named health states and back.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::ParseTokenError;

/// Creature category of a character. Determines maximum health.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharacterType {
    Humanoid,
    SmallMonster,
    MediumMonster,
    LargeMonster,
    Boss,
}

impl CharacterType {
    pub const ALL: [CharacterType; 5] = [
        CharacterType::Humanoid,
        CharacterType::SmallMonster,
        CharacterType::MediumMonster,
        CharacterType::LargeMonster,
        CharacterType::Boss,
    ];

    pub fn max_hp(self) -> i64 {
        match self {
            CharacterType::Humanoid => 40,
            CharacterType::SmallMonster => 20,
            CharacterType::MediumMonster => 40,
            CharacterType::LargeMonster => 60,
            CharacterType::Boss => 100,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CharacterType::Humanoid => "Humanoid",
            CharacterType::SmallMonster => "SmallMonster",
            CharacterType::MediumMonster => "MediumMonster",
            CharacterType::LargeMonster => "LargeMonster",
            CharacterType::Boss => "Boss",
        }
    }

    /// Maps the four creature labels used by the static engine's prompts onto
    /// the canonical five-tier enum. Canonical tokens are accepted as well.
    pub fn from_v1_label(label: &str) -> Option<CharacterType> {
        match normalize_token(label).as_str() {
            "smallcreature" => Some(CharacterType::SmallMonster),
            "largecreature" => Some(CharacterType::LargeMonster),
            "monster" => Some(CharacterType::Boss),
            _ => label.parse().ok(),
        }
    }
}

impl fmt::Display for CharacterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CharacterType {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize_token(s);
        CharacterType::ALL
            .into_iter()
            .find(|t| t.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| ParseTokenError::new("character type", s))
    }
}

/// Named health state. Variants are ordered from least to most healthy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HealthState {
    Dead,
    Unconscious,
    HeavilyWounded,
    LightlyWounded,
    Healthy,
}

impl HealthState {
    pub const ALL: [HealthState; 5] = [
        HealthState::Dead,
        HealthState::Unconscious,
        HealthState::HeavilyWounded,
        HealthState::LightlyWounded,
        HealthState::Healthy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HealthState::Dead => "Dead",
            HealthState::Unconscious => "Unconscious",
            HealthState::HeavilyWounded => "HeavilyWounded",
            HealthState::LightlyWounded => "LightlyWounded",
            HealthState::Healthy => "Healthy",
        }
    }

    /// Derives the state from the hit-point fraction.
    ///
    /// Healthy above 3/4, LightlyWounded above 2/5, HeavilyWounded above zero.
    /// At zero a player is Unconscious and anyone else is Dead. Integer
    /// comparisons keep the band edges exact.
    pub fn from_hp(current_hp: i64, max_hp: i64, is_player: bool) -> HealthState {
        debug_assert!(max_hp > 0);
        if current_hp <= 0 {
            if is_player {
                HealthState::Unconscious
            } else {
                HealthState::Dead
            }
        } else if 4 * current_hp > 3 * max_hp {
            HealthState::Healthy
        } else if 5 * current_hp > 2 * max_hp {
            HealthState::LightlyWounded
        } else {
            HealthState::HeavilyWounded
        }
    }

    /// Hit points a character is snapped to when its state is set directly.
    pub fn band_midpoint(self, max_hp: i64) -> i64 {
        let (num, den) = match self {
            HealthState::Healthy => (7, 8),
            HealthState::LightlyWounded => (23, 40),
            HealthState::HeavilyWounded => (1, 5),
            HealthState::Unconscious | HealthState::Dead => return 0,
        };
        // round half up
        (2 * num * max_hp + den) / (2 * den)
    }
}

impl fmt::Display for HealthState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HealthState {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize_token(s);
        HealthState::ALL
            .into_iter()
            .find(|t| t.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| ParseTokenError::new("health state", s))
    }
}

fn normalize_token(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .collect::<String>()
        .to_ascii_lowercase()
}
