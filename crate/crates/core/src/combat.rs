//! Hit chances, damage severities and heal magnitudes, resolved with a
//! seeded random stream shared by both engines and the Narrator's tools.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::state::ParseTokenError;

/// Hit-chance penalty for every hit already landed in the same trajectory.
pub const HIT_PENALTY_PER_PRIOR_HIT: f64 = 0.15;
/// Lowest probability a non-impossible attack can fall to.
pub const HIT_PROBABILITY_FLOOR: f64 = 0.05;

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal { $($variant:ident => $token:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Lower-case token as written in tool descriptions.
            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ParseTokenError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let key = s.trim().trim_matches(|c| c == '<' || c == '>').to_ascii_lowercase();
                match key.as_str() {
                    $($token => Ok($name::$variant),)+
                    _ => Err(ParseTokenError::new($kind, s)),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }

        // accepted case-insensitively on input
        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(|_| {
                    serde::de::Error::custom(format!(
                        "invalid {} {:?}, expected one of {{{}}}",
                        $kind,
                        s,
                        [$($token),+].join(", ")
                    ))
                })
            }
        }
    };
}

token_enum!(
    /// Categorical chance that an attack lands.
    HitChance, "hit chance" {
        High => "high",
        Medium => "medium",
        Low => "low",
        Impossible => "impossible",
    }
);

token_enum!(
    /// How hard a landed attack or injury hurts.
    DamageSeverity, "damage severity" {
        Harmless => "harmless",
        Low => "low",
        Medium => "medium",
        High => "high",
        Extraordinary => "extraordinary",
    }
);

token_enum!(
    /// How much health a healing action restores.
    HealMagnitude, "heal magnitude" {
        Low => "low",
        Medium => "medium",
        High => "high",
        Extraordinary => "extraordinary",
    }
);

impl HitChance {
    pub fn base_probability(self) -> f64 {
        match self {
            HitChance::High => 0.90,
            HitChance::Medium => 0.65,
            HitChance::Low => 0.30,
            HitChance::Impossible => 0.0,
        }
    }
}

/// Probability that an attack lands given hits already landed this trajectory.
pub fn hit_probability(chance: HitChance, prior_hits: u32) -> f64 {
    if chance == HitChance::Impossible {
        return 0.0;
    }
    let p = chance.base_probability() - HIT_PENALTY_PER_PRIOR_HIT * prior_hits as f64;
    p.max(HIT_PROBABILITY_FLOOR)
}

/// Rolls one attack. Impossible attacks never consume a draw.
pub fn roll_hit(rng: &mut GameRng, chance: HitChance, prior_hits: u32) -> bool {
    if chance == HitChance::Impossible {
        return false;
    }
    rng.chance(hit_probability(chance, prior_hits))
}

pub fn severity_damage(severity: DamageSeverity) -> i64 {
    match severity {
        DamageSeverity::Harmless => 0,
        DamageSeverity::Low => 4,
        DamageSeverity::Medium => 8,
        DamageSeverity::High => 12,
        DamageSeverity::Extraordinary => 20,
    }
}

/// Healing for a magnitude. Extraordinary restores a character to full, so it
/// returns `max_hp` and relies on the clamp in `apply_hp_delta`.
pub fn magnitude_healing(magnitude: HealMagnitude, max_hp: i64) -> i64 {
    match magnitude {
        HealMagnitude::Low => 4,
        HealMagnitude::Medium => 8,
        HealMagnitude::High => 12,
        HealMagnitude::Extraordinary => max_hp.max(1),
    }
}

/// Deterministic random stream.
///
/// Each campaign turn gets its own ChaCha stream selected by the turn index,
/// so a turn's outcomes depend only on `(seed, turn)` and not on how many
/// draws earlier turns made. Tests can force the unit draws directly.
#[derive(Debug, Clone)]
pub struct GameRng {
    forced: VecDeque<f64>,
    stream: ChaCha8Rng,
}

impl GameRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            forced: VecDeque::new(),
            stream: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_turn(seed: u64, turn: u64) -> Self {
        let mut stream = ChaCha8Rng::seed_from_u64(seed);
        stream.set_stream(turn);
        Self {
            forced: VecDeque::new(),
            stream,
        }
    }

    /// Replays the given unit draws first, then falls back to seed 0.
    pub fn forced(draws: impl IntoIterator<Item = f64>) -> Self {
        Self {
            forced: draws.into_iter().collect(),
            stream: ChaCha8Rng::seed_from_u64(0),
        }
    }

    /// Forces a sequence of hit/miss outcomes for any non-impossible roll.
    pub fn forced_hits(outcomes: &[bool]) -> Self {
        Self::forced(outcomes.iter().map(|&hit| if hit { 0.0 } else { 0.999_999 }))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        match self.forced.pop_front() {
            Some(v) => v,
            None => self.stream.random::<f64>(),
        }
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }
}
