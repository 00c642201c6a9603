//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster, TurnOutcome};
use gm_core::episode::{self, Task};
use gm_core::llm::ScriptedBackend;
use gm_core::state::{Campaign, CharacterType, Engine, HealthState, StepClock};

pub fn game_master(backend: Arc<ScriptedBackend>) -> GameMaster {
    GameMaster::new(backend, Arc::new(StepClock::fixed()), EngineConfig::default())
}

/// Plays the scripted episode, checking the state after each task.
/// Returns the final campaign and the per-task failures.
pub fn play_episode(engine: Engine) -> (Campaign, Vec<TurnOutcome>, Vec<String>) {
    let backend = Arc::new(episode::backend(engine).expect("golden script parses"));
    let gm = game_master(backend.clone());
    let mut campaign = gm.create_campaign(episode::new_campaign(engine)).unwrap();
    let turns = episode::turns(engine);
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (i, t) in turns.iter().enumerate() {
        match gm.turn(&mut campaign, t.kind, t.text) {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                failures.push(format!("{:?} turn failed: {e}", t.task));
                break;
            }
        }
        let last_of_task = turns.get(i + 1).is_none_or(|n| n.task != t.task);
        if last_of_task {
            if let Err(e) = check_task(engine, t.task, &campaign) {
                failures.push(format!("{:?}: {e}", t.task));
            }
        }
    }
    if backend.remaining() != 0 {
        failures.push(format!("{} script entries unused", backend.remaining()));
    }
    (campaign, outcomes, failures)
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

/// The world the scripts narrate, written down independently of the engines.
pub fn check_task(engine: Engine, task: Task, c: &Campaign) -> Result<(), String> {
    let v1 = engine == Engine::V1;
    let location = c.player_location().map(|e| e.name.as_str());
    let hp = c.player().current_hp;
    let wolf = || c.character_by_name("Grey Wolf").ok_or("no Grey Wolf".to_string());
    match task {
        Task::Opening => {
            expect("location", location, Some("Thornwood Village"))?;
            expect("player hp", hp, 40)
        }
        Task::Explore => {
            expect("location", location, Some("Old Mill"))?;
            expect("environments", c.environments.len(), 2)
        }
        Task::ObjectInteraction => {
            expect("player hp", hp, if v1 { 32 } else { 36 })?;
            let mill = c.environment_by_name("Old Mill").ok_or("no Old Mill")?;
            expect("chest open", mill.description.contains("stands open"), !v1)
        }
        Task::Conversation => {
            let miller = c.character_by_name("Miller Tomas").ok_or("no Miller Tomas")?;
            expect("miller type", miller.char_type, CharacterType::Humanoid)?;
            let w = wolf()?;
            expect("wolf type", w.char_type, CharacterType::SmallMonster)?;
            expect("wolf hp", (w.current_hp, w.max_hp), (20, 20))
        }
        Task::Combat => {
            let w = wolf()?;
            if v1 {
                expect("wolf hp", w.current_hp, 12)?;
                expect("wolf state", w.health_state, HealthState::LightlyWounded)?;
                expect("player hp", hp, 24)?;
                expect("opponent marker", c.current_opponent_id, Some(w.id))
            } else {
                expect("wolf hp", w.current_hp, 8)?;
                expect("wolf state", w.health_state, HealthState::HeavilyWounded)?;
                expect("player hp", hp, 28)?;
                expect("player state", c.player().health_state, HealthState::LightlyWounded)
            }
        }
        Task::EnemyDefeat => {
            let w = wolf()?;
            expect("wolf hp", w.current_hp, 0)?;
            expect("wolf state", w.health_state, HealthState::Dead)?;
            expect("player hp", hp, if v1 { 24 } else { 28 })?;
            if v1 {
                expect("opponent marker", c.current_opponent_id, None)?;
            }
            Ok(())
        }
        Task::Heal => {
            expect("player hp", hp, if v1 { 32 } else { 36 })?;
            expect("player state", c.player().health_state, HealthState::Healthy)?;
            expect("wolf state", wolf()?.health_state, HealthState::Dead)
        }
    }
}
