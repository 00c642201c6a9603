//! The Narrator resolves a sword swing with the Battle tool, then narrates
//! the result. Responses are scripted; the dice come from the campaign seed.
//!
//!     cargo run --example narrator_battle

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster, TurnTrace};
use gm_core::episode::{NARRATOR_FIGURE_INPUT, NARRATOR_FIGURE_SCRIPT, NARRATOR_FIGURE_SEED};
use gm_core::llm::ScriptedBackend;
use gm_core::state::{ActionKind, Engine, NewCampaign, StepClock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend = Arc::new(ScriptedBackend::from_json(NARRATOR_FIGURE_SCRIPT)?);
    let gm = GameMaster::new(backend, Arc::new(StepClock::fixed()), EngineConfig::default());
    let mut campaign = gm.create_campaign(NewCampaign {
        id: None,
        setting: "Fantasy".into(),
        start_scenario: "A castle gate at dawn.".into(),
        player_name: "Ivan".into(),
        player_description: "A wielder of earth, wind, and fire.".into(),
        engine: Engine::V2,
        rng_seed: NARRATOR_FIGURE_SEED,
    })?;

    let outcome = gm.turn(&mut campaign, ActionKind::Do, NARRATOR_FIGURE_INPUT)?;
    if let TurnTrace::V2(record) = &outcome.trace {
        for step in &record.narrator.steps {
            println!("Action: {}", step.action.as_deref().unwrap_or("-"));
            println!("Observation: {}\n", step.observation.as_deref().unwrap_or(""));
        }
    }
    println!("Narrative: {}\n", outcome.narrative);
    for c in &campaign.characters {
        println!("{:<14} {:>3}/{:<3} {}", c.name, c.current_hp, c.max_hp, c.health_state);
    }
    Ok(())
}
