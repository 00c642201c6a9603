//! After the Narrator answers, the Archivist records a new location and moves
//! the player into it.
//!
//!     cargo run --example archivist_update

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster, TurnTrace};
use gm_core::episode::{ARCHIVIST_FIGURE_INPUT, ARCHIVIST_FIGURE_SCRIPT};
use gm_core::llm::ScriptedBackend;
use gm_core::state::{ActionKind, Engine, NewCampaign, StepClock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend = Arc::new(ScriptedBackend::from_json(ARCHIVIST_FIGURE_SCRIPT)?);
    let gm = GameMaster::new(backend, Arc::new(StepClock::fixed()), EngineConfig::default());
    let mut campaign = gm.create_campaign(NewCampaign {
        id: None,
        setting: "Fantasy".into(),
        start_scenario: "An enemy encampment at night.".into(),
        player_name: "Ivan".into(),
        player_description: String::new(),
        engine: Engine::V2,
        rng_seed: 1,
    })?;

    let outcome = gm.turn(&mut campaign, ActionKind::Do, ARCHIVIST_FIGURE_INPUT)?;
    println!("Narrative: {}\n", outcome.narrative);
    if let TurnTrace::V2(record) = &outcome.trace {
        if let Some(archivist) = &record.archivist {
            for step in &archivist.steps {
                println!("Archivist called {}", step.action.as_deref().unwrap_or("-"));
                println!("  input: {}", step.action_input.as_deref().unwrap_or("").replace('\n', " "));
                println!("  observation: {}", step.observation.as_deref().unwrap_or(""));
            }
            println!("Archivist: {}\n", archivist.final_answer.as_deref().unwrap_or(""));
        }
    }
    println!("State change: {}", serde_json::to_string_pretty(&outcome.state_delta)?);
    Ok(())
}
