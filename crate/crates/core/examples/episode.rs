//! Plays the scripted six-task episode on either engine and prints the world
//! after every turn.
//!
//!     cargo run --example episode -- v1
//!     cargo run --example episode -- v2

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster};
use gm_core::episode;
use gm_core::state::{Engine, StepClock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let engine: Engine = std::env::args().nth(1).as_deref().unwrap_or("v2").parse()?;
    let backend = Arc::new(episode::backend(engine)?);
    let gm = GameMaster::new(backend, Arc::new(StepClock::fixed()), EngineConfig::default());
    let mut campaign = gm.create_campaign(episode::new_campaign(engine))?;

    for turn in episode::turns(engine) {
        let outcome = gm.turn(&mut campaign, turn.kind, turn.text)?;
        println!("== {:?}: {:?} {}", turn.task, turn.kind, turn.text);
        println!("{}", outcome.narrative);
        for change in &outcome.state_delta.hp_changes {
            println!("  {} {} -> {} ({})", change.name, change.from, change.to, change.health_state);
        }
        for name in &outcome.state_delta.created_characters {
            println!("  new character {name}");
        }
        if let Some(place) = &outcome.state_delta.player_location {
            println!("  player now at {place}");
        }
        println!();
    }
    let p = campaign.player();
    println!("{} ends at {}/{} HP ({})", p.name, p.current_hp, p.max_hp, p.health_state);
    Ok(())
}
