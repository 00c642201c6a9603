//! Plays an opening turn and one action against a real chat-completions
//! endpoint. Reads GM_API_KEY, GM_API_BASE and GM_MODEL.
//!
//!     GM_API_KEY=... cargo run --example live_model -- v2 "I look for the innkeeper."

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster};
use gm_core::llm::{GenerationSettings, HttpBackend};
use gm_core::state::{pregenerated_story, ActionKind, Engine, NewCampaign, SystemClock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let engine: Engine = args.next().as_deref().unwrap_or("v2").parse()?;
    let action = args.next().unwrap_or_else(|| "I look around.".into());

    let backend = match HttpBackend::from_env() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{e}");
            return Ok(());
        }
    };
    let config = EngineConfig {
        generation: GenerationSettings::play(backend.config().model.clone()),
        ..EngineConfig::default()
    };
    let gm = GameMaster::new(Arc::new(backend), Arc::new(SystemClock), config);
    let seed = rand::random();
    let mut campaign = gm.create_campaign(NewCampaign {
        id: None,
        setting: "Fantasy".into(),
        start_scenario: pregenerated_story("Fantasy", seed).into(),
        player_name: "Ivan".into(),
        player_description: "A wandering sellsword.".into(),
        engine,
        rng_seed: seed,
    })?;

    gm.turn_with(&mut campaign, ActionKind::GameStart, "", &mut |n| println!("{n}\n"))?;
    gm.turn_with(&mut campaign, ActionKind::Do, &action, &mut |n| println!("> {action}\n\n{n}\n"))?;
    for c in &campaign.characters {
        println!("{} {}/{} {}", c.name, c.current_hp, c.max_hp, c.health_state);
    }
    Ok(())
}
