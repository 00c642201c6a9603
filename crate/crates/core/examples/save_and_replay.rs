//! Saves a campaign to disk, loads it back and replays its turns against the
//! same script to confirm the transcript is reproduced exactly.
//!
//!     cargo run --example save_and_replay

use std::sync::Arc;

use gm_core::cli::replay;
use gm_core::engine::{EngineConfig, GameMaster};
use gm_core::episode;
use gm_core::state::{CampaignStore, Engine, StepClock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("gm-example-{}", std::process::id()));
    let store = CampaignStore::open(&dir)?;

    let gm = GameMaster::new(Arc::new(episode::backend(Engine::V1)?), Arc::new(StepClock::fixed()), EngineConfig::default());
    let mut campaign = gm.create_campaign(episode::new_campaign(Engine::V1))?;
    for turn in episode::turns(Engine::V1) {
        gm.turn(&mut campaign, turn.kind, turn.text)?;
    }
    store.create(&campaign)?;
    println!("saved {} to {}", campaign.id, store.path_of(&campaign.id)?.display());

    let loaded = store.load(&campaign.id)?;
    println!("loaded {} messages, {} characters", loaded.messages.len(), loaded.characters.len());

    let (_, report) = replay(&loaded, Arc::new(episode::backend(Engine::V1)?), EngineConfig::default())?;
    println!("recorded transcript {}", report.recorded_hash);
    println!("replayed transcript {}", report.replayed_hash);
    println!("{} turns, {}", report.turns, if report.matches() { "identical" } else { "diverged" });

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
