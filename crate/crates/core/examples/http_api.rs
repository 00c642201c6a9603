//! Serves the HTTP API on a local port with a scripted model and drives it
//! with a plain HTTP client.
//!
//!     cargo run --example http_api

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster};
use gm_core::episode;
use gm_core::service::{router, AppState};
use gm_core::state::{CampaignStore, Engine, StepClock};
use serde_json::{json, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("gm-http-example-{}", std::process::id()));
    let store = CampaignStore::open(&dir)?;
    let gm = GameMaster::new(Arc::new(episode::backend(Engine::V2)?), Arc::new(StepClock::fixed()), EngineConfig::default());
    let app = router(Arc::new(AppState::new(store, gm)), None);

    let rt = tokio::runtime::Runtime::new()?;
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let base = format!("http://{}", listener.local_addr()?);
    rt.spawn(async move { axum::serve(listener, app).await });

    let client = reqwest::blocking::Client::new();
    let p = episode::new_campaign(Engine::V2);
    let created: Value = client
        .post(format!("{base}/api/campaigns?play=1"))
        .json(&json!({
            "setting": p.setting, "startScenario": p.start_scenario, "playerName": p.player_name,
            "playerDescription": p.player_description, "engine": "v2", "seed": p.rng_seed,
        }))
        .send()?
        .json()?;
    let id = created["campaignId"].as_str().ok_or("no campaign id")?.to_string();
    println!("POST /api/campaigns?play=1\n{}\n", created["narrative"]);

    for turn in episode::turns(Engine::V2).iter().skip(1).take(2) {
        let kind = format!("{:?}", turn.kind).to_lowercase();
        let reply: Value = client
            .post(format!("{base}/api/campaigns/{id}/messages"))
            .json(&json!({"actionKind": kind, "text": turn.text}))
            .send()?
            .json()?;
        println!("POST /messages {kind} {:?}\n{}\n{}\n", turn.text, reply["narrative"], reply["stateDelta"]);
    }

    let campaign: Value = client.get(format!("{base}/api/campaigns/{id}")).send()?.json()?;
    println!("GET /api/campaigns/{id}: {} environments", campaign["environments"].as_array().map_or(0, |e| e.len()));
    let missing = client.get(format!("{base}/api/campaigns/nope")).send()?;
    println!("GET unknown campaign: {} {}", missing.status(), missing.text()?);

    drop(rt);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
