//! The ReAct engine keeps recent events verbatim and folds older ones into a
//! summary, so the prompt stops growing while the static pipeline's keeps
//! climbing.
//!
//!     cargo run --example rolling_memory

use std::sync::Arc;

use gm_core::engine::{EngineConfig, GameMaster, TurnTrace};
use gm_core::llm::{ScriptEntry, ScriptedBackend};
use gm_core::prompts::SUMMARIZE;
use gm_core::state::{ActionKind, Engine, NewCampaign, StepClock};

const TURNS: usize = 16;

fn story(turn: usize) -> String {
    format!("Turn {turn}. {}", "Rain drums on the tavern roof while strangers trade rumours of the north. ".repeat(8))
}

fn new_campaign(engine: Engine) -> NewCampaign {
    NewCampaign {
        id: None,
        setting: "Fantasy".into(),
        start_scenario: "A tavern on a stormy night.".into(),
        player_name: "Mara".into(),
        player_description: "A travelling bard.".into(),
        engine,
        rng_seed: 9,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut v1_script = Vec::new();
    let mut v2_script = Vec::new();
    for t in 0..TURNS {
        v1_script.push(serde_json::json!({"narrative": story(t), "characters": [], "environment": {}, "opponent": ""}).to_string());
        v2_script.push(ScriptEntry::new(format!("Thought: Do I need to use a tool? No.\nFinal Answer: {} [END]", story(t))));
        v2_script.push(ScriptEntry::new("Thought: Do I need to use a tool? No.\nFinal Answer: Nothing to record. [END]"));
        v2_script.push(ScriptEntry::matching(SUMMARIZE, format!("Summary {t}: Mara plays on while the storm rages and rumours of the north spread.")));
    }
    let v1 = GameMaster::new(Arc::new(ScriptedBackend::from_responses(v1_script)), Arc::new(StepClock::fixed()), EngineConfig::default());
    let v2 = GameMaster::new(Arc::new(ScriptedBackend::new(v2_script)), Arc::new(StepClock::fixed()), EngineConfig::default());
    let mut c1 = v1.create_campaign(new_campaign(Engine::V1))?;
    let mut c2 = v2.create_campaign(new_campaign(Engine::V2))?;

    println!("turn  v1 request chars  v2 memory chars");
    for t in 0..TURNS {
        let (kind, text) = match t {
            0 => (ActionKind::GameStart, String::new()),
            _ => (ActionKind::Say, format!("I sing verse {t}.")),
        };
        let o1 = v1.turn(&mut c1, kind, &text)?;
        let o2 = v2.turn(&mut c2, kind, &text)?;
        let (TurnTrace::V1(a), TurnTrace::V2(b)) = (&o1.trace, &o2.trace) else { unreachable!() };
        let note = if b.summary_refreshed { "  summary refreshed" } else { "" };
        println!("{t:>4}  {:>16}  {:>15}{note}", a.narrative_request_chars(), b.memory_chars);
    }
    println!("\nSummary now: {}", c2.summary);
    Ok(())
}
