mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use gm_core::engine::CampaignTrace;
use gm_core::state::{CampaignStore, Engine, MessageRole};

const GM: &str = env!("CARGO_BIN_EXE_gm");

fn gm(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(GM)
        .args(args)
        .env_remove("GM_API_KEY")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn golden(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden").join(name).display().to_string()
}

/// Saves the played episode and its trace, returning the campaign id.
fn saved_episode(dir: &Path, engine: Engine) -> String {
    let (campaign, outcomes, failures) = common::play_episode(engine);
    assert!(failures.is_empty(), "{failures:?}");
    let store = CampaignStore::open(dir).unwrap();
    store.create(&campaign).unwrap();
    let trace = CampaignTrace {
        turns: outcomes.into_iter().map(|o| o.trace).collect(),
    };
    store.save_trace(&campaign.id, &trace).unwrap();
    campaign.id.to_string()
}

#[test]
fn bad_flags_exit_with_usage() {
    let out = gm(&["play", "--engine", "v3"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("invalid value 'v3'"));
    let out = gm(&["serve", "--backend", "script"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--script"));
    let out = gm(&["replay"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("Usage"));
}

#[test]
fn replay_is_deterministic_and_detects_divergence() {
    for engine in [Engine::V1, Engine::V2] {
        let dir = tempfile::tempdir().unwrap();
        let id = saved_episode(dir.path(), engine);
        let script = golden(if engine == Engine::V1 { "v1_episode.json" } else { "v2_episode.json" });
        let data = dir.path().to_str().unwrap();
        let args = ["replay", "--campaign", &id, "--script", &script, "--data-dir", data];
        let first = gm(&args, "");
        let second = gm(&args, "");
        assert!(first.status.success(), "{}", text(&first.stderr));
        assert!(second.status.success());
        assert_eq!(text(&first.stdout), text(&second.stdout));
        assert!(text(&first.stdout).contains("transcript "));

        let store = CampaignStore::open(dir.path()).unwrap();
        let mut c = store.load(&gm_core::state::CampaignId(id.clone())).unwrap();
        let last = c.messages.iter_mut().rev().find(|m| m.role == MessageRole::GameMaster).unwrap();
        last.text.push_str(" Then the sky fell.");
        store.save(&c).unwrap();
        let diverged = gm(&args, "");
        assert_eq!(diverged.status.code(), Some(1));
        assert!(text(&diverged.stderr).contains("diverged"));
    }
}

#[test]
fn export_trace_prints_turn_records() {
    let dir = tempfile::tempdir().unwrap();
    let id = saved_episode(dir.path(), Engine::V2);
    let out = gm(&["export-trace", "--campaign", &id, "--data-dir", dir.path().to_str().unwrap()], "");
    assert!(out.status.success(), "{}", text(&out.stderr));
    let trace: CampaignTrace = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(trace.turns.len(), 7);
    let missing = gm(&["export-trace", "--campaign", "nope", "--data-dir", dir.path().to_str().unwrap()], "");
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn play_rejects_unknown_prefix_without_spending_a_turn() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("script.json");
    std::fs::write(
        &script,
        serde_json::json!([
            {"response": r#"{"narrative": "You wake in a cellar.", "characters": [], "environment": {}, "opponent": ""}"#},
            {"response": r#"{"narrative": "Your voice echoes.", "characters": [], "environment": {}, "opponent": ""}"#},
        ])
        .to_string(),
    )
    .unwrap();
    let data = dir.path().join("data");
    let out = gm(
        &[
            "play", "--engine", "v1", "--seed", "7", "--name", "Ivan", "--backend", "script",
            "--script", script.to_str().unwrap(), "--data-dir", data.to_str().unwrap(),
        ],
        "/dance wildly\n/say hello\n/quit\n",
    );
    let stdout = text(&out.stdout);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(stdout.contains("You wake in a cellar."));
    assert!(stdout.contains("unknown command /dance"));
    assert!(stdout.contains("/attack <target>"));
    assert!(stdout.contains("Your voice echoes."));

    let store = CampaignStore::open(&data).unwrap();
    let ids = store.list().unwrap();
    let c = store.load(&ids[0]).unwrap();
    assert_eq!(c.rng_seed, 7);
    assert_eq!(c.messages.len(), 4);
    assert_eq!(c.turn_count, 2);
}
