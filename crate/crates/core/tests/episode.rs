mod common;

use gm_core::state::Engine;

#[test]
fn six_tasks_on_the_static_engine() {
    let (c, _, failures) = common::play_episode(Engine::V1);
    assert!(failures.is_empty(), "{failures:#?}");
    c.check_invariants().unwrap();
}

#[test]
fn six_tasks_on_the_two_agent_engine() {
    let (c, outcomes, failures) = common::play_episode(Engine::V2);
    assert!(failures.is_empty(), "{failures:#?}");
    c.check_invariants().unwrap();
    assert_eq!(outcomes.len(), 7);
}

