//! Building blocks of the `gm` binary: the terminal play loop and replay.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::engine::{transcript_hash, CampaignTrace, EngineConfig, GameMaster, TurnError};
use crate::llm::LlmBackend;
use crate::state::{ActionKind, Campaign, CampaignStore, MessageRole, NewCampaign, StepClock, StoreError};

pub const HELP: &str = "\
Commands:
  /do <action>      do something (plain text without a prefix does the same)
  /say <words>      say something
  /attack <target>  attack someone
  /help             show this help
  /quit             leave the game";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Turn(ActionKind, String),
    Help,
    Quit,
    /// Not a command; carries the reason.
    Invalid(String),
}

pub fn parse_command(line: &str) -> Command {
    let line = line.trim();
    if line.is_empty() {
        return Command::Invalid("empty input".into());
    }
    let Some(rest) = line.strip_prefix('/') else {
        return Command::Turn(ActionKind::Do, line.to_string());
    };
    let (word, text) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let text = text.trim().to_string();
    let kind = match word.to_ascii_lowercase().as_str() {
        "help" => return Command::Help,
        "quit" | "exit" => return Command::Quit,
        "do" => ActionKind::Do,
        "say" => ActionKind::Say,
        "attack" => ActionKind::Attack,
        other => return Command::Invalid(format!("unknown command /{other}")),
    };
    if text.is_empty() {
        return Command::Invalid(format!("/{word} needs some text"));
    }
    Command::Turn(kind, text)
}

/// Runs the terminal loop: the opening turn if the campaign is new, then one
/// turn per line until `/quit` or end of input. The campaign is saved after
/// every turn.
pub fn play_loop(
    gm: &GameMaster,
    campaign: &mut Campaign,
    store: Option<&CampaignStore>,
    input: impl BufRead,
    out: &mut impl Write,
) -> std::io::Result<()> {
    let mut trace: CampaignTrace = match store {
        Some(s) => s.load_trace(&campaign.id).unwrap_or_default(),
        None => CampaignTrace::default(),
    };
    let mut play = |campaign: &mut Campaign, kind: ActionKind, text: &str, out: &mut dyn Write| -> std::io::Result<()> {
        let mut shown = false;
        let result = gm.turn_with(campaign, kind, text, &mut |narrative| {
            shown = writeln!(out, "\n{narrative}\n").is_ok();
        });
        match result {
            Ok(outcome) => {
                if !shown {
                    writeln!(out, "\n{}\n", outcome.narrative)?;
                }
                let p = campaign.player();
                writeln!(out, "[{} {}/{} {}]", p.name, p.current_hp, p.max_hp, p.health_state)?;
                trace.turns.push(outcome.trace);
            }
            Err(e) => writeln!(out, "The turn failed: {e}")?,
        }
        if let Some(s) = store {
            if let Err(e) = s.save(campaign).and_then(|_| s.save_trace(&campaign.id, &trace)) {
                writeln!(out, "Could not save the campaign: {e}")?;
            }
        }
        Ok(())
    };
    if campaign.messages.is_empty() {
        play(campaign, ActionKind::GameStart, "", out)?;
    }
    writeln!(out, "{HELP}")?;
    for line in input.lines() {
        match parse_command(&line?) {
            Command::Quit => break,
            Command::Help => writeln!(out, "{HELP}")?,
            Command::Invalid(reason) => writeln!(out, "{reason}\n{HELP}")?,
            Command::Turn(kind, text) => play(campaign, kind, &text, out)?,
        }
    }
    Ok(())
}

/// The turns that produced a campaign's log, in order. Failed turns leave no
/// player message and are not replayed.
pub fn recorded_turns(campaign: &Campaign) -> Vec<(ActionKind, String)> {
    campaign
        .messages
        .iter()
        .filter_map(|m| match (m.role, m.action_kind) {
            (MessageRole::System, ActionKind::GameStart) => Some((ActionKind::GameStart, String::new())),
            (MessageRole::Player, kind) => Some((kind, m.text.clone())),
            _ => None,
        })
        .collect()
}

/// The parameters a campaign was created with.
pub fn origin(campaign: &Campaign) -> NewCampaign {
    NewCampaign {
        id: Some(campaign.id.clone()),
        setting: campaign.setting.clone(),
        start_scenario: campaign.start_scenario.clone(),
        player_name: campaign.player_origin.name.clone(),
        player_description: campaign.player_origin.description.clone(),
        engine: campaign.engine,
        rng_seed: campaign.rng_seed,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("replayed turn {turn} failed: {source}")]
    Turn { turn: usize, source: TurnError },
    #[error(transparent)]
    State(#[from] crate::state::StateError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub recorded_hash: String,
    pub replayed_hash: String,
    pub turns: usize,
}

impl ReplayReport {
    pub fn matches(&self) -> bool {
        self.recorded_hash == self.replayed_hash
    }
}

/// Replays a stored campaign's turns from scratch against `backend` and
/// compares the resulting transcript with the stored one.
pub fn replay(stored: &Campaign, backend: Arc<dyn LlmBackend>, config: EngineConfig) -> Result<(Campaign, ReplayReport), ReplayError> {
    let gm = GameMaster::new(backend, Arc::new(StepClock::fixed()), config);
    let mut campaign = gm.create_campaign(origin(stored))?;
    let turns = recorded_turns(stored);
    for (i, (kind, text)) in turns.iter().enumerate() {
        gm.turn(&mut campaign, *kind, text)
            .map_err(|source| ReplayError::Turn { turn: i, source })?;
    }
    let report = ReplayReport {
        recorded_hash: transcript_hash(stored),
        replayed_hash: transcript_hash(&campaign),
        turns: turns.len(),
    };
    Ok((campaign, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands() {
        assert_eq!(parse_command("/say hi there"), Command::Turn(ActionKind::Say, "hi there".into()));
        assert_eq!(parse_command("  /ATTACK the orc "), Command::Turn(ActionKind::Attack, "the orc".into()));
        assert_eq!(parse_command("look around"), Command::Turn(ActionKind::Do, "look around".into()));
        assert_eq!(parse_command("/quit"), Command::Quit);
        assert_eq!(parse_command("/help"), Command::Help);
        assert!(matches!(parse_command("/dance wildly"), Command::Invalid(r) if r.contains("/dance")));
        assert!(matches!(parse_command("/do"), Command::Invalid(_)));
        assert!(matches!(parse_command("   "), Command::Invalid(_)));
    }
}
