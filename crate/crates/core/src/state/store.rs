//! One JSON document per campaign under a data directory.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use super::{Campaign, CampaignId, StateError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("campaign {0} not found")]
    NotFound(CampaignId),
    #[error("campaign {0} already exists")]
    Duplicate(CampaignId),
    #[error("invalid campaign id {0:?}")]
    InvalidId(String),
    #[error("{path}: corrupt campaign file at line {line}, column {column}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: unsupported schemaVersion {found}")]
    SchemaVersion { path: PathBuf, found: u64 },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: StateError },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DocumentRef<'a> {
    schema_version: u32,
    #[serde(flatten)]
    campaign: &'a Campaign,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Document {
    schema_version: u64,
    #[serde(flatten)]
    campaign: Campaign,
}

/// Serializes a campaign into its versioned save document.
pub fn to_document(campaign: &Campaign) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&DocumentRef {
        schema_version: SCHEMA_VERSION,
        campaign,
    })
}

#[derive(Debug, Clone)]
pub struct CampaignStore {
    dir: PathBuf,
}

impl CampaignStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn checked(&self, id: &CampaignId, suffix: &str) -> Result<PathBuf, StoreError> {
        let ok = !id.0.is_empty()
            && id
                .0
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !ok {
            return Err(StoreError::InvalidId(id.0.clone()));
        }
        Ok(self.dir.join(format!("{}{}", id.0, suffix)))
    }

    pub fn path_of(&self, id: &CampaignId) -> Result<PathBuf, StoreError> {
        self.checked(id, ".json")
    }

    pub fn exists(&self, id: &CampaignId) -> bool {
        self.path_of(id).map(|p| p.exists()).unwrap_or(false)
    }

    /// Saves a campaign that must not exist yet.
    pub fn create(&self, campaign: &Campaign) -> Result<(), StoreError> {
        if self.exists(&campaign.id) {
            return Err(StoreError::Duplicate(campaign.id.clone()));
        }
        self.save(campaign)
    }

    /// Writes the campaign atomically (temp file then rename).
    pub fn save(&self, campaign: &Campaign) -> Result<(), StoreError> {
        let path = self.path_of(&campaign.id)?;
        let body = to_document(campaign).expect("campaign serializes");
        write_atomic(&path, body.as_bytes())
    }

    pub fn load(&self, id: &CampaignId) -> Result<Campaign, StoreError> {
        let path = self.path_of(id)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.clone()))
            }
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        parse_document(&path, &text)
    }

    pub fn delete(&self, id: &CampaignId) -> Result<(), StoreError> {
        let path = self.path_of(id)?;
        match fs::remove_file(&path) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.clone()))
            }
            Err(source) => return Err(StoreError::Io { path, source }),
        }
        let _ = fs::remove_file(self.checked(id, ".trace.json")?);
        Ok(())
    }

    /// Ids of all stored campaigns, sorted.
    pub fn list(&self) -> Result<Vec<CampaignId>, StoreError> {
        let entries = fs::read_dir(&self.dir).map_err(|source| StoreError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let mut ids: Vec<CampaignId> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| !n.ends_with(".trace.json"))
            .filter_map(|n| n.strip_suffix(".json").map(|s| CampaignId(s.to_string())))
            .collect();
        ids.sort();
        Ok(ids)
    }

    pub fn save_trace<T: Serialize>(&self, id: &CampaignId, trace: &T) -> Result<(), StoreError> {
        let path = self.checked(id, ".trace.json")?;
        let body = serde_json::to_string_pretty(trace).expect("trace serializes");
        write_atomic(&path, body.as_bytes())
    }

    /// Loads the turn trace; a campaign without one yields `T::default()`.
    pub fn load_trace<T: DeserializeOwned + Default>(&self, id: &CampaignId) -> Result<T, StoreError> {
        let path = self.checked(id, ".trace.json")?;
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
                path,
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(T::default()),
            Err(source) => Err(StoreError::Io { path, source }),
        }
    }
}

/// Parses and validates a save document.
pub fn parse_document(path: &Path, text: &str) -> Result<Campaign, StoreError> {
    let corrupt = |e: serde_json::Error| StoreError::Corrupt {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(corrupt)?;
    let found = value.get("schemaVersion").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != SCHEMA_VERSION as u64 {
        return Err(StoreError::SchemaVersion {
            path: path.to_path_buf(),
            found,
        });
    }
    let doc: Document = serde_json::from_value(value).map_err(corrupt)?;
    debug_assert_eq!(doc.schema_version, SCHEMA_VERSION as u64);
    doc.campaign
        .check_invariants()
        .map_err(|source| StoreError::Invalid {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(doc.campaign)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{
        ActionKind, CharacterType, CharacterUpsert, Engine, HealthState, MessageRole, NewCampaign,
        StepClock,
    };

    fn sample() -> Campaign {
        let clock = StepClock::fixed();
        let mut c = Campaign::create(
            NewCampaign {
                id: Some(CampaignId("sample-1".into())),
                setting: "fantasy".into(),
                start_scenario: "s".into(),
                player_name: "Ivan".into(),
                player_description: "d".into(),
                engine: Engine::V2,
                rng_seed: u64::MAX - 7,
            },
            &clock,
        )
        .unwrap();
        for name in ["Castle Guard", "Barkeep"] {
            c.upsert_character(CharacterUpsert::npc(name, "x", CharacterType::Humanoid, HealthState::Healthy))
                .unwrap();
        }
        c.upsert_environment("Tavern", "warm", false).unwrap();
        c.upsert_environment("Barracks", "cold", true).unwrap();
        for i in 0..5 {
            c.push_message(MessageRole::Player, ActionKind::Do, format!("p{i}"), &clock).unwrap();
            c.push_message(MessageRole::GameMaster, ActionKind::None, format!("g{i}"), &clock).unwrap();
        }
        c
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let store = CampaignStore::open(dir.path()).unwrap();
        let c = sample();
        assert_eq!((c.characters.len(), c.environments.len(), c.messages.len()), (3, 2, 10));
        store.create(&c).unwrap();
        assert_eq!(store.load(&c.id).unwrap(), c);
    }

    #[test]
    fn document_carries_schema_version_and_camel_case() {
        let doc = to_document(&sample()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["schemaVersion"], 1);
        assert!(v.get("playerCharacterId").is_some());
        assert!(v["characters"][0].get("currentHp").is_some());
        assert!(v["environments"][0].get("isPlayerHere").is_some());
        assert_eq!(v["rngSeed"], u64::MAX - 7);
    }

    #[test]
    fn truncated_file_fails_with_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let store = CampaignStore::open(dir.path()).unwrap();
        let c = sample();
        store.save(&c).unwrap();
        let path = store.path_of(&c.id).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        match store.load(&c.id) {
            Err(StoreError::Corrupt { line, .. }) => assert!(line > 1),
            other => panic!("expected corrupt error, got {other:?}"),
        }
    }

    #[test]
    fn load_is_a_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let store = CampaignStore::open(dir.path()).unwrap();
        let mut c = sample();
        store.save(&c).unwrap();
        let pid = c.player_character_id;
        c.apply_hp_delta(pid, -10).unwrap();
        assert_eq!(store.load(&c.id).unwrap().player().current_hp, 40);
    }

    #[test]
    fn duplicate_missing_and_bad_ids() {
        let dir = tempfile::tempdir().unwrap();
        let store = CampaignStore::open(dir.path()).unwrap();
        let c = sample();
        store.create(&c).unwrap();
        assert!(matches!(store.create(&c), Err(StoreError::Duplicate(_))));
        assert!(matches!(store.load(&CampaignId("nope".into())), Err(StoreError::NotFound(_))));
        assert!(matches!(store.load(&CampaignId("../x".into())), Err(StoreError::InvalidId(_))));
        store.save_trace(&c.id, &vec![1, 2, 3]).unwrap();
        assert_eq!(store.list().unwrap(), vec![c.id.clone()]);
        store.delete(&c.id).unwrap();
        assert!(matches!(store.load(&c.id), Err(StoreError::NotFound(_))));
        assert_eq!(store.load_trace::<Vec<i32>>(&c.id).unwrap(), Vec::<i32>::new());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = CampaignStore::open(dir.path()).unwrap();
        let c = sample();
        store.save(&c).unwrap();
        let path = store.path_of(&c.id).unwrap();
        let text = fs::read_to_string(&path).unwrap().replace("\"schemaVersion\": 1", "\"schemaVersion\": 2");
        fs::write(&path, text).unwrap();
        assert!(matches!(store.load(&c.id), Err(StoreError::SchemaVersion { found: 2, .. })));
    }
}
