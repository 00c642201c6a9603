//! JSON-over-HTTP adapter around [`GameMaster`] and [`CampaignStore`].
//!
//! Every route maps onto the in-process engine API. Turns run on the blocking
//! pool because model backends block. A campaign plays one turn at a time;
//! a second request while one is in flight is rejected as busy.

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use tower_http::services::ServeDir;

use crate::engine::{CampaignTrace, GameMaster, StateDelta, TurnError, TurnOutcome};
use crate::llm::LlmError;
use crate::state::{ActionKind, Campaign, CampaignId, CampaignStore, Engine, NewCampaign, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    NotFound,
    Busy,
    BadRequest,
    UpstreamLlm,
    ContentFiltered,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::Busy => StatusCode::CONFLICT,
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::UpstreamLlm => StatusCode::BAD_GATEWAY,
            ErrorCode::ContentFiltered => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) | StoreError::InvalidId(_) => ApiError::new(ErrorCode::NotFound, e.to_string()),
            _ => ApiError::new(ErrorCode::Internal, e.to_string()),
        }
    }
}

impl From<TurnError> for ApiError {
    fn from(e: TurnError) -> Self {
        let code = match &e {
            TurnError::InvalidAction(_) | TurnError::EmptyInput | TurnError::AlreadyStarted | TurnError::NoOpponent => {
                ErrorCode::BadRequest
            }
            TurnError::Llm(LlmError::ContentFiltered(_)) => {
                return ApiError::new(
                    ErrorCode::ContentFiltered,
                    "The model provider's content filter blocked this turn. Try describing your action differently.",
                )
            }
            TurnError::Llm(_) | TurnError::NarratorFailed { .. } | TurnError::Unparseable { .. } => {
                ErrorCode::UpstreamLlm
            }
            TurnError::State(_) => ErrorCode::Internal,
        };
        ApiError::new(code, e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(ErrorCode::Internal, e.to_string())
}

/// Shared by every request.
pub struct AppState {
    pub store: CampaignStore,
    pub gm: GameMaster,
    busy: Mutex<HashSet<CampaignId>>,
}

impl AppState {
    pub fn new(store: CampaignStore, gm: GameMaster) -> Self {
        Self {
            store,
            gm,
            busy: Mutex::new(HashSet::new()),
        }
    }

    fn claim(self: &Arc<Self>, id: &CampaignId) -> ApiResult<TurnClaim> {
        let mut busy = self.busy.lock().expect("busy set poisoned");
        if !busy.insert(id.clone()) {
            return Err(ApiError::new(
                ErrorCode::Busy,
                "The world is still resolving the previous action.",
            ));
        }
        Ok(TurnClaim {
            state: self.clone(),
            id: id.clone(),
        })
    }

    /// Plays one turn and persists the campaign and its trace.
    fn play(&self, id: &CampaignId, kind: ActionKind, text: &str) -> ApiResult<TurnOutcome> {
        let mut campaign = self.store.load(id)?;
        let result = self.gm.turn(&mut campaign, kind, text);
        // a failed turn can still leave a log entry behind
        self.store.save(&campaign)?;
        let outcome = result?;
        let mut trace: CampaignTrace = self.store.load_trace(id)?;
        trace.turns.push(outcome.trace.clone());
        self.store.save_trace(id, &trace)?;
        Ok(outcome)
    }
}

/// Marks a campaign busy until dropped.
struct TurnClaim {
    state: Arc<AppState>,
    id: CampaignId,
}

impl Drop for TurnClaim {
    fn drop(&mut self) {
        if let Ok(mut busy) = self.state.busy.lock() {
            busy.remove(&self.id);
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateCampaign {
    pub setting: String,
    pub start_scenario: String,
    pub player_name: String,
    #[serde(default)]
    pub player_description: String,
    pub engine: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Created {
    pub campaign_id: CampaignId,
    pub seed: u64,
    /// The introduction, when the opening turn was played inline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub narrative: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateQuery {
    #[serde(default)]
    play: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayTurn {
    pub action_kind: String,
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnReply {
    pub narrative: String,
    pub state_delta: StateDelta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignSummary {
    pub id: CampaignId,
    pub setting: String,
    pub engine: Engine,
    pub player_name: String,
    pub updated_at: DateTime<Utc>,
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(internal)?
}

async fn create_campaign(
    State(app): State<Arc<AppState>>,
    Query(query): Query<CreateQuery>,
    Json(body): Json<CreateCampaign>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let engine: Engine = body
        .engine
        .parse()
        .map_err(|e: crate::state::ParseTokenError| ApiError::new(ErrorCode::BadRequest, e.to_string()))?;
    let seed = body.seed.unwrap_or_else(rand::random);
    let params = NewCampaign {
        id: None,
        setting: body.setting,
        start_scenario: body.start_scenario,
        player_name: body.player_name,
        player_description: body.player_description,
        engine,
        rng_seed: seed,
    };
    let campaign = app
        .gm
        .create_campaign(params)
        .map_err(|e| ApiError::new(ErrorCode::BadRequest, e.to_string()))?;
    let id = campaign.id.clone();
    let play = matches!(query.play.as_deref(), Some("1" | "true"));
    let narrative = blocking(move || {
        app.store.create(&campaign)?;
        if !play {
            return Ok(None);
        }
        let _claim = app.claim(&campaign.id)?;
        Ok(Some(app.play(&campaign.id, ActionKind::GameStart, "")?.narrative))
    })
    .await?;
    Ok((
        StatusCode::CREATED,
        Json(Created {
            campaign_id: id,
            seed,
            narrative,
        }),
    ))
}

async fn list_campaigns(State(app): State<Arc<AppState>>) -> ApiResult<Json<Vec<CampaignSummary>>> {
    blocking(move || {
        let mut out = Vec::new();
        for id in app.store.list()? {
            // skip documents that disappeared or fail to load
            let Ok(c) = app.store.load(&id) else { continue };
            out.push(CampaignSummary {
                id: c.id.clone(),
                setting: c.setting.clone(),
                engine: c.engine,
                player_name: c.player().name.clone(),
                updated_at: c.updated_at,
            });
        }
        out.sort_by_key(|s| std::cmp::Reverse(s.updated_at));
        Ok(Json(out))
    })
    .await
}

async fn get_campaign(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Campaign>> {
    blocking(move || Ok(Json(app.store.load(&CampaignId(id))?))).await
}

async fn get_trace(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<CampaignTrace>> {
    blocking(move || {
        let id = CampaignId(id);
        if !app.store.exists(&id) {
            return Err(StoreError::NotFound(id).into());
        }
        Ok(Json(app.store.load_trace(&id)?))
    })
    .await
}

async fn delete_campaign(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    blocking(move || {
        let id = CampaignId(id);
        let _claim = app.claim(&id)?;
        app.store.delete(&id)?;
        Ok(StatusCode::NO_CONTENT)
    })
    .await
}

async fn post_message(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(body): Json<PlayTurn>,
) -> ApiResult<Json<TurnReply>> {
    let kind: ActionKind = body
        .action_kind
        .parse()
        .map_err(|e: crate::state::ParseTokenError| ApiError::new(ErrorCode::BadRequest, e.to_string()))?;
    let id = CampaignId(id);
    if !app.store.exists(&id) {
        return Err(StoreError::NotFound(id).into());
    }
    let claim = app.claim(&id)?;
    blocking(move || {
        let _claim = claim;
        let outcome = app.play(&id, kind, &body.text)?;
        Ok(Json(TurnReply {
            narrative: outcome.narrative,
            state_delta: outcome.state_delta,
        }))
    })
    .await
}

/// The API routes, plus static files from `ui_dir` under `/` when given.
pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/campaigns", post(create_campaign).get(list_campaigns))
        .route("/api/campaigns/{id}", get(get_campaign).delete(delete_campaign))
        .route("/api/campaigns/{id}/trace", get(get_trace))
        .route("/api/campaigns/{id}/messages", post(post_message))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds and serves until ctrl-c.
pub async fn serve(state: Arc<AppState>, addr: std::net::SocketAddr, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "serving");
    axum::serve(listener, router(state, ui_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
